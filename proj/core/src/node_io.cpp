#include "nodegen/node_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "nodegen/error.hpp"

namespace nodegen {

namespace {

constexpr char kMagic[4] = {'N', 'O', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  template <class T>
  T get(const char* what) {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in_) throw ParseError(std::string("truncated node file while reading ") + what, offset_);
    offset_ += sizeof(T);
    return value;
  }
  void bytes(char* dst, std::size_t n, const char* what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (!in_) throw ParseError(std::string("truncated node file while reading ") + what, offset_);
    offset_ += n;
  }
  std::size_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::size_t offset_ = 0;
};

std::vector<std::string> axis_names(std::size_t d) {
  if (d == 2) return {"x", "y"};
  if (d == 3) return {"x", "y", "z"};
  std::vector<std::string> names;
  for (std::size_t k = 0; k < d; ++k) names.push_back("x" + std::to_string(k + 1));
  return names;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_nods(const NodeSet& nodes, const std::string& path, bool with_flags) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(nodes.dim()));
  put<std::uint64_t>(out, nodes.size());
  put<std::uint8_t>(out, with_flags ? 1 : 0);
  const auto& c = nodes.positions.coords();
  out.write(reinterpret_cast<const char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(double)));
  if (with_flags) {
    std::vector<char> flags(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      flags[i] = static_cast<char>((nodes.boundary[i] ? 1 : 0) | (nodes.pinned[i] ? 2 : 0));
    out.write(flags.data(), static_cast<std::streamsize>(flags.size()));
  }
  if (!out) throw IoError("write failed for " + path);
}

NodeSet read_nods(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Reader r(in);
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw ParseError("bad node file magic", 0);
  const auto version = r.get<std::uint32_t>("version");
  if (version != kVersion) throw ParseError("unsupported node file version", 4);
  const auto d = r.get<std::uint32_t>("dimension");
  if (d == 0) throw ParseError("zero dimension", 8);
  const auto n = r.get<std::uint64_t>("count");
  const auto has_flags = r.get<std::uint8_t>("flag marker");
  // Reject counts the file cannot hold before allocating for them.
  const std::uintmax_t available = std::filesystem::file_size(path) - r.offset();
  const std::uintmax_t per_node = std::uintmax_t{d} * sizeof(double) + (has_flags ? 1 : 0);
  if (n > available / per_node) throw ParseError("node count exceeds the file size", 16);
  std::vector<double> coords(static_cast<std::size_t>(n) * d);
  r.bytes(reinterpret_cast<char*>(coords.data()), coords.size() * sizeof(double), "positions");
  NodeSet nodes(PointSet(d, std::move(coords)));
  if (has_flags) {
    std::vector<char> flags(static_cast<std::size_t>(n));
    r.bytes(flags.data(), flags.size(), "flags");
    for (std::size_t i = 0; i < flags.size(); ++i) {
      nodes.boundary[i] = (flags[i] & 1) ? 1 : 0;
      nodes.pinned[i] = (flags[i] & 2) ? 1 : 0;
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes in node file", r.offset());
  return nodes;
}

void write_nodes_csv(const NodeSet& nodes, const std::string& path, bool with_boundary) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open " + path + " for writing");
  const auto names = axis_names(nodes.dim());
  for (std::size_t k = 0; k < names.size(); ++k) std::fprintf(f, k ? ",%s" : "%s", names[k].c_str());
  if (with_boundary) std::fprintf(f, ",boundary");
  std::fprintf(f, "\n");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto p = nodes.positions[i];
    for (std::size_t k = 0; k < p.size(); ++k) std::fprintf(f, k ? ",%.17g" : "%.17g", p[k]);
    if (with_boundary) std::fprintf(f, ",%d", nodes.boundary[i] ? 1 : 0);
    std::fprintf(f, "\n");
  }
  if (std::fclose(f) != 0) throw IoError("write failed for " + path);
}

NodeSet read_nodes_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::size_t offset = 0;
  if (!std::getline(in, line)) throw ParseError("empty node CSV", 0);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  offset += line.size() + 1;
  const bool has_boundary = !header.empty() && header.back() == "boundary";
  const std::size_t d = header.size() - (has_boundary ? 1 : 0);
  if (d == 0) throw ParseError("node CSV header has no coordinate columns", 0);
  std::vector<double> coords;
  std::vector<std::uint8_t> boundary;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    std::size_t pos = 0;
    std::size_t column = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      const std::string cell = line.substr(pos, comma - pos);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size())
        throw ParseError("invalid number '" + cell + "'", line_start + pos);
      if (column < d)
        coords.push_back(v);
      else if (has_boundary && column == d)
        boundary.push_back(v != 0.0 ? 1 : 0);
      else
        throw ParseError("too many columns", line_start + pos);
      ++column;
      pos = comma + 1;
    }
    if (column != header.size()) throw ParseError("row has " + std::to_string(column) + " columns", line_start);
  }
  NodeSet nodes(PointSet(d, std::move(coords)));
  if (has_boundary) nodes.boundary = std::move(boundary);
  return nodes;
}

void write_nodes(const NodeSet& nodes, const std::string& path) {
  if (ends_with(path, ".csv"))
    write_nodes_csv(nodes, path);
  else
    write_nods(nodes, path);
}

NodeSet read_nodes(const std::string& path) {
  return ends_with(path, ".csv") ? read_nodes_csv(path) : read_nods(path);
}

}  // namespace nodegen
