#pragma once

#include <string>

#include "nodegen/node_set.hpp"

namespace nodegen {

// Binary layout: "NODS", u32 version = 1, u32 d, u64 N, u8 flags_present,
// N*d little-endian f64 positions, then N flag bytes when flags_present != 0
// (bit 0 boundary, bit 1 pinned).

void write_nods(const NodeSet& nodes, const std::string& path, bool with_flags = true);
NodeSet read_nods(const std::string& path);

/// CSV: header "x,y,z[,boundary]" (x1..xd for d != 2, 3), %.17g values.
void write_nodes_csv(const NodeSet& nodes, const std::string& path, bool with_boundary = true);
NodeSet read_nodes_csv(const std::string& path);

/// Dispatches on the extension: ".csv" for CSV, anything else binary.
void write_nodes(const NodeSet& nodes, const std::string& path);
NodeSet read_nodes(const std::string& path);

}  // namespace nodegen
