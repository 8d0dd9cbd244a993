#pragma once

#include <string>
#include <vector>

#include "hvp/fields.hpp"

namespace hvp {

/// Binary field snapshot.
///
/// Layout: 24-byte header (magic "HVPF", u16 version, u32 nx, u32 ny,
/// u32 component count, 6 reserved zero bytes), then for each component
/// nx*ny little-endian float64 values in row-major order with rows indexed
/// by the y node index.
struct Snapshot {
  int nx = 0;
  int ny = 0;
  std::vector<ScalarField> components;
};

inline constexpr unsigned kSnapshotVersion = 1;

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

/// Components (v1, v2, h, a).
void write_state(const std::string& path, const StateField& u);
StateField read_state(const std::string& path, const Grid& grid);

}  // namespace hvp
