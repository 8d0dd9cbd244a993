#include "hvp/snapshot.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "hvp/errors.hpp"

namespace hvp {
namespace {

template <typename T>
void put_le(std::ostream& os, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t k = 0; k < sizeof(T); ++k) bytes[k] = static_cast<unsigned char>(bits >> (8 * k));
  os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!is) throw CorruptState("snapshot truncated");
  std::uint64_t bits = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) bits |= std::uint64_t{bytes[k]} << (8 * k);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& snap) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open snapshot for writing: " + path);
  os.write("HVPF", 4);
  put_le<std::uint16_t>(os, kSnapshotVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(snap.nx));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(snap.ny));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(snap.components.size()));
  const char reserved[6] = {};
  os.write(reserved, sizeof reserved);
  for (const auto& c : snap.components) {
    if (c.rows() != snap.nx || c.cols() != snap.ny) throw CorruptState("snapshot component shape");
    for (int j = 0; j < snap.ny; ++j)
      for (int i = 0; i < snap.nx; ++i) put_le<double>(os, c(i, j));
  }
  if (!os) throw Error("failed writing snapshot: " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open snapshot: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "HVPF", 4) != 0) throw CorruptState("bad snapshot magic");
  const auto version = get_le<std::uint16_t>(is);
  if (version != kSnapshotVersion) throw CorruptState("unsupported snapshot version");
  Snapshot snap;
  snap.nx = static_cast<int>(get_le<std::uint32_t>(is));
  snap.ny = static_cast<int>(get_le<std::uint32_t>(is));
  const auto count = get_le<std::uint32_t>(is);
  char reserved[6];
  is.read(reserved, sizeof reserved);
  for (std::uint32_t c = 0; c < count; ++c) {
    ScalarField f(snap.nx, snap.ny);
    for (int j = 0; j < snap.ny; ++j)
      for (int i = 0; i < snap.nx; ++i) f(i, j) = get_le<double>(is);
    snap.components.push_back(std::move(f));
  }
  return snap;
}

void write_state(const std::string& path, const StateField& u) {
  write_snapshot(path, {u.grid.nx, u.grid.ny, {u.v.x, u.v.y, u.h, u.a}});
}

StateField read_state(const std::string& path, const Grid& grid) {
  Snapshot s = read_snapshot(path);
  if (s.nx != grid.nx || s.ny != grid.ny || s.components.size() != 4) {
    throw CorruptState("snapshot does not hold a state on this grid");
  }
  return {grid, {s.components[0], s.components[1]}, s.components[2], s.components[3]};
}

}  // namespace hvp
