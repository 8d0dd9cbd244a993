#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hvp {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

/// Comma-separated table; doubles are written with 17 significant digits.
class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<Cell>& cells);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t width_;
};

/// Flat key=value file, one entry per line in key order.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value) { kv_[key] = std::to_string(value); }
  void set(const std::string& key, int value) { kv_[key] = std::to_string(value); }
  void add_artifact(const std::string& name);
  std::string text() const;
  void write(const std::string& path) const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
  std::vector<std::string> artifacts_;
};

/// Reads a manifest back into a map; throws Error on malformed lines.
std::map<std::string, std::string> read_manifest(const std::string& path);

std::string format_double(double v);

}  // namespace hvp
