#include "hvp/report.hpp"

#include <cstdio>
#include <sstream>

#include "hvp/errors.hpp"

namespace hvp {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path), width_(header.size()) {
  if (!out_) throw Error("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != width_) throw Error("csv row width mismatch in " + path_);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [this](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_double(c);
          } else {
            out_ << c;
          }
        },
        cells[i]);
  }
  out_ << '\n';
  if (!out_) throw Error("write failed for " + path_);
}

void Manifest::set(const std::string& key, double value) { kv_[key] = format_double(value); }

void Manifest::add_artifact(const std::string& name) {
  artifacts_.push_back(name);
  std::string joined;
  for (const auto& a : artifacts_) joined += (joined.empty() ? "" : ";") + a;
  kv_["artifacts"] = joined;
}

std::string Manifest::text() const {
  std::string out;
  for (const auto& [k, v] : kv_) out += k + "=" + v + "\n";
  return out;
}

void Manifest::write(const std::string& path) const {
  std::ofstream out(path);
  out << text();
  if (!out) throw Error("cannot write manifest " + path);
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) throw Error("malformed manifest line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace hvp
