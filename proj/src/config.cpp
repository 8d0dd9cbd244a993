#include "hvp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <toml.hpp>

#include "hvp/errors.hpp"

namespace hvp {
namespace {

/// Flattened view "section.key" -> node, with bookkeeping of consumed keys.
class Reader {
 public:
  Reader(const toml::table& root, std::vector<std::string>& errors) : errors_(errors) {
    for (auto&& [k, v] : root) {
      const std::string key(k.str());
      if (const auto* t = v.as_table()) {
        for (auto&& [k2, v2] : *t) nodes_[key + "." + std::string(k2.str())] = &v2;
      } else {
        nodes_[key] = &v;
      }
    }
  }

  template <typename T>
  void number(const std::string& key, T& out) {
    const toml::node* n = take(key);
    if (!n) return;
    if constexpr (std::is_integral_v<T>) {
      if (auto v = n->value_exact<int64_t>()) {
        out = static_cast<T>(*v);
        return;
      }
      errors_.push_back(key + ": expected an integer");
    } else {
      if (auto v = n->value<double>()) {
        out = *v;
        return;
      }
      errors_.push_back(key + ": expected a number");
    }
  }

  void string(const std::string& key, std::string& out, bool required = false) {
    const toml::node* n = take(key);
    if (!n) {
      if (required) errors_.push_back(key + ": missing required key");
      return;
    }
    if (auto v = n->value<std::string>()) {
      out = *v;
    } else {
      errors_.push_back(key + ": expected a string");
    }
  }

  template <typename T>
  void list(const std::string& key, std::vector<T>& out) {
    const toml::node* n = take(key);
    if (!n) return;
    const auto* arr = n->as_array();
    if (!arr) {
      errors_.push_back(key + ": expected an array");
      return;
    }
    std::vector<T> tmp;
    for (const auto& el : *arr) {
      std::optional<T> v;
      if constexpr (std::is_integral_v<T>) {
        if (auto x = el.value_exact<int64_t>()) v = static_cast<T>(*x);
      } else {
        v = el.value<double>();
      }
      if (!v) {
        errors_.push_back(key + ": array entries must be numbers");
        return;
      }
      tmp.push_back(*v);
    }
    out = std::move(tmp);
  }

  void vec2(const std::string& key, Eigen::Vector2d& out) {
    std::vector<double> v;
    const bool present = nodes_.count(key) > 0;
    list(key, v);
    if (!present) return;
    if (v.size() != 2) {
      errors_.push_back(key + ": expected two numbers");
      return;
    }
    out = {v[0], v[1]};
  }

  void omega(const std::string& key, double& out) {
    const toml::node* n = take(key);
    if (!n) return;
    if (auto s = n->value<std::string>()) {
      if (*s == "auto") {
        out = std::numeric_limits<double>::quiet_NaN();
      } else {
        errors_.push_back(key + ": expected \"auto\" or a number");
      }
    } else if (auto v = n->value<double>()) {
      out = *v;
    } else {
      errors_.push_back(key + ": expected \"auto\" or a number");
    }
  }

  void error(std::string msg) { errors_.push_back(std::move(msg)); }

  void report_unknown() {
    for (const auto& [k, n] : nodes_)
      if (!used_.count(k)) errors_.push_back(k + ": unknown key");
  }

 private:
  const toml::node* take(const std::string& key) {
    auto it = nodes_.find(key);
    if (it == nodes_.end()) return nullptr;
    used_.insert(key);
    return it->second;
  }

  std::map<std::string, const toml::node*> nodes_;
  std::set<std::string> used_;
  std::vector<std::string>& errors_;
};

void read_all(Reader& r, RunConfig& c) {
  r.string("scenario", c.scenario, true);
  int64_t seed = static_cast<int64_t>(c.seed);
  r.number("seed", seed);
  c.seed = static_cast<std::uint64_t>(seed);

  int n = -1;
  r.number("grid.n", n);
  if (n > 0) c.grid.nx = c.grid.ny = n;
  r.number("grid.nx", c.grid.nx);
  r.number("grid.ny", c.grid.ny);
  r.number("grid.lx", c.grid.lx);
  r.number("grid.ly", c.grid.ly);

  RheologyParams& p = c.params;
  r.number("params.rho_ice", p.rho_ice);
  r.number("params.e", p.e);
  r.number("params.delta", p.delta);
  r.number("params.p_star", p.p_star);
  r.number("params.c_bullet", p.c_bullet);
  r.number("params.kappa", p.kappa);
  r.number("params.c_cor", p.c_cor);
  r.number("params.g", p.g);
  r.number("params.rho_atm", p.rho_atm);
  r.number("params.C_atm", p.C_atm);
  r.number("params.rho_ocn", p.rho_ocn);
  r.number("params.C_ocn", p.C_ocn);
  const double atm0 = std::atan2(p.R_atm(1, 0), p.R_atm(0, 0));
  const double ocn0 = std::atan2(p.R_ocn(1, 0), p.R_ocn(0, 0));
  double turn_atm = atm0, turn_ocn = ocn0;
  r.number("params.turn_atm", turn_atm);
  r.number("params.turn_ocn", turn_ocn);
  // Rebuild only on change so the default matrices survive bit for bit.
  if (turn_atm != atm0) p.R_atm = RheologyParams::rotation(turn_atm);
  if (turn_ocn != ocn0) p.R_ocn = RheologyParams::rotation(turn_ocn);

  r.vec2("forcing.wind", c.forcing.wind);
  r.number("forcing.ocean_gyre", c.forcing.ocean_gyre);
  r.vec2("forcing.grad_H", c.forcing.grad_H);
  r.string("forcing.growth", c.forcing.growth);
  r.number("forcing.growth_g0", c.forcing.growth_g0);

  r.number("initial.U0", c.initial.U0);
  r.number("initial.h_mean", c.initial.h_mean);
  r.number("initial.h_amp", c.initial.h_amp);
  r.number("initial.a_mean", c.initial.a_mean);
  r.number("initial.a_amp", c.initial.a_amp);

  std::string scheme = scheme_name(c.solver.scheme);
  r.string("solver.scheme", scheme);
  if (scheme == "backward-euler") {
    c.solver.scheme = Scheme::backward_euler;
  } else if (scheme == "trapezoidal") {
    c.solver.scheme = Scheme::trapezoidal;
  } else {
    r.error("solver.scheme: expected \"backward-euler\" or \"trapezoidal\"");
  }
  r.number("solver.dt", c.solver.dt);
  r.number("solver.T", c.solver.T);
  r.number("solver.tol", c.solver.tol);
  r.number("solver.kmax", c.solver.kmax);
  r.number("solver.p", c.solver.p);
  r.number("solver.q", c.solver.q);
  r.omega("solver.omega", c.solver.omega);
  r.number("solver.max_halvings", c.solver.max_halvings);
  r.number("solver.det_floor", c.solver.det_floor);

  r.string("output.dir", c.output.dir);
  r.number("output.snapshot_stride", c.output.snapshot_stride);

  StudySpec& s = c.studies;
  r.list("studies.mms_sizes", s.mms_sizes);
  r.number("studies.mms_T", s.mms_T);
  r.list("studies.cross_sizes", s.cross_sizes);
  r.list("studies.cross_dts", s.cross_dts);
  r.number("studies.cross_T", s.cross_T);
  r.list("studies.T_ladder", s.T_ladder);
  r.list("studies.depend_sizes", s.depend_sizes);
  r.number("studies.probe_samples", s.probe_samples);
  r.number("studies.probe_directions", s.probe_directions);
  r.number("studies.spectrum_n", s.spectrum_n);
}

void join_and_throw(const std::string& source, const std::vector<std::string>& errors) {
  if (errors.empty()) return;
  std::string msg = "invalid configuration " + source + ":";
  for (const auto& e : errors) msg += "\n  - " + e;
  throw ConfigError(msg);
}

std::vector<std::string> violations(const RunConfig& c) {
  std::vector<std::string> bad;
  const auto& s = c.solver;
  if (!(s.q > 2.0)) bad.push_back("solver.q = " + std::to_string(s.q) + " violates q in (2, inf)");
  if (!(s.p > 1.0)) bad.push_back("solver.p = " + std::to_string(s.p) + " violates p in (1, inf)");
  if (s.p > 0.0 && s.q > 0.0 && !(1.0 / s.p + 1.0 / s.q < 0.5)) {
    bad.push_back("solver.p = " + std::to_string(s.p) + ", solver.q = " + std::to_string(s.q) +
                  " violates 1/p + 1/q < 1/2");
  }
  if (!(s.dt > 0.0)) bad.push_back("solver.dt violates dt > 0");
  if (!(s.T > 0.0)) bad.push_back("solver.T violates T > 0");
  if (!(s.tol > 0.0)) bad.push_back("solver.tol violates tol > 0");
  if (s.kmax < 1) bad.push_back("solver.kmax violates kmax >= 1");
  if (s.max_halvings < 0) bad.push_back("solver.max_halvings violates max_halvings >= 0");
  if (!(s.det_floor > 0.0 && s.det_floor <= 1.0)) {
    bad.push_back("solver.det_floor violates 0 < det_floor <= 1");
  }
  if (!std::isnan(s.omega) && !(s.omega >= 0.0)) bad.push_back("solver.omega violates omega >= 0");

  if (c.grid.nx < 4 || c.grid.ny < 4) bad.push_back("grid violates nx, ny >= 4");
  if (!(c.grid.lx > 0.0 && c.grid.ly > 0.0)) bad.push_back("grid violates lx, ly > 0");

  try {
    c.params.validate();
  } catch (const ConfigError& e) {
    bad.emplace_back(e.what());
  }

  if (c.scenario != "vortex" && c.scenario != "rest" && c.scenario != "adversarial") {
    bad.push_back("scenario = \"" + c.scenario + "\" not in {vortex, rest, adversarial}");
  }
  const auto& f = c.forcing;
  if (f.growth != "zero" && f.growth != "constant" && f.growth != "tanh") {
    bad.push_back("forcing.growth = \"" + f.growth + "\" not in {zero, constant, tanh}");
  }
  if (!std::isfinite(f.growth_g0)) bad.push_back("forcing.growth_g0 must be finite");
  if (!(f.ocean_gyre >= 0.0)) bad.push_back("forcing.ocean_gyre violates ocean_gyre >= 0");

  const auto& in = c.initial;
  if (!(in.h_mean - std::abs(in.h_amp) > c.params.kappa)) {
    bad.push_back("initial thickness violates h_mean - |h_amp| > kappa");
  }
  if (!(in.a_mean - std::abs(in.a_amp) > 0.0 && in.a_mean + std::abs(in.a_amp) < 1.0)) {
    bad.push_back("initial concentration violates 0 < a_mean -+ |a_amp| < 1");
  }

  if (c.output.snapshot_stride < 1) bad.push_back("output.snapshot_stride violates stride >= 1");

  const auto& st = c.studies;
  auto sizes_ok = [](const std::vector<int>& v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](int n) { return n >= 4; });
  };
  auto positive = [](const std::vector<double>& v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  };
  if (!sizes_ok(st.mms_sizes)) bad.push_back("studies.mms_sizes must be non-empty with n >= 4");
  if (!sizes_ok(st.cross_sizes)) bad.push_back("studies.cross_sizes must be non-empty with n >= 4");
  if (!positive(st.cross_dts) || st.cross_dts.size() != st.cross_sizes.size()) {
    bad.push_back("studies.cross_dts must be positive and match studies.cross_sizes in length");
  }
  if (!(st.mms_T > 0.0 && st.cross_T > 0.0)) bad.push_back("studies horizons violate T > 0");
  if (!positive(st.T_ladder)) bad.push_back("studies.T_ladder must be positive");
  if (!positive(st.depend_sizes)) bad.push_back("studies.depend_sizes must be positive");
  if (st.probe_samples < 1 || st.probe_directions < 1) {
    bad.push_back("studies.probe_samples and probe_directions violate >= 1");
  }
  if (st.spectrum_n < 4) bad.push_back("studies.spectrum_n violates n >= 4");
  if (c.threads < 1) bad.push_back("threads violates threads >= 1");
  return bad;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

}  // namespace

RunConfig::RunConfig() {
  params.e = 2.0;
  params.delta = 0.05;
  params.p_star = 1000.0;
  params.c_bullet = 20.0;
  params.kappa = 1e-3;
  params.rho_ice = 1.0;
  params.c_cor = 0.5;
  params.g = 1.0;
  params.rho_atm = 1.0;
  params.C_atm = 1.0;
  params.rho_ocn = 1.0;
  params.C_ocn = 1.0;
  params.R_atm = RheologyParams::rotation(0.0);
  params.R_ocn = RheologyParams::rotation(0.1);
}

std::string scheme_name(Scheme s) {
  return s == Scheme::backward_euler ? "backward-euler" : "trapezoidal";
}

RunConfig parse_config_string(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "cannot parse " << source << ": " << e.description() << " at line "
       << e.source().begin.line;
    throw ConfigError(os.str());
  }
  RunConfig cfg;
  std::vector<std::string> errors;
  Reader r(root, errors);
  read_all(r, cfg);
  r.report_unknown();
  for (auto& v : violations(cfg)) errors.push_back(std::move(v));
  join_and_throw(source, errors);
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str(), path);
}

void validate_config(const RunConfig& cfg) { join_and_throw("(after overrides)", violations(cfg)); }

std::string canonical_config(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  auto num = [](double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  };
  const auto& p = c.params;
  kv["scenario"] = c.scenario;
  kv["seed"] = std::to_string(c.seed);
  kv["grid.nx"] = std::to_string(c.grid.nx);
  kv["grid.ny"] = std::to_string(c.grid.ny);
  kv["grid.lx"] = num(c.grid.lx);
  kv["grid.ly"] = num(c.grid.ly);
  kv["params.rho_ice"] = num(p.rho_ice);
  kv["params.e"] = num(p.e);
  kv["params.delta"] = num(p.delta);
  kv["params.p_star"] = num(p.p_star);
  kv["params.c_bullet"] = num(p.c_bullet);
  kv["params.kappa"] = num(p.kappa);
  kv["params.c_cor"] = num(p.c_cor);
  kv["params.g"] = num(p.g);
  kv["params.rho_atm"] = num(p.rho_atm);
  kv["params.C_atm"] = num(p.C_atm);
  kv["params.rho_ocn"] = num(p.rho_ocn);
  kv["params.C_ocn"] = num(p.C_ocn);
  kv["params.turn_atm"] = num(std::atan2(p.R_atm(1, 0), p.R_atm(0, 0)));
  kv["params.turn_ocn"] = num(std::atan2(p.R_ocn(1, 0), p.R_ocn(0, 0)));
  kv["forcing.wind"] = num(c.forcing.wind.x()) + "," + num(c.forcing.wind.y());
  kv["forcing.ocean_gyre"] = num(c.forcing.ocean_gyre);
  kv["forcing.grad_H"] = num(c.forcing.grad_H.x()) + "," + num(c.forcing.grad_H.y());
  kv["forcing.growth"] = c.forcing.growth;
  kv["forcing.growth_g0"] = num(c.forcing.growth_g0);
  kv["initial.U0"] = num(c.initial.U0);
  kv["initial.h_mean"] = num(c.initial.h_mean);
  kv["initial.h_amp"] = num(c.initial.h_amp);
  kv["initial.a_mean"] = num(c.initial.a_mean);
  kv["initial.a_amp"] = num(c.initial.a_amp);
  kv["solver.scheme"] = scheme_name(c.solver.scheme);
  kv["solver.dt"] = num(c.solver.dt);
  kv["solver.T"] = num(c.solver.T);
  kv["solver.tol"] = num(c.solver.tol);
  kv["solver.kmax"] = std::to_string(c.solver.kmax);
  kv["solver.p"] = num(c.solver.p);
  kv["solver.q"] = num(c.solver.q);
  kv["solver.omega"] = std::isnan(c.solver.omega) ? "auto" : num(c.solver.omega);
  kv["solver.max_halvings"] = std::to_string(c.solver.max_halvings);
  kv["solver.det_floor"] = num(c.solver.det_floor);
  kv["output.snapshot_stride"] = std::to_string(c.output.snapshot_stride);
  const auto& s = c.studies;
  kv["studies.mms_sizes"] = join(s.mms_sizes);
  kv["studies.mms_T"] = num(s.mms_T);
  kv["studies.cross_sizes"] = join(s.cross_sizes);
  kv["studies.cross_dts"] = join(s.cross_dts);
  kv["studies.cross_T"] = num(s.cross_T);
  kv["studies.T_ladder"] = join(s.T_ladder);
  kv["studies.depend_sizes"] = join(s.depend_sizes);
  kv["studies.probe_samples"] = std::to_string(s.probe_samples);
  kv["studies.probe_directions"] = std::to_string(s.probe_directions);
  kv["studies.spectrum_n"] = std::to_string(s.spectrum_n);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

}  // namespace hvp
