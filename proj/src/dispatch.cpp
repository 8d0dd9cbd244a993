#include "hvp/dispatch.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>

#include "hvp/analysis.hpp"
#include "hvp/errors.hpp"
#include "hvp/eulerian.hpp"
#include "hvp/report.hpp"
#include "hvp/scenario.hpp"
#include "hvp/sector.hpp"
#include "hvp/snapshot.hpp"

namespace fs = std::filesystem;

namespace hvp {
namespace {

struct Context {
  const RunConfig& cfg;
  fs::path out;
  Manifest& manifest;

  std::string file(const std::string& name) const {
    manifest.add_artifact(name);
    return (out / name).string();
  }
};

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n') ch = ' ';
  return s;
}

std::string numbered(const char* stem, int k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%05d.hvpf", stem, k);
  return buf;
}

NormSuite make_norms(const RunConfig& cfg, const Grid& g) {
  return NormSuite(std::make_shared<const DiffOps>(g), cfg.solver.p, cfg.solver.q);
}

void write_iterations(const Context& c, const std::string& name,
                      const std::vector<IterationRecord>& log, double T_requested) {
  CsvWriter csv(c.file(name), {"T_requested", "attempt", "T", "k", "delta", "ratio", "sup_dev",
                               "min_det", "sup_inv_dev", "margin_h", "margin_a"});
  for (const auto& r : log) {
    csv.row({T_requested, static_cast<long long>(r.attempt), r.T, static_cast<long long>(r.k),
             r.delta, r.ratio, r.sup_dev, r.min_det, r.sup_inv_dev, r.margin_h, r.margin_a});
  }
}

void cmd_run(const Context& c) {
  const RunConfig& cfg = c.cfg;
  const Scenario sc = build_scenario(cfg);
  const Grid g = cfg.make_grid();
  const NormSuite norms = make_norms(cfg, g);
  const StateField u0 = sc.initial(g);
  const PicardResult res = picard_solve(u0, sc.params, sc.forcing, picard_options(cfg), norms);

  for (std::size_t q = 0; q < res.states.size(); q += cfg.output.snapshot_stride) {
    write_state(c.file(numbered("lagrangian", static_cast<int>(q))), res.states[q]);
  }
  const StateField& ut = res.states.back();
  StateField pushed = ut;
  pushed.v = enforce_dirichlet(compose_with_map(ut.v, res.final_map, Direction::inverse));
  pushed.h = compose_with_map(ut.h, res.final_map, Direction::inverse);
  pushed.a = compose_with_map(ut.a, res.final_map, Direction::inverse);
  write_state(c.file("final_eulerian_frame.hvpf"), pushed);

  write_iterations(c, "iterations.csv", res.log, cfg.solver.T);
  CsvWriter traj(c.file("trajectory.csv"), {"t", "min_h", "min_a", "max_a", "margin_h", "margin_a",
                                            "sup_dev", "min_det", "sup_inv_dev"});
  for (std::size_t q = 0; q < res.states.size(); ++q) {
    const auto& a = res.admissibility[q];
    const auto& h = res.health[q];
    traj.row({res.times[q], a.min_h, a.min_a, a.max_a, a.margin_h, a.margin_a, h.sup_dev, h.min_det,
              h.sup_inv_dev});
  }
  Manifest& m = c.manifest;
  m.set("result.omega", res.omega);
  m.set("result.T_final", res.T_final);
  m.set("result.dt", res.dt);
  m.set("result.halvings", res.halvings);
  m.set("result.iterations", res.iterations);
  m.set("result.u1_norm", res.u1_norm);
  m.set("result.max_ratio", res.max_ratio());
  m.set("result.clamp_events", res.clamp_events);
  m.set("result.termination", res.termination);
}

void cmd_eulerian(const Context& c) {
  const RunConfig& cfg = c.cfg;
  const Scenario sc = build_scenario(cfg);
  const Grid g = cfg.make_grid();
  const DiffOps ops(g);
  const EulerianTrajectory tr =
      run_eulerian(sc.initial(g), sc.params, sc.forcing, cfg.solver.T, cfg.solver.dt, ops);
  for (std::size_t q = 0; q < tr.states.size(); q += cfg.output.snapshot_stride) {
    write_state(c.file(numbered("eulerian", static_cast<int>(q))), tr.states[q]);
  }
  write_state(c.file("eulerian_final.hvpf"), tr.states.back());
  CsvWriter csv(c.file("eulerian.csv"), {"t", "cfl", "min_h", "min_a", "max_a", "margin_h", "margin_a"});
  bool in_V = true;
  for (std::size_t q = 0; q < tr.states.size(); ++q) {
    const auto& a = tr.admissibility[q];
    in_V = in_V && a.in_V;
    csv.row({tr.times[q], tr.cfl[q], a.min_h, a.min_a, a.max_a, a.margin_h, a.margin_a});
  }
  c.manifest.set("result.steps", static_cast<long long>(tr.states.size() - 1));
  c.manifest.set("result.in_V", in_V ? "true" : "false");
}

void cmd_mms(const Context& c) {
  CsvWriter csv(c.file("mms.csv"),
                {"study", "scheme", "n", "dx", "dt", "err", "err_v", "err_h", "err_a", "order"});
  std::vector<MmsConfig> studies{default_mms(MmsKind::spatial, Scheme::trapezoidal),
                                 default_mms(MmsKind::temporal, Scheme::backward_euler),
                                 default_mms(MmsKind::temporal, Scheme::trapezoidal),
                                 default_mms(MmsKind::kernel, Scheme::trapezoidal)};
  studies[0].sizes = c.cfg.studies.mms_sizes;
  studies[0].T = c.cfg.studies.mms_T;
  for (const auto& s : studies) {
    const ConvergenceTable t = mms_study(s);
    const std::string key = "result." + mms_kind_name(s.kind) + "." + scheme_name(s.scheme);
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
      const auto& r = t.rows[k];
      const double order = k == 0 ? std::nan("") : t.orders[k - 1];
      csv.row({mms_kind_name(s.kind), scheme_name(s.scheme), static_cast<long long>(r.n), r.h, r.dt,
               r.err, r.err_v, r.err_h, r.err_a, order});
    }
    c.manifest.set(key + ".fitted_order", t.fitted_order);
    c.manifest.set(key + ".finest_error", t.rows.back().err);
  }
}

void cmd_cross_check(const Context& c) {
  const RunConfig& cfg = c.cfg;
  const Scenario sc = build_scenario(cfg);
  const auto& st = cfg.studies;
  const auto levels = cross_check(sc, st.cross_T, st.cross_sizes, st.cross_dts, picard_options(cfg),
                                  cfg.solver.p, cfg.solver.q, cfg.threads);
  CsvWriter csv(c.file("cross_check.csv"), {"n", "dt", "T", "rel_v", "rel_h", "rel_a", "abs_v",
                                            "omega", "halvings", "iterations", "clamp_events"});
  bool monotone = true;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto& l = levels[k];
    if (k > 0 && !(l.rel_v < levels[k - 1].rel_v)) monotone = false;
    csv.row({static_cast<long long>(l.n), l.dt, l.T, l.rel_v, l.rel_h, l.rel_a, l.abs_v, l.omega,
             static_cast<long long>(l.halvings), static_cast<long long>(l.iterations),
             static_cast<long long>(l.clamp_events)});
  }
  c.manifest.set("result.rel_v_finest", levels.back().rel_v);
  c.manifest.set("result.rel_v_monotone", monotone ? "true" : "false");
}

void cmd_probe_symbol(const Context& c) {
  const RunConfig& cfg = c.cfg;
  const auto samples =
      symbol_probe(cfg.studies.probe_samples, cfg.studies.probe_directions, cfg.seed, cfg.params);
  CsvWriter csv(c.file("symbol.csv"), {"sample", "h", "a", "eps11", "eps12", "eps22", "max_eig"});
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    worst = std::max(worst, s.max_eig);
    csv.row({static_cast<long long>(k), s.h, s.a, s.eps(0, 0), s.eps(0, 1), s.eps(1, 1), s.max_eig});
  }
  c.manifest.set("result.max_eig", worst);
  c.manifest.set("result.all_negative", worst < 0.0 ? "true" : "false");
}

void cmd_spectrum(const Context& c) {
  const RunConfig& cfg = c.cfg;
  const Scenario sc = build_scenario(cfg);
  const int n = cfg.studies.spectrum_n;
  const Grid g(n, n, cfg.grid.lx, cfg.grid.ly);
  const OmegaSelection sel = select_omega(sc.initial(g), sc.params, n);
  CsvWriter spec(c.file("spectrum.csv"), {"re", "im"});
  for (Eigen::Index k = 0; k < sel.report.spectrum.size(); ++k) {
    spec.row({sel.report.spectrum(k).real(), sel.report.spectrum(k).imag()});
  }
  CsvWriter sector(c.file("sector.csv"), {"omega", "min_re", "max_arg", "pass"});
  for (const auto& e : sel.report.entries) {
    sector.row({e.omega, e.min_re, e.max_arg, static_cast<long long>(e.pass)});
  }
  c.manifest.set("result.chosen_omega", sel.omega);
  c.manifest.set("result.angle_limit", sel.report.angle_limit);
}

void cmd_contraction(const Context& c) {
  const RunConfig& cfg = c.cfg;
  const Scenario sc = build_scenario(cfg);
  const Grid g = cfg.make_grid();
  const NormSuite norms = make_norms(cfg, g);
  const StateField u0 = sc.initial(g);
  PicardOptions opts = picard_options(cfg);
  if (std::isnan(opts.omega)) opts.omega = select_omega(u0, sc.params).omega;

  CsvWriter log(c.file("contraction.csv"), {"T_requested", "attempt", "T", "k", "delta", "ratio"});
  CsvWriter sum(c.file("contraction_summary.csv"),
                {"T_requested", "T_final", "iterations", "halvings", "max_ratio", "strictly_decreasing"});
  for (double T : cfg.studies.T_ladder) {
    opts.T = T;
    const PicardResult res = picard_solve(u0, sc.params, sc.forcing, opts, norms);
    for (const auto& r : res.log) {
      log.row({T, static_cast<long long>(r.attempt), r.T, static_cast<long long>(r.k), r.delta, r.ratio});
    }
    bool dec = true;
    for (std::size_t k = 1; k < res.deltas.size(); ++k) dec = dec && res.deltas[k] < res.deltas[k - 1];
    sum.row({T, res.T_final, static_cast<long long>(res.iterations),
             static_cast<long long>(res.halvings), res.max_ratio(), static_cast<long long>(dec)});
  }
  c.manifest.set("result.omega", opts.omega);
}

void cmd_depend(const Context& c) {
  const RunConfig& cfg = c.cfg;
  const Scenario sc = build_scenario(cfg);
  const Grid g = cfg.make_grid();
  const NormSuite norms = make_norms(cfg, g);
  const auto rows = dependence_experiment(sc.initial(g), cfg.studies.depend_sizes, sc.params,
                                          sc.forcing, picard_options(cfg), norms, cfg.threads);
  CsvWriter csv(c.file("depend.csv"), {"s", "diff_e1", "pert_norm", "ratio"});
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : rows) {
    csv.row({r.s, r.diff_e1, r.pert_norm, r.ratio});
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  c.manifest.set("result.ratio_spread", lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
}

const std::map<std::string, std::function<void(const Context&)>>& table() {
  static const std::map<std::string, std::function<void(const Context&)>> t{
      {"run", cmd_run},
      {"eulerian", cmd_eulerian},
      {"mms", cmd_mms},
      {"cross-check", cmd_cross_check},
      {"probe-symbol", cmd_probe_symbol},
      {"spectrum", cmd_spectrum},
      {"contraction", cmd_contraction},
      {"depend", cmd_depend},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, f] : table()) v.push_back(k);
    return v;
  }();
  return names;
}

PicardOptions picard_options(const RunConfig& cfg) {
  PicardOptions o;
  o.T = cfg.solver.T;
  o.dt = cfg.solver.dt;
  o.tol = cfg.solver.tol;
  o.kmax = cfg.solver.kmax;
  o.max_halvings = cfg.solver.max_halvings;
  o.det_floor = cfg.solver.det_floor;
  o.omega = cfg.solver.omega;
  return o;
}

int dispatch(const std::string& subcommand, const RunConfig& cfg) {
  const auto it = table().find(subcommand);
  if (it == table().end()) {
    spdlog::error("unknown subcommand '{}'", subcommand);
    return 1;
  }
  Manifest manifest;
  manifest.set("subcommand", subcommand);
  manifest.set("scenario", cfg.scenario);
  manifest.set("seed", std::to_string(cfg.seed));
  manifest.set("config_hash", hex64(fnv1a64(canonical_config(cfg))));
  manifest.set("format.snapshot", "HVPF v" + std::to_string(kSnapshotVersion));

  const fs::path out(cfg.output.dir);
  int status = 0;
  try {
    fs::create_directories(out);
    it->second(Context{cfg, out, manifest});
    manifest.set("status", "ok");
  } catch (const MonitorAbort& e) {
    spdlog::error("{}: monitor abort: {}", subcommand, e.what());
    manifest.set("status", "monitor-abort");
    manifest.set("error", one_line(e.what()));
    status = 2;
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", subcommand, e.what());
    manifest.set("status", "error");
    manifest.set("error", one_line(e.what()));
    status = 1;
  }
  manifest.set("exit_code", status);
  try {
    if (fs::exists(out)) manifest.write((out / "manifest.txt").string());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    if (status == 0) status = 1;
  }
  return status;
}

}  // namespace hvp
