#include "hvp/picard.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "hvp/errors.hpp"
#include "hvp/sector.hpp"

namespace hvp {
namespace {

/// Internal: ratio streak reached; handled by halving T.
struct Diverging {
  std::vector<double> ratios;
};

std::vector<StateField> to_states(const StackLayout& layout, const std::vector<Eigen::VectorXd>& x) {
  std::vector<StateField> out;
  out.reserve(x.size());
  for (const auto& xi : x) out.push_back(layout.unpack(xi));
  return out;
}

/// Nodes whose image X(t, y) falls outside the domain (sampled there clamped).
int count_outside(const FlowMap& map) {
  const Grid& g = map.grid;
  const double eps = 1e-12 * std::max(g.lx(), g.ly());
  int count = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i) + map.disp.x(i, j), y = g.y(j) + map.disp.y(i, j);
      if (x < g.x0 - eps || x > g.x0 + g.lx() + eps || y < g.y0 - eps || y > g.y0 + g.ly() + eps) {
        ++count;
      }
    }
  return count;
}

PicardResult run_attempt(const StateField& u0, const RheologyParams& params,
                         const ForcingFields& forcing, const PicardOptions& opts,
                         const NormSuite& norms, const FrozenSystem& sys, double T, int attempt,
                         std::vector<IterationRecord>& log) {
  const DiffOps& ops = norms.ops();
  const StackLayout& layout = sys.layout;
  const int n = step_count(T, opts.dt);
  const double dt = T / n;

  PicardResult res;
  res.omega = sys.omega;
  res.T_final = T;
  res.dt = dt;
  res.reference = solve_reference(u0, params, T, dt, sys.omega, norms);
  std::vector<Eigen::VectorXd> ref(n + 1);
  for (int q = 0; q <= n; ++q) ref[q] = layout.pack(res.reference.states[q]);

  const LinearStepper stepper(sys.op.matrix, dt, Scheme::backward_euler);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(layout.size());
  std::vector<Eigen::VectorXd> hat(n + 1, zero), next(n + 1, zero);

  int streak = 0;
  double threshold = 0.0;
  for (int k = 0; k < opts.kmax; ++k) {
    IterationRecord rec;
    rec.attempt = attempt;
    rec.T = T;
    rec.k = k + 1;
    rec.margin_h = rec.margin_a = std::numeric_limits<double>::infinity();

    // Flow map and right-hand side along the current iterate.
    StateField prev = layout.unpack(hat[0] + ref[0]);
    {
      const auto adm = validate_state(prev, params);
      if (!adm.in_V) throw BlowupSignal("initial state outside V", 0.0);
      rec.margin_h = adm.margin_h;
      rec.margin_a = adm.margin_a;
    }
    FlowMap map = FlowMap::identity(u0.grid);
    next[0] = zero;
    for (int q = 0; q < n; ++q) {
      StateField cur = layout.unpack(hat[q + 1] + ref[q + 1]);
      map = advance_flow_map(map, ops, prev.v, cur.v, dt);
      rec.sup_dev = std::max(rec.sup_dev, map.health.sup_dev);
      rec.min_det = std::min(rec.min_det, map.health.min_det);
      rec.sup_inv_dev = std::max(rec.sup_inv_dev, map.health.sup_inv_dev);
      invert(map, opts.det_floor);
      const auto adm = validate_state(cur, params);
      rec.margin_h = std::min(rec.margin_h, adm.margin_h);
      rec.margin_a = std::min(rec.margin_a, adm.margin_a);
      const RhsFields f = assemble_rhs(cur, map, sys, ops, params, forcing, (q + 1) * dt);
      const Eigen::VectorXd fx = layout.pack({u0.grid, f.F1, f.F2, f.F3});
      next[q + 1] = stepper.step(next[q], zero, fx);
      prev = std::move(cur);
    }

    std::vector<Eigen::VectorXd> diff(n + 1);
    for (int q = 0; q <= n; ++q) diff[q] = next[q] - hat[q];
    rec.delta = e1_norm(norms, to_states(layout, diff), dt);
    std::swap(hat, next);

    res.deltas.push_back(rec.delta);
    if (k == 0) {
      res.u1_norm = rec.delta;
      threshold = opts.tol * std::max(1.0, res.u1_norm);
    } else {
      const double prev_delta = res.deltas[res.deltas.size() - 2];
      rec.ratio = prev_delta > 0.0 ? rec.delta / prev_delta : 0.0;
      res.ratios.push_back(rec.ratio);
      streak = rec.ratio >= 1.0 ? streak + 1 : 0;
    }
    log.push_back(rec);
    spdlog::debug("picard attempt {} T={} k={} delta={:.3e} ratio={:.3f}", attempt, T, rec.k,
                  rec.delta, rec.ratio);
    if (rec.delta <= threshold) {
      res.iterations = k + 1;
      res.termination = "converged";
      break;
    }
    if (streak >= opts.divergence_streak) throw Diverging{res.ratios};
    if (k + 1 == opts.kmax) {
      throw NoConvergence("no convergence after " + std::to_string(opts.kmax) +
                          " iterations (last delta " + std::to_string(rec.delta) +
                          ", threshold " + std::to_string(threshold) + ")");
    }
  }

  // Accepted iterate: rebuild states and flow health along it.
  res.times.resize(n + 1);
  res.states.reserve(n + 1);
  FlowMap map = FlowMap::identity(u0.grid);
  for (int q = 0; q <= n; ++q) {
    res.times[q] = q * dt;
    res.states.push_back(layout.unpack(hat[q] + ref[q]));
    if (q > 0) {
      map = advance_flow_map(map, ops, res.states[q - 1].v, res.states[q].v, dt);
      invert(map, opts.det_floor);
      res.clamp_events += count_outside(map);
    }
    res.health.push_back(map.health);
    const auto adm = validate_state(res.states[q], params);
    if (!adm.in_V) throw BlowupSignal("accepted solution leaves V", q * dt);
    res.admissibility.push_back(adm);
  }
  res.final_map = std::move(map);
  return res;
}

}  // namespace

double PicardResult::max_ratio() const {
  double m = 0.0;
  for (double r : ratios) m = std::max(m, r);
  return m;
}

PicardResult picard_solve(const StateField& u0, const RheologyParams& params,
                          const ForcingFields& forcing, const PicardOptions& opts,
                          const NormSuite& norms) {
  params.validate();
  if (!validate_state(u0, params).in_V) throw DomainError("initial data must lie in V");
  const double omega = std::isnan(opts.omega) ? select_omega(u0, params).omega : opts.omega;
  const FrozenSystem sys = build_frozen_system(u0, norms.ops(), params, omega);

  std::vector<IterationRecord> log;
  double T = opts.T;
  for (int attempt = 0;; ++attempt) {
    try {
      PicardResult res = run_attempt(u0, params, forcing, opts, norms, sys, T, attempt, log);
      res.halvings = attempt;
      res.log = std::move(log);
      return res;
    } catch (const InvertibilityLost& e) {
      if (attempt >= opts.max_halvings) throw;
      spdlog::info("flow map check failed at T={} ({}); halving T", T, e.what());
    } catch (const Diverging&) {
      if (attempt >= opts.max_halvings) {
        throw NoConvergence("contraction ratio >= 1 persists after " +
                            std::to_string(opts.max_halvings) + " halvings of T");
      }
      spdlog::info("contraction ratios >= 1 at T={}; halving T", T);
    }
    T *= 0.5;
  }
}

StateField dependence_profile(const Grid& grid) {
  using std::numbers::pi;
  auto xn = [&](double x) { return (x - grid.x0) / grid.lx(); };
  auto yn = [&](double y) { return (y - grid.y0) / grid.ly(); };
  StateField phi = StateField::zero(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const double x = xn(grid.x(i)), y = yn(grid.y(j));
      phi.v.x(i, j) = std::sin(pi * x) * std::sin(pi * y);
      phi.v.y(i, j) = 0.5 * std::sin(2 * pi * x) * std::sin(pi * y);
      phi.h(i, j) = std::cos(pi * x) * std::cos(pi * y);
      phi.a(i, j) = 0.5 * std::cos(pi * x) * std::cos(2 * pi * y);
    }
  phi.v = enforce_dirichlet(phi.v);
  return phi;
}

std::vector<DependenceRow> dependence_experiment(const StateField& u0,
                                                 const std::vector<double>& sizes,
                                                 const RheologyParams& params,
                                                 const ForcingFields& forcing, PicardOptions opts,
                                                 const NormSuite& norms, int threads) {
  if (std::isnan(opts.omega)) opts.omega = select_omega(u0, params).omega;
  const StateField phi = dependence_profile(u0.grid);
  for (double s : sizes) {
    if (!validate_state(u0 + s * phi, params).in_V) {
      throw DomainError("perturbation of size " + std::to_string(s) + " leaves V");
    }
  }

  // Job 0 is the unperturbed run; job k + 1 uses sizes[k].
  const std::size_t jobs = sizes.size() + 1;
  std::vector<PicardResult> results(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  auto work = [&](std::size_t k) {
    try {
      const StateField data = k == 0 ? u0 : u0 + sizes[k - 1] * phi;
      results[k] = picard_solve(data, params, forcing, opts, norms);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const std::size_t width = static_cast<std::size_t>(std::max(1, threads));
  for (std::size_t start = 0; start < jobs; start += width) {
    std::vector<std::thread> pool;
    for (std::size_t k = start; k < std::min(jobs, start + width); ++k) {
      if (width == 1) {
        work(k);
      } else {
        pool.emplace_back(work, k);
      }
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const PicardResult& base = results[0];
  std::vector<DependenceRow> rows;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const PicardResult& r = results[k + 1];
    if (r.states.size() != base.states.size() || r.T_final != base.T_final) {
      throw Error("dependence runs ended on different horizons");
    }
    std::vector<StateField> diff;
    diff.reserve(r.states.size());
    for (std::size_t q = 0; q < r.states.size(); ++q) diff.push_back(r.states[q] - base.states[q]);
    DependenceRow row;
    row.s = sizes[k];
    row.diff_e1 = e1_norm(norms, diff, base.dt);
    row.pert_norm = norms.xgamma(sizes[k] * phi);
    row.ratio = row.pert_norm > 0.0 ? row.diff_e1 / row.pert_norm : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hvp
