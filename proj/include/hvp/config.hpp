#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hvp/fields.hpp"
#include "hvp/linear_solver.hpp"

namespace hvp {

struct GridSpec {
  int nx = 32;
  int ny = 32;
  double lx = 1.0;
  double ly = 1.0;
};

struct InitialSpec {
  double U0 = 0.01;  ///< vortex amplitude
  double h_mean = 1.0;
  double h_amp = 0.2;
  double a_mean = 0.55;
  double a_amp = 0.02;
};

struct ForcingSpec {
  Eigen::Vector2d wind{0.1, 0.05};
  double ocean_gyre = 0.02;  ///< peak speed of the solid-body ocean gyre
  Eigen::Vector2d grad_H{1e-3, 0.0};
  std::string growth = "tanh";  ///< zero | constant | tanh
  double growth_g0 = 1e-5;
};

struct SolverSpec {
  Scheme scheme = Scheme::backward_euler;
  double dt = 2e-3;
  double T = 0.1;
  double tol = 1e-8;
  int kmax = 40;
  double p = 8.0;
  double q = 8.0;
  /// NaN: choose omega with the sector test.
  double omega = std::numeric_limits<double>::quiet_NaN();
  int max_halvings = 6;
  double det_floor = 0.25;
};

struct OutputSpec {
  std::string dir = "out";
  int snapshot_stride = 10;
};

/// Parameters of the verification subcommands.
struct StudySpec {
  std::vector<int> mms_sizes{16, 32, 64};
  double mms_T = 0.1;
  std::vector<int> cross_sizes{16, 32, 64};
  std::vector<double> cross_dts{4e-3, 2e-3, 1e-3};
  double cross_T = 0.1;
  std::vector<double> T_ladder{0.2, 0.1, 0.05};
  std::vector<double> depend_sizes{1e-2, 5e-3, 2.5e-3};
  int probe_samples = 10000;
  int probe_directions = 64;
  int spectrum_n = 8;
};

struct RunConfig {
  std::string scenario = "vortex";  ///< vortex | rest | adversarial
  GridSpec grid;
  RheologyParams params;
  ForcingSpec forcing;
  InitialSpec initial;
  SolverSpec solver;
  OutputSpec output;
  StudySpec studies;
  std::uint64_t seed = 42;
  int threads = 1;

  RunConfig();
  Grid make_grid() const { return Grid(grid.nx, grid.ny, grid.lx, grid.ly); }
};

/// Throws ConfigError listing every violation (unknown or missing keys,
/// wrong types, constraint violations).
RunConfig parse_config(const std::string& path);
RunConfig parse_config_string(const std::string& text, const std::string& source = "<string>");

/// Constraint checks shared by the parser and command-line overrides.
void validate_config(const RunConfig& cfg);

/// Canonical key=value rendering (sorted keys, fixed precision) used for
/// the manifest hash.
std::string canonical_config(const RunConfig& cfg);

std::string scheme_name(Scheme s);

}  // namespace hvp
