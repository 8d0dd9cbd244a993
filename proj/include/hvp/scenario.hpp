#pragma once

#include <functional>
#include <string>

#include "hvp/config.hpp"
#include "hvp/fields.hpp"

namespace hvp {

/// Initial data, coefficients and forcing of a named test case. The
/// initial state is produced on demand for any grid so refinement studies
/// share the same continuous data.
struct Scenario {
  std::string name;
  RheologyParams params;
  ForcingFields forcing;
  std::function<StateField(const Grid&)> initial;
};

/// vortex: smooth cell v0 = U0 (sin^2(pi x) sin(2 pi y), -sin(2 pi x) sin^2(pi y))
///   with cosine bumps in h and a, wind, ocean gyre, tilt and growth;
/// rest: v = 0, constant h and a, no forcing and no growth;
/// adversarial: the vortex data (meant to be run with a large U0).
Scenario build_scenario(const RunConfig& cfg);

}  // namespace hvp
