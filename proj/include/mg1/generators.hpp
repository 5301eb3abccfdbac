#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mg1/model.hpp"
#include "mg1/tail.hpp"

namespace mg1 {

/// M0 = M1 = 1 model. `down` is A(-1) = B(-1), `body` lists A(0), A(1), ...,
/// `tail` continues A beyond the body, `boundary` lists B(0), B(1), ...
/// Throws MassMismatch when a row type does not sum to one.
MG1Model make_scalar(double down, const std::vector<double>& body,
                     const std::optional<ParametricTail>& tail = std::nullopt,
                     const std::vector<double>& boundary = {0.5, 0.5});

struct PhasedSpec {
  int m0 = 2;
  int m1 = 2;
  std::uint64_t seed = 1;
  std::optional<TailFamily> tail;  // none: finite support
  double drift_target = -0.3;
  bool rank_one_down = false;
  long body_support = 2;     // explicit up-jump blocks A(0..body_support)
  double tail_fraction = 0.5;  // share of the up-jump mass carried by the tail
};

/// Seeded random phase structure (mt19937_64) with the up-jump weight set by
/// bisection so that σ hits drift_target within 1e-9. Throws CannotReachDrift.
MG1Model make_phased(const PhasedSpec& spec);

/// Named test instances: SCALAR-1, PARETO-1, PARETO-2, PARETO-1-CUT12,
/// POSITIVE-DRIFT, PHASED-3 (m1 = 3, finite support) and PHASED-PARETO-3.
MG1Model preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace mg1
