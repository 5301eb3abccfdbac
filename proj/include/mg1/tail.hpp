#pragma once

#include <string>
#include <variant>

#include "mg1/types.hpp"

namespace mg1 {

/// Discrete Pareto law: F̄(k) = (γ / (k + γ))^α on k >= 0.
struct Pareto {
  double alpha;
  double gamma;
};

/// Heavy-tailed Weibull law: F̄(k) = exp(-λ k^α), 0 < α < 1.
struct Weibull {
  double lambda;
  double alpha;
};

/// Geometric law: F̄(k) = ρ^(k+1).
struct Geometric {
  double rho;
};

using TailFamily = std::variant<Pareto, Weibull, Geometric>;

/// Throws InvalidParameter when the family parameters are out of range.
void check_family(const TailFamily& family);

std::string family_name(const TailFamily& family);

/// F̄(k); F̄(k) = 1 for k <= -1.
double survival(const TailFamily& family, long k);

/// p(k) = F̄(k-1) - F̄(k), evaluated without cancellation.
double point_mass(const TailFamily& family, long k);

/// Σ_{ℓ>k} F̄(ℓ) for k >= -1. Throws SeriesNotConvergent when the sum
/// diverges or the remainder bound cannot go below `eps` times the partial
/// sum within `cap` terms.
double summed_survival(const TailFamily& family, long k, double eps = 1e-13,
                       long cap = kDefaultTolerances.series_cap);

/// Smallest m >= -1 with scale * F̄(m) < eps.
long survival_cutoff(const TailFamily& family, double scale, double eps,
                     long cap = kDefaultTolerances.series_cap);

/// Rank-one tail allocation: block(k) = row_scale * p_F(k) * col_profile.
struct ParametricTail {
  TailFamily family;
  Vector row_scale;
  RowVector col_profile;

  Matrix shape() const { return row_scale * col_profile; }
};

void check_tail(const ParametricTail& tail, Eigen::Index rows, Eigen::Index cols);

}  // namespace mg1
