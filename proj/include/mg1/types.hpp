#pragma once

#include <Eigen/Dense>

namespace mg1 {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Numerical tolerances shared by the solver modules.
struct Tolerances {
  double stoch = 1e-10;      // row-sum identities
  double tail = 1e-12;       // series remainders
  double solve = 1e-12;      // stationary-vector residuals
  long series_cap = 10'000'000;
};

inline constexpr Tolerances kDefaultTolerances{};

/// Spectral radius threshold at which Φ(0) is treated as singular.
inline constexpr double kPhiRadiusLimit = 1.0 - 1e-10;

}  // namespace mg1
