#pragma once

#include <vector>

#include "mg1/kernels.hpp"
#include "mg1/model.hpp"
#include "mg1/types.hpp"

namespace mg1 {

struct GOptions {
  double tol = 1e-13;          // stop when ‖G_n - G_{n-1}‖∞ < tol
  int max_iter = 1'000'000;
  double eps_tail = kDefaultTolerances.tail;  // series cut where Ā(m)e < eps_tail
  bool allow_nonnegative_drift = false;
  bool record_history = false;
};

struct GMatrixResult {
  Matrix g_matrix;
  RowVector g_stat;
  int iterations = 0;
  double residual = 0.0;       // ‖G - Σ A(m-1) G^m‖∞
  double min_increment = 0.0;  // most negative entry of G_n - G_{n-1} over all steps
  long series_cutoff = 0;
  std::vector<Matrix> history;  // G_1, G_2, ... when requested
};

/// Natural fixed-point iteration G_n = Σ_{m>=0} A(m-1) G_{n-1}^m from G_0 = O.
GMatrixResult compute_G(const MG1Model& model, const GOptions& options = {});

struct BoundaryResult {
  Matrix phi0;      // Φ(0) = Σ_{m>=0} A(m) G^m
  Matrix phi0_inv;  // (I - Φ(0))^{-1}
  Matrix v1;        // Σ_{m>=1} B(m) G^{m-1}
  Matrix k_matrix;  // K
  RowVector kappa;
};

BoundaryResult boundary_matrices(const MG1Model& model, const Matrix& g,
                                 double eps_tail = kDefaultTolerances.tail);

struct RSequence {
  std::vector<Matrix> r;   // r[k] = R(k), k = 0..k_max (r[0] = O)
  std::vector<Matrix> r0;  // r0[k] = R_0(k)
  Matrix r_sum;            // Σ_{k>=1} R(k)
  Matrix r0_sum;           // Σ_{k>=1} R_0(k)
};

RSequence r_matrices(const MG1Model& model, const Matrix& g, const BoundaryResult& boundary, long k_max,
                     double eps_tail = kDefaultTolerances.tail);

/// π(0) by the normalisation formula for M/G/1-type chains.
RowVector pi_zero(const MG1Model& model, const Matrix& g, const BoundaryResult& boundary,
                  const ValidationReport& drift);

struct StationarySolution {
  std::vector<RowVector> pi_blocks;  // π(0..horizon)
  long horizon = 0;
  double mass = 0.0;             // Σ_{k<=horizon} π(k)e
  double tail_mass_bound = 0.0;  // 1 - mass, clamped at 0
  RowVector pi_bar0;             // Σ_{k>=1} π(k)
  double balance_residual = 0.0; // max |πP - π| over the checked levels
  double sigma = 0.0;

  /// π̄(k)e = Σ_{ℓ>k} π(ℓ)e for k <= horizon.
  double tail_mass(long k) const;
};

struct SolveOptions {
  GOptions g;
  kernels::Backend backend = kernels::Backend::OpenMP;
  long verify_levels = 50;
};

StationarySolution ramaswami_pi(const MG1Model& model, long horizon, const SolveOptions& options = {});

/// max_k ‖Σ_ℓ π(ℓ) P(ℓ, k) - π(k)‖∞ over k = 0..levels (needs levels < horizon).
double balance_residual(const MG1Model& model, const std::vector<RowVector>& pi, long levels);

}  // namespace mg1
