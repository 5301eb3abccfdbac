#pragma once

#include <vector>

#include "mg1/mam.hpp"
#include "mg1/model.hpp"

namespace mg1 {

struct TruncatedModel {
  long n = 0;
  MG1Model model;
};

/// LI truncation: A⁽ᴺ⁾(k) = A(k) for k < N, A⁽ᴺ⁾(N) = Ā(N-1), zero beyond (same for B).
/// Trailing zero blocks are dropped, so a truncation beyond the support returns the base model.
TruncatedModel li_truncate(const MG1Model& model, long n);

StationarySolution pi_truncated(const MG1Model& model, long n, long horizon, const SolveOptions& options = {});

struct ErrorMetrics {
  std::vector<double> level_errors;       // ‖π⁽ᴺ⁾(k) - π(k)‖₁, k = 0..k_max
  std::vector<double> signed_level_diff;  // (π⁽ᴺ⁾(k) - π(k))e
  std::vector<double> relative_tv;        // ‖π⁽ᴺ⁾(k) - π(k)‖₁ / π(k)e
  double tail_bound = 0.0;  // 1 - mass of each side beyond the common horizon
  double tv_total = 0.0;    // Σ over the common horizon + tail_bound
};

ErrorMetrics error_metrics(const StationarySolution& pi_ref, const StationarySolution& pi_n, long k_max = 20);

}  // namespace mg1
