#pragma once

#include <span>
#include <vector>

#include "mg1/types.hpp"

// Inner loops that dominate run time. Each kernel has a plain serial
// reference and an OpenMP version; the OpenMP versions split the index range
// into fixed-size chunks and combine chunk partials in ascending order, so
// their output does not depend on the thread count.
namespace mg1::kernels {

enum class Backend { Serial, OpenMP };

inline constexpr long kChunk = 128;

/// Σ_{ℓ=lo}^{k-1} π(ℓ) R(k-ℓ), lo = max(1, k - r_max). `r[j]` holds R(j)
/// (r[0] is an unused zero block that fixes the dimension); `pi[ℓ]` holds π(ℓ) for ℓ < k.
RowVector convolve_levels_serial(std::span<const RowVector> pi, std::span<const Matrix> r, long k);
RowVector convolve_levels_omp(std::span<const RowVector> pi, std::span<const Matrix> r, long k);
RowVector convolve_levels(std::span<const RowVector> pi, std::span<const Matrix> r, long k,
                          Backend backend = Backend::OpenMP);

/// F̄*²(k) / F̄(k) for k = 0..k_max from the point masses p(0..k_max) and the
/// survival values F̄(0..k_max): 1 + Σ_{j<=k} p(j) F̄(k-j) / F̄(k).
std::vector<double> self_convolution_ratio_serial(std::span<const double> mass,
                                                  std::span<const double> surv);
std::vector<double> self_convolution_ratio_omp(std::span<const double> mass, std::span<const double> surv);

/// Σ_j coeffs[j] X^j by Horner's rule (highest power first).
Matrix horner(std::span<const Matrix> coeffs, const Matrix& x);

/// Number of worker threads: MG1_WORKERS if set and positive, else the
/// OpenMP default.
int worker_count();

}  // namespace mg1::kernels
