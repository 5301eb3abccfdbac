#include "mg1/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "mg1/errors.hpp"

namespace mg1::kernels {

RowVector convolve_levels_serial(std::span<const RowVector> pi, std::span<const Matrix> r, long k) {
  const long r_max = static_cast<long>(r.size()) - 1;
  const long lo = std::max(1L, k - r_max);
  RowVector acc = RowVector::Zero(r[0].cols());
  for (long l = lo; l < k; ++l) acc.noalias() += pi[l] * r[k - l];
  return acc;
}

RowVector convolve_levels_omp(std::span<const RowVector> pi, std::span<const Matrix> r, long k) {
  const long r_max = static_cast<long>(r.size()) - 1;
  const long lo = std::max(1L, k - r_max);
  const Eigen::Index dim = r[0].cols();
  const long span = std::max(0L, k - lo);
  if (span <= kChunk) return convolve_levels_serial(pi, r, k);
  const long chunks = (span + kChunk - 1) / kChunk;
  std::vector<RowVector> partial(chunks, RowVector::Zero(dim));
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (long c = 0; c < chunks; ++c) {
    const long begin = lo + c * kChunk;
    const long end = std::min(k, begin + kChunk);
    RowVector acc = RowVector::Zero(dim);
    for (long l = begin; l < end; ++l) acc.noalias() += pi[l] * r[k - l];
    partial[c] = acc;
  }
  RowVector total = RowVector::Zero(dim);
  for (const auto& p : partial) total += p;
  return total;
}

RowVector convolve_levels(std::span<const RowVector> pi, std::span<const Matrix> r, long k, Backend backend) {
  return backend == Backend::Serial ? convolve_levels_serial(pi, r, k) : convolve_levels_omp(pi, r, k);
}

namespace {

double convolution_ratio_at(std::span<const double> mass, std::span<const double> surv, long k) {
  double acc = 0.0;
  for (long j = 0; j <= k; ++j) acc += mass[j] * surv[k - j];
  return 1.0 + acc / surv[k];
}

}  // namespace

std::vector<double> self_convolution_ratio_serial(std::span<const double> mass, std::span<const double> surv) {
  const long n = static_cast<long>(std::min(mass.size(), surv.size()));
  std::vector<double> out(n);
  for (long k = 0; k < n; ++k) out[k] = convolution_ratio_at(mass, surv, k);
  return out;
}

std::vector<double> self_convolution_ratio_omp(std::span<const double> mass, std::span<const double> surv) {
  const long n = static_cast<long>(std::min(mass.size(), surv.size()));
  std::vector<double> out(n);
#pragma omp parallel for schedule(dynamic, 64) num_threads(worker_count())
  for (long k = 0; k < n; ++k) out[k] = convolution_ratio_at(mass, surv, k);
  return out;
}

Matrix horner(std::span<const Matrix> coeffs, const Matrix& x) {
  if (coeffs.empty()) throw Error(ErrorCode::InvalidParameter, "horner needs at least one coefficient");
  Matrix acc = coeffs.back();
  Matrix tmp(acc.rows(), acc.cols());
  for (auto j = static_cast<long>(coeffs.size()) - 2; j >= 0; --j) {
    tmp.noalias() = acc * x;
    acc = tmp + coeffs[j];
  }
  return acc;
}

int worker_count() {
  if (const char* env = std::getenv("MG1_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace mg1::kernels
