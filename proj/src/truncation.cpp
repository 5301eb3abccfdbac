#include "mg1/truncation.hpp"

#include <algorithm>
#include <cmath>

#include "mg1/errors.hpp"

namespace mg1 {

namespace {

template <class Blocks>
void drop_trailing_zeros(Blocks& blocks) {
  while (blocks.size() > 1 && (blocks.back().array() == 0.0).all()) blocks.pop_back();
}

}  // namespace

TruncatedModel li_truncate(const MG1Model& model, long n) {
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "truncation level must be >= 1");
  std::vector<Matrix> a;
  a.reserve(n + 2);
  for (long k = -1; k < n; ++k) a.push_back(model.block_A(k));
  a.push_back(model.tail_A(n - 1));
  drop_trailing_zeros(a);

  std::vector<Matrix> b;
  b.reserve(n + 1);
  for (long k = 0; k < n; ++k) b.push_back(model.block_B(k));
  b.push_back(model.tail_B(n - 1));
  drop_trailing_zeros(b);

  return TruncatedModel{n, MG1Model(model.m0(), model.m1(), std::move(a), model.block_B(-1), std::move(b))};
}

StationarySolution pi_truncated(const MG1Model& model, long n, long horizon, const SolveOptions& options) {
  return ramaswami_pi(li_truncate(model, n).model, horizon, options);
}

ErrorMetrics error_metrics(const StationarySolution& pi_ref, const StationarySolution& pi_n, long k_max) {
  if (k_max < 0 || pi_ref.horizon < k_max || pi_n.horizon < k_max) {
    throw Error(ErrorCode::HorizonTooShort, "solutions do not cover levels 0..k_max");
  }
  if (pi_ref.pi_blocks[0].size() != pi_n.pi_blocks[0].size()) {
    throw Error(ErrorCode::DimensionMismatch, "solutions have different boundary dimensions");
  }
  ErrorMetrics out;
  const long h = std::min(pi_ref.horizon, pi_n.horizon);
  double covered_ref = 0.0;
  double covered_n = 0.0;
  for (long k = 0; k <= h; ++k) {
    const RowVector diff = pi_n.pi_blocks[k] - pi_ref.pi_blocks[k];
    const double l1 = diff.cwiseAbs().sum();
    out.tv_total += l1;
    covered_ref += pi_ref.pi_blocks[k].sum();
    covered_n += pi_n.pi_blocks[k].sum();
    if (k <= k_max) {
      out.level_errors.push_back(l1);
      out.signed_level_diff.push_back(diff.sum());
      const double level_mass = pi_ref.pi_blocks[k].sum();
      out.relative_tv.push_back(level_mass > 0.0 ? l1 / level_mass : (l1 == 0.0 ? 0.0 : INFINITY));
    }
  }
  // Bitwise-equal solutions come from the same recursion, so their tails agree too.
  const bool identical = out.tv_total == 0.0 && pi_ref.pi_bar0 == pi_n.pi_bar0;
  out.tail_bound = identical ? 0.0 : std::max(0.0, 1.0 - covered_ref) + std::max(0.0, 1.0 - covered_n);
  out.tv_total += out.tail_bound;
  return out;
}

}  // namespace mg1
