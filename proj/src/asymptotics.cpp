#include "mg1/asymptotics.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>

#include "mg1/errors.hpp"
#include "mg1/truncation.hpp"

namespace mg1 {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kDivergenceLimit = 1e6;
constexpr double kCollapseFactor = 1e-3;

double ratio_or_zero(double num, double den) {
  if (num == 0.0) return 0.0;
  return num / den;
}

const Pareto* as_pareto(const std::optional<ParametricTail>& tail) {
  return tail ? std::get_if<Pareto>(&tail->family) : nullptr;
}

// lim_N Σ_{ℓ>N} F̄_t(ℓ) / F̄_F(N) per unit row scale, for Pareto tail t and Pareto reference F.
double pareto_limit(const Pareto& t, const Pareto& f) {
  const double exponent = t.alpha - 1.0;
  if (std::abs(f.alpha - exponent) <= 1e-12 * std::max(1.0, exponent)) {
    return std::pow(t.gamma, t.alpha) / (exponent * std::pow(f.gamma, f.alpha));
  }
  if (f.alpha > exponent) {
    throw Error(ErrorCode::Divergent, "reference tail is lighter than the integrated model tail");
  }
  return 0.0;
}

}  // namespace

std::string distribution_name(const TailDistribution& f) {
  return std::visit(overloaded{
                        [](const Empirical&) { return std::string("empirical"); },
                        [](const Integrated& i) { return "integrated " + family_name(i.base); },
                        [](const auto& fam) { return family_name(TailFamily(fam)); },
                    },
                    f.law);
}

double tail_value(const TailDistribution& f, long k) {
  if (k <= -1) return 1.0;
  return std::visit(overloaded{
                        [k](const Empirical& e) {
                          if (k >= static_cast<long>(e.survival.size())) {
                            throw Error(ErrorCode::InvalidParameter, "empirical table too short");
                          }
                          return e.survival[k];
                        },
                        [k](const Integrated& i) {
                          return summed_survival(i.base, k) / summed_survival(i.base, -1);
                        },
                        [k](const auto& fam) { return survival(TailFamily(fam), k); },
                    },
                    f.law);
}

double mass_value(const TailDistribution& f, long k) {
  if (k < 0) return 0.0;
  return std::visit(overloaded{
                        [&](const Empirical&) { return tail_value(f, k - 1) - tail_value(f, k); },
                        [k](const Integrated& i) {
                          return survival(i.base, k) / summed_survival(i.base, -1);
                        },
                        [k](const auto& fam) { return point_mass(TailFamily(fam), k); },
                    },
                    f.law);
}

LongTailProbe is_long_tailed_numeric(const TailDistribution& f, long n_shift, const std::vector<long>& k_probe) {
  if (!std::is_sorted(k_probe.begin(), k_probe.end())) {
    throw Error(ErrorCode::InvalidParameter, "probe grid must be increasing");
  }
  LongTailProbe out;
  for (long k : k_probe) {
    out.k.push_back(k);
    out.ratio.push_back(tail_value(f, k + n_shift) / tail_value(f, k));
  }
  out.long_tailed = !out.ratio.empty() && std::abs(out.ratio.back() - 1.0) < 1e-2;
  return out;
}

std::vector<double> subexponential_ratio(const TailDistribution& f, long k_max, kernels::Backend backend) {
  if (k_max < 0 || k_max > 100000) {
    throw Error(ErrorCode::InvalidParameter, "k_max must lie in [0, 1e5]");
  }
  std::vector<double> mass(k_max + 1);
  std::vector<double> surv(k_max + 1);
  for (long k = 0; k <= k_max; ++k) {
    mass[k] = mass_value(f, k);
    surv[k] = tail_value(f, k);
    if (!(surv[k] > 0.0)) {
      throw Error(ErrorCode::InvalidDistribution, "survival function vanishes at k = " + std::to_string(k));
    }
  }
  return backend == kernels::Backend::Serial ? kernels::self_convolution_ratio_serial(mass, surv)
                                             : kernels::self_convolution_ratio_omp(mass, surv);
}

CEstimate estimate_c_vectors(const MG1Model& model, const TailDistribution& f, const std::vector<long>& n_grid) {
  if (n_grid.empty()) throw Error(ErrorCode::InvalidParameter, "estimation grid is empty");
  CEstimate out;
  const Vector e1 = Vector::Ones(model.m1());
  for (long n : n_grid) {
    const double fbar = tail_value(f, n);
    const Vector a = model.double_tail_A(n) * e1;
    const Vector b = model.double_tail_B(n) * e1;
    if (fbar == 0.0) {
      if (a.isZero(0.0) && b.isZero(0.0)) continue;
      throw Error(ErrorCode::Divergent, "reference survival underflows before the model tail");
    }
    CRatioRow row{n, a / fbar, b / fbar};
    const double biggest = std::max(row.ratio_a.maxCoeff(), row.ratio_b.maxCoeff());
    if (!(biggest <= kDivergenceLimit)) {
      throw Error(ErrorCode::Divergent, "A/B double tails over F-bar exceed 1e6 at N = " + std::to_string(n));
    }
    out.table.push_back(std::move(row));
  }
  if (out.table.empty()) {
    out.c_a = Vector::Zero(model.m1());
    out.c_b = Vector::Zero(model.m0());
    return out;
  }

  const CRatioRow& last = out.table.back();
  out.c_a = last.ratio_a;
  out.c_b = last.ratio_b;
  if (out.table.size() >= 2) {
    const CRatioRow& prev = out.table[out.table.size() - 2];
    auto rel = [](const Vector& now, const Vector& before) {
      double worst = 0.0;
      for (Eigen::Index i = 0; i < now.size(); ++i) {
        const double scale = std::max(std::abs(now(i)), 1e-300);
        if (now(i) != before(i)) worst = std::max(worst, std::abs(now(i) - before(i)) / scale);
      }
      return worst;
    };
    out.residual = std::max(rel(last.ratio_a, prev.ratio_a), rel(last.ratio_b, prev.ratio_b));
  }
  const double first = std::max(out.table.front().ratio_a.maxCoeff(), out.table.front().ratio_b.maxCoeff());
  const double final_max = std::max(out.c_a.maxCoeff(), out.c_b.maxCoeff());
  out.reference_mismatch = first > 0.0 && final_max < kCollapseFactor * first;

  // Matched Pareto families have a closed-form limit.
  const auto* fp = std::get_if<Pareto>(&f.law);
  const Pareto* ta = as_pareto(model.a_tail());
  const Pareto* tb = as_pareto(model.b_tail());
  const bool a_ok = !model.a_tail() || ta;
  const bool b_ok = !model.b_tail() || tb;
  if (fp && a_ok && b_ok) {
    out.analytic = true;
    out.c_a = ta ? Vector(model.a_tail()->row_scale * pareto_limit(*ta, *fp)) : Vector::Zero(model.m1());
    out.c_b = tb ? Vector(model.b_tail()->row_scale * pareto_limit(*tb, *fp)) : Vector::Zero(model.m0());
    const bool vanished = (ta && out.c_a.isZero(0.0)) || (tb && out.c_b.isZero(0.0));
    out.reference_mismatch = out.reference_mismatch || vanished;
  }
  return out;
}

double NLSDistribution::d_i_bar(const MG1Model& model, long k) const {
  const Vector e1 = Vector::Ones(model.m1());
  return (pi0 * model.double_tail_B(k) * e1 + pi_bar0 * model.double_tail_A(k) * e1).value() / mean_increment;
}

NLSDistribution nls_distribution(const MG1Model& model, const StationarySolution& pi, long horizon, double eps_mass) {
  if (horizon < 0) throw Error(ErrorCode::InvalidParameter, "horizon must be nonnegative");
  const double total = pi.pi_blocks.at(0).sum() + pi.pi_bar0.sum();
  if (!(std::abs(total - 1.0) < eps_mass)) {
    throw Error(ErrorCode::HorizonTooShort, "stationary solution does not carry unit mass");
  }
  const ValidationReport drift = validate(model);
  NLSDistribution out;
  out.pi0 = pi.pi_blocks[0];
  out.pi_bar0 = pi.pi_bar0;
  out.mean_increment = out.pi0.dot(drift.m_bar_B) + out.pi_bar0.dot(drift.m_bar_A_plus);
  const Vector e0 = Vector::Ones(model.m0());
  const Vector e1 = Vector::Ones(model.m1());
  double d = 0.0;
  double di = 0.0;
  for (long n = 0; n <= horizon; ++n) {
    const double b_mass = n == 0 ? (out.pi0 * model.block_B(0) * e0).value() : (out.pi0 * model.block_B(n) * e1).value();
    Matrix a = model.block_A(n);
    if (n == 0) a += model.block_A(-1);
    d += b_mass + (out.pi_bar0 * a * e1).value();
    di += (out.pi0 * model.tail_B(n) * e1 + out.pi_bar0 * model.tail_A(n) * e1).value() / out.mean_increment;
    out.d.push_back(d);
    out.d_i.push_back(di);
  }
  return out;
}

LimitConstants limit_constants(const MG1Model& model, const CEstimate& c, const StationarySolution& pi) {
  if (c.c_a.isZero(0.0) && c.c_b.isZero(0.0)) {
    throw Error(ErrorCode::DegenerateLimit, "c_A and c_B are both zero");
  }
  const ValidationReport drift = validate(model);
  if (!(drift.sigma < 0.0)) throw Error(ErrorCode::DriftNonNegative, "limit constants need sigma < 0");
  LimitConstants out;
  out.c_a = c.c_a;
  out.c_b = c.c_b;
  out.sigma = drift.sigma;
  const RowVector& pi0 = pi.pi_blocks.at(0);
  out.numerator = pi0.dot(c.c_b) + pi.pi_bar0.dot(c.c_a);
  out.denominator = pi0.dot(drift.m_bar_B) + pi.pi_bar0.dot(drift.m_bar_A_plus);
  out.theta = out.numerator / (-out.sigma);
  out.d_i_ratio = out.numerator / out.denominator;
  out.theta_di = out.denominator / (-out.sigma);
  if (!(out.theta > 0.0)) throw Error(ErrorCode::DegenerateLimit, "theta is not positive");
  return out;
}

const SweepRow& ConvergenceReport::at(long n, long k) const {
  for (const auto& r : rows) {
    if (r.n == n && r.k == k) return r;
  }
  throw Error(ErrorCode::InvalidParameter, "no sweep row for (N, k)");
}

ConvergenceReport convergence_sweep(const MG1Model& model, const TailDistribution& f, std::vector<long> n_grid,
                                    long k_max, long n_ref, const SweepOptions& options) {
  if (n_grid.empty() || k_max < 0) throw Error(ErrorCode::InvalidParameter, "empty grid or negative k_max");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw Error(ErrorCode::InvalidParameter, "grid must be strictly increasing positive integers");
    }
  }
  const long n_max = n_grid.back();
  if (n_ref != 0 && n_ref < 16 * n_max) {
    throw Error(ErrorCode::InvalidParameter, "n_ref must be 0 or at least 16 times the largest N");
  }

  ConvergenceReport report;
  report.grid = n_grid;
  report.k_max = k_max;
  report.n_ref = n_ref;
  report.c = estimate_c_vectors(model, f, options.c_grid);

  const long ref_horizon = std::max(n_max, k_max);
  const StationarySolution ref =
      n_ref == 0 ? ramaswami_pi(model, ref_horizon, options.solve)
                 : ramaswami_pi(li_truncate(model, n_ref).model, ref_horizon, options.solve);
  const bool degenerate = report.c.c_a.isZero(0.0) && report.c.c_b.isZero(0.0);
  if (!degenerate) report.constants = limit_constants(model, report.c, ref);
  report.reference_bias = n_ref == 0 ? 0.0 : tail_value(f, n_ref) / tail_value(f, n_max);
  const NLSDistribution nls = nls_distribution(model, ref, 0);

  const long count = static_cast<long>(n_grid.size());
  std::vector<StationarySolution> solved(count);
  std::exception_ptr failure;
  SolveOptions inner = options.solve;
  inner.backend = kernels::Backend::Serial;
  const int workers = options.workers > 0 ? options.workers : kernels::worker_count();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long i = 0; i < count; ++i) {
    try {
      solved[i] = pi_truncated(model, n_grid[i], k_max, inner);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (long i = 0; i < count; ++i) {
    const long n = n_grid[i];
    const double fbar = tail_value(f, n);
    const double dibar = nls.mean_increment > 0.0 ? nls.d_i_bar(model, n) : 0.0;
    const double pitail = ref.tail_mass(n);
    for (long k = 0; k <= k_max; ++k) {
      const RowVector diff = solved[i].pi_blocks[k] - ref.pi_blocks[k];
      const double level_mass = ref.pi_blocks[k].sum();
      SweepRow row{};
      row.n = n;
      row.k = k;
      row.err_signed = diff.sum();
      row.err_l1 = diff.cwiseAbs().sum();
      row.ratio_F = ratio_or_zero(row.err_signed, fbar);
      row.ratio_DI = ratio_or_zero(row.err_signed, dibar);
      row.ratio_pitail = ratio_or_zero(row.err_signed, pitail);
      row.rel_tv_ratio = ratio_or_zero(row.err_l1, level_mass * fbar);
      row.target_pik = level_mass;
      if (report.constants) {
        row.target_theta_pik = report.constants->theta * level_mass;
        row.target_thetaDI_pik = report.constants->theta_di * level_mass;
      }
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace mg1
