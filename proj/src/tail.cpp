#include "mg1/tail.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>
#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mg1/errors.hpp"

namespace mg1 {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct GslErrorsOff {
  GslErrorsOff() { gsl_set_error_handler_off(); }
};

double hurwitz_zeta(double s, double q) {
  static const GslErrorsOff guard;
  gsl_sf_result r;
  if (gsl_sf_hzeta_e(s, q, &r) != GSL_SUCCESS) {
    throw Error(ErrorCode::SeriesNotConvergent, "Hurwitz zeta evaluation failed");
  }
  return r.val;
}

// ∫_x^∞ exp(-λ t^α) dt = λ^{-1/α} Γ(1/α, λ x^α) / α
double weibull_integral_tail(const Weibull& w, double x) {
  static const GslErrorsOff guard;
  gsl_sf_result r;
  const double a = 1.0 / w.alpha;
  if (gsl_sf_gamma_inc_e(a, w.lambda * std::pow(x, w.alpha), &r) != GSL_SUCCESS) {
    throw Error(ErrorCode::SeriesNotConvergent, "incomplete gamma evaluation failed");
  }
  return r.val * std::pow(w.lambda, -a) / w.alpha;
}

}  // namespace

void check_family(const TailFamily& family) {
  std::visit(overloaded{
                 [](const Pareto& p) {
                   if (!(p.alpha > 0.0) || !(p.gamma > 0.0) || !std::isfinite(p.alpha) ||
                       !std::isfinite(p.gamma)) {
                     throw Error(ErrorCode::InvalidParameter, "pareto requires alpha > 0, gamma > 0");
                   }
                 },
                 [](const Weibull& w) {
                   if (!(w.lambda > 0.0) || !(w.alpha > 0.0) || !(w.alpha < 1.0) ||
                       !std::isfinite(w.lambda)) {
                     throw Error(ErrorCode::InvalidParameter,
                                 "weibull requires lambda > 0, 0 < alpha < 1");
                   }
                 },
                 [](const Geometric& g) {
                   if (!(g.rho > 0.0) || !(g.rho < 1.0)) {
                     throw Error(ErrorCode::InvalidParameter, "geometric requires 0 < rho < 1");
                   }
                 },
             },
             family);
}

std::string family_name(const TailFamily& family) {
  return std::visit(overloaded{
                        [](const Pareto&) { return std::string("pareto"); },
                        [](const Weibull&) { return std::string("weibull"); },
                        [](const Geometric&) { return std::string("geometric"); },
                    },
                    family);
}

double survival(const TailFamily& family, long k) {
  if (k <= -1) return 1.0;
  const double x = static_cast<double>(k);
  return std::visit(overloaded{
                        [x](const Pareto& p) { return std::pow(p.gamma / (x + p.gamma), p.alpha); },
                        [x](const Weibull& w) { return std::exp(-w.lambda * std::pow(x, w.alpha)); },
                        [x](const Geometric& g) { return std::pow(g.rho, x + 1.0); },
                    },
                    family);
}

double point_mass(const TailFamily& family, long k) {
  if (k < 0) return 0.0;
  if (k == 0) return 1.0 - survival(family, 0);
  const double x = static_cast<double>(k);
  return std::visit(
      overloaded{
          // F̄(k) [((k+γ)/(k-1+γ))^α - 1]
          [&](const Pareto& p) {
            return survival(family, k) * std::expm1(p.alpha * std::log1p(1.0 / (x - 1.0 + p.gamma)));
          },
          // F̄(k-1) [1 - exp(-λ(k^α - (k-1)^α))]
          [&](const Weibull& w) {
            const double gap = std::pow(x, w.alpha) - std::pow(x - 1.0, w.alpha);
            return -survival(family, k - 1) * std::expm1(-w.lambda * gap);
          },
          [&](const Geometric& g) { return std::pow(g.rho, x) * (1.0 - g.rho); },
      },
      family);
}

double summed_survival(const TailFamily& family, long k, double eps, long cap) {
  if (k < -1) {
    throw Error(ErrorCode::InvalidParameter, "summed_survival requires k >= -1");
  }
  return std::visit(
      overloaded{
          [&](const Pareto& p) {
            if (p.alpha <= 1.0) {
              throw Error(ErrorCode::SeriesNotConvergent, "pareto tail with alpha <= 1 has infinite mean");
            }
            return std::pow(p.gamma, p.alpha) *
                   hurwitz_zeta(p.alpha, static_cast<double>(k) + 1.0 + p.gamma);
          },
          [&](const Weibull& w) {
            double sum = 0.0;
            for (long l = k + 1, n = 0; n < cap; ++l, ++n) {
              sum += survival(family, l);
              if (weibull_integral_tail(w, static_cast<double>(l)) <= eps * sum) return sum;
            }
            throw Error(ErrorCode::SeriesNotConvergent, "weibull tail sum exceeded iteration cap");
          },
          [&](const Geometric& g) { return std::pow(g.rho, static_cast<double>(k) + 2.0) / (1.0 - g.rho); },
      },
      family);
}

long survival_cutoff(const TailFamily& family, double scale, double eps, long cap) {
  if (scale <= 0.0) return -1;
  const double ratio = eps / scale;
  if (ratio >= 1.0) return -1;
  double guess = std::visit(
      overloaded{
          [&](const Pareto& p) { return p.gamma * std::pow(1.0 / ratio, 1.0 / p.alpha) - p.gamma; },
          [&](const Weibull& w) { return std::pow(-std::log(ratio) / w.lambda, 1.0 / w.alpha); },
          [&](const Geometric& g) { return std::log(ratio) / std::log(g.rho) - 1.0; },
      },
      family);
  if (!std::isfinite(guess) || guess > static_cast<double>(cap)) {
    throw Error(ErrorCode::SeriesNotConvergent, "tail mass cannot reach tolerance within iteration cap");
  }
  long m = std::max(-1L, static_cast<long>(std::ceil(guess)));
  while (m > -1 && scale * survival(family, m - 1) < eps) --m;
  while (scale * survival(family, m) >= eps) ++m;
  return m;
}

void check_tail(const ParametricTail& tail, Eigen::Index rows, Eigen::Index cols) {
  check_family(tail.family);
  if (tail.row_scale.size() != rows || tail.col_profile.size() != cols) {
    throw Error(ErrorCode::DimensionMismatch, "parametric tail dimensions do not match blocks");
  }
  if ((tail.row_scale.array() < 0.0).any() || !tail.row_scale.allFinite()) {
    throw Error(ErrorCode::InvalidParameter, "tail row_scale must be finite and nonnegative");
  }
  if ((tail.col_profile.array() < 0.0).any() || std::abs(tail.col_profile.sum() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidParameter, "tail col_profile must be a probability row vector");
  }
}

}  // namespace mg1
