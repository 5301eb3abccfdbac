#include <doctest.h>

#include <cmath>

#include "mg1/asymptotics.hpp"
#include "mg1/errors.hpp"
#include "mg1/generators.hpp"
#include "support.hpp"

using namespace mg1;

namespace {

// F̄*²(k)/F̄(k) by the definition P(X1 + X2 > k) = 1 - Σ_{j<=k} p(j) F(k-j).
// Loses digits once F̄(k) is small, so callers stay where F̄(k) > 1e-6.
double brute_convolution_ratio(const TailDistribution& f, long k) {
  double below = 0.0;
  for (long j = 0; j <= k; ++j) below += mass_value(f, j) * (1.0 - tail_value(f, k - j));
  return (1.0 - below) / tail_value(f, k);
}

}  // namespace

TEST_CASE("tail values and masses") {
  CHECK(tail_value(Pareto{3.0, 1.0}, 1) == doctest::Approx(0.125));
  CHECK(tail_value(Weibull{1.0, 0.5}, 0) == 1.0);
  CHECK(tail_value(Geometric{0.5}, 3) == doctest::Approx(0.0625));
  CHECK(tail_value(Geometric{0.5}, -1) == 1.0);
  const TailDistribution emp = Empirical{{0.5, 0.25, 0.0}};
  CHECK(mass_value(emp, 0) == 0.5);
  CHECK(mass_value(emp, 2) == 0.25);
  CHECK_THROWS_AS(tail_value(emp, 3), Error);
  // integrated Pareto(3,1): F̄_I(k) = Σ_{n>=k+2} n^-3 / ζ(3)
  const TailDistribution integ = Integrated{Pareto{3.0, 1.0}};
  CHECK(tail_value(integ, 4) ==
        doctest::Approx(support::zeta_tail(3.0, 6.0) / support::zeta_tail(3.0, 1.0)).epsilon(1e-11));
  CHECK(distribution_name(integ) == "integrated pareto");
}

TEST_CASE("long-tail probes") {
  const auto p = is_long_tailed_numeric(Pareto{3.0, 1.0}, 1, {10, 100, 1000});
  CHECK(p.ratio.back() == doctest::Approx(std::pow(1001.0 / 1002.0, 3)).epsilon(1e-14));
  CHECK(p.ratio.back() == doctest::Approx(0.99701).epsilon(1e-5));
  CHECK(p.long_tailed);
  const auto g = is_long_tailed_numeric(Geometric{0.5}, 1, {10, 100, 1000});
  for (double r : g.ratio) CHECK(r == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(g.long_tailed);
  const auto w = is_long_tailed_numeric(Weibull{1.0, 0.5}, 1, {10000});
  CHECK(w.ratio.back() == doctest::Approx(std::exp(-(std::sqrt(10001.0) - 100.0))).epsilon(1e-12));
  CHECK(w.ratio.back() == doctest::Approx(0.99501).epsilon(1e-5));
  CHECK(w.long_tailed);
  CHECK_THROWS_AS(is_long_tailed_numeric(Geometric{0.5}, 1, {10, 5}), Error);
}

TEST_CASE("self-convolution ratio against the defining sum") {
  const TailDistribution families[] = {Pareto{3.0, 1.0}, Weibull{1.0, 0.5}, Geometric{0.5}};
  for (const auto& f : families) {
    const auto table = subexponential_ratio(f, 300);
    for (long k : {0L, 1L, 17L, 150L, 300L}) {
      if (tail_value(f, k) < 1e-6) continue;
      CHECK(table[k] == doctest::Approx(brute_convolution_ratio(f, k)).epsilon(1e-8));
    }
  }
}

TEST_CASE("pareto is subexponential, geometric is not") {
  const auto p = subexponential_ratio(Pareto{3.0, 1.0}, 1000);
  CHECK(p[1000] >= 1.9);
  CHECK(p[1000] <= 2.1);
  // geometric(ρ): the ratio is 1 + (1 - ρ)(k + 1), unbounded
  const auto g = subexponential_ratio(Geometric{0.5}, 200);
  for (long k : {0L, 10L, 100L, 200L}) CHECK(g[k] == doctest::Approx(1.0 + 0.5 * (k + 1)).epsilon(1e-10));
  const auto s = subexponential_ratio(Pareto{3.0, 1.0}, 1000, kernels::Backend::Serial);
  for (long k = 0; k <= 1000; k += 50) CHECK(s[k] == doctest::Approx(p[k]).epsilon(1e-13));
}

TEST_CASE("degenerate distribution is rejected") {
  const TailDistribution atom = Empirical{{0.0, 0.0, 0.0}};
  try {
    subexponential_ratio(atom, 2);
    FAIL("expected InvalidDistribution");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidDistribution);
  }
}

TEST_CASE("c vectors for PARETO-1") {
  const auto model = preset("PARETO-1");
  const auto c = estimate_c_vectors(model, Pareto{2.0, 1.0}, {1024, 2048, 4096, 8192, 16384, 32768, 65536});
  CHECK(c.analytic);
  CHECK_FALSE(c.reference_mismatch);
  CHECK(c.c_a(0) == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(c.c_b(0) == 0.0);
  // numeric ratios approach the same limit at rate 1/N
  CHECK(c.table.back().ratio_a(0) == doctest::Approx(0.15).epsilon(1e-4));
  CHECK(c.residual < 1e-4);

  try {
    estimate_c_vectors(model, Pareto{3.0, 1.0}, {1024, 2048, 4096});
    FAIL("expected Divergent");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Divergent);
  }
  const auto heavy = estimate_c_vectors(model, Pareto{1.0, 1.0}, {1024, 4096, 65536});
  CHECK(heavy.reference_mismatch);
}

TEST_CASE("c vectors against an integrated reference for a Weibull tail") {
  const auto model = make_scalar(0.7, {}, ParametricTail{Weibull{1.0, 0.5}, Vector::Constant(1, 0.3), RowVector::Ones(1)});
  const TailDistribution f = Integrated{Weibull{1.0, 0.5}};
  const auto c = estimate_c_vectors(model, f, {64, 128, 256});
  CHECK_FALSE(c.analytic);
  // A̿(N) = 0.3 Σ_{ℓ>N} F̄(ℓ) = 0.3 F̄_I(N) Σ_{ℓ>=0} F̄(ℓ) exactly
  double mean = 0.0;
  for (long l = 3000000; l >= 0; --l) mean += std::exp(-std::sqrt(static_cast<double>(l)));
  CHECK(c.c_a(0) == doctest::Approx(0.3 * mean).epsilon(1e-9));
  CHECK(c.residual < 1e-9);
}

TEST_CASE("finite support gives vanishing constants") {
  const auto model = preset("SCALAR-1");
  const auto c = estimate_c_vectors(model, Pareto{2.0, 1.0}, {1024, 2048});
  CHECK(c.c_a.isZero(0.0));
  CHECK(c.c_b.isZero(0.0));
  const auto pi = ramaswami_pi(model, 50);
  try {
    limit_constants(model, c, pi);
    FAIL("expected DegenerateLimit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateLimit);
  }
}

TEST_CASE("nonnegative-increment distribution for SCALAR-1") {
  const auto model = preset("SCALAR-1");
  const auto pi = ramaswami_pi(model, 200);
  const auto d = nls_distribution(model, pi, 5);
  CHECK(d.mean_increment == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(d.d[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(d.d[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.d_i[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.d_i_bar(model, 0) == doctest::Approx(0.0).epsilon(1e-12));
  auto short_pi = pi;
  short_pi.pi_bar0 *= 0.5;
  CHECK_THROWS_AS(nls_distribution(model, short_pi, 5), Error);
}

TEST_CASE("nonnegative-increment distribution for PARETO-1") {
  const auto model = preset("PARETO-1");
  const auto pi = ramaswami_pi(model, 400);
  const auto d = nls_distribution(model, pi, 300);
  for (size_t k = 1; k < d.d.size(); ++k) {
    CHECK(d.d[k] >= d.d[k - 1]);
    CHECK(d.d_i[k] >= d.d_i[k - 1]);
  }
  CHECK(d.d.back() <= 1.0 + 1e-12);
  for (long k = 0; k <= 300; k += 30) CHECK(std::abs(1.0 - d.d_i[k] - d.d_i_bar(model, k)) < 1e-12);

  // D̄_I(k)/F̄(k) settles at d_i_ratio
  const auto c = estimate_c_vectors(model, Pareto{2.0, 1.0}, {1024, 65536});
  const auto lc = limit_constants(model, c, pi);
  const double r1 = d.d_i_bar(model, 1000) / tail_value(Pareto{2.0, 1.0}, 1000);
  const double r2 = d.d_i_bar(model, 2000) / tail_value(Pareto{2.0, 1.0}, 2000);
  CHECK(std::abs(r2 - r1) / r1 < 0.05);
  CHECK(r2 == doctest::Approx(lc.d_i_ratio).epsilon(0.01));
}

TEST_CASE("limit constants for PARETO-1") {
  const auto model = preset("PARETO-1");
  const auto pi = ramaswami_pi(model, 100);
  const auto c = estimate_c_vectors(model, Pareto{2.0, 1.0}, {1024, 65536});
  const auto lc = limit_constants(model, c, pi);
  const double sigma = -0.7 + 0.3 * support::zeta_tail(3.0, 1.0);
  CHECK(lc.sigma == doctest::Approx(sigma).epsilon(1e-11));
  CHECK(lc.theta == doctest::Approx(pi.pi_bar0(0) * 0.15 / -sigma).epsilon(1e-10));
  CHECK(std::abs(lc.theta - lc.d_i_ratio * lc.denominator / -lc.sigma) < 1e-12);
  CHECK(lc.theta_di * lc.d_i_ratio == doctest::Approx(lc.theta).epsilon(1e-13));
}

TEST_CASE("sweep on a finite-support model has zero ratios") {
  const auto r = convergence_sweep(preset("SCALAR-1"), Pareto{2.0, 1.0}, {4, 8}, 3, 256);
  CHECK(r.rows.size() == 8);
  CHECK_FALSE(r.constants.has_value());
  for (const auto& row : r.rows) {
    CHECK(row.err_signed == 0.0);
    CHECK(row.ratio_F == 0.0);
    CHECK(row.ratio_DI == 0.0);
    CHECK(row.ratio_pitail == 0.0);
    CHECK(row.rel_tv_ratio == 0.0);
  }
}

TEST_CASE("sweep argument checks") {
  const auto model = preset("PARETO-1");
  CHECK_THROWS_AS(convergence_sweep(model, Pareto{2.0, 1.0}, {32, 16}, 3, 4096), Error);
  CHECK_THROWS_AS(convergence_sweep(model, Pareto{2.0, 1.0}, {32, 64}, 3, 512), Error);
  CHECK_THROWS_AS(convergence_sweep(model, Pareto{3.0, 1.0}, {32, 64}, 3, 4096), Error);
}

TEST_CASE("sweep on PARETO-1 approaches the limit constants") {
  SweepOptions opts;
  const auto r = convergence_sweep(preset("PARETO-1"), Pareto{2.0, 1.0}, {32, 128}, 2, 4096, opts);
  REQUIRE(r.constants.has_value());
  CHECK(r.reference_bias == doctest::Approx(std::pow(129.0 / 4097.0, 2)).epsilon(1e-12));
  for (long k = 0; k <= 2; ++k) {
    const auto& lo = r.at(32, k);
    const auto& hi = r.at(128, k);
    CHECK(hi.err_signed > 0.0);
    CHECK(std::abs(hi.ratio_F - hi.target_theta_pik) < std::abs(lo.ratio_F - lo.target_theta_pik));
    CHECK(hi.ratio_F == doctest::Approx(hi.target_theta_pik).epsilon(0.25));
  }
}
