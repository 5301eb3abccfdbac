#include <doctest.h>

#include <cmath>

#include "mg1/errors.hpp"
#include "mg1/generators.hpp"
#include "mg1/model.hpp"
#include "mg1/model_io.hpp"
#include "support.hpp"

using namespace mg1;

namespace {

double zeta3() { return support::zeta_tail(3.0, 1.0); }

MG1Model scalar1() { return preset("SCALAR-1"); }
MG1Model pareto1() { return preset("PARETO-1"); }

Matrix m1x1(double x) { return Matrix::Constant(1, 1, x); }

}  // namespace

TEST_CASE("explicit and parametric blocks") {
  const auto s = scalar1();
  CHECK(s.block_A(-1)(0, 0) == 0.6);
  CHECK(s.block_A(1)(0, 0) == 0.2);
  CHECK(s.block_A(5)(0, 0) == 0.0);
  CHECK(s.block_B(-1)(0, 0) == 0.6);

  const auto p = pareto1();
  CHECK(p.block_A(-1)(0, 0) == doctest::Approx(0.7));
  // F̄(0) = 1, so the Pareto tail puts no mass on A(0).
  CHECK(p.block_A(0)(0, 0) == 0.0);
  CHECK(p.block_A(1)(0, 0) == doctest::Approx(0.2625).epsilon(1e-14));
  CHECK(p.block_A(4)(0, 0) == doctest::Approx(0.3 * (std::pow(0.2, 3) * (std::pow(1.25, 3) - 1))).epsilon(1e-13));
}

TEST_CASE("single tails") {
  const auto s = scalar1();
  CHECK(s.tail_A(0)(0, 0) == doctest::Approx(0.2));
  CHECK(s.tail_A(1)(0, 0) == 0.0);
  CHECK(s.tail_A(-1)(0, 0) == doctest::Approx(0.4));
  CHECK(s.tail_B(0)(0, 0) == doctest::Approx(0.5));

  const auto p = pareto1();
  for (long n : {0L, 1L, 2L, 7L, 63L, 1000L}) {
    CHECK(p.tail_A(n)(0, 0) == doctest::Approx(0.3 / std::pow(n + 1.0, 3)).epsilon(1e-13));
  }
}

TEST_CASE("double tails") {
  const auto s = scalar1();
  CHECK(s.double_tail_A(0)(0, 0) == 0.0);
  CHECK(s.double_tail_A(-1)(0, 0) == doctest::Approx(0.2));
  CHECK(s.double_tail_B(-1)(0, 0) == doctest::Approx(0.5));

  const auto p = pareto1();
  const double expected = 0.3 * (zeta3() - 1.0);
  CHECK(expected == doctest::Approx(0.060617).epsilon(1e-5));
  CHECK(p.double_tail_A(0)(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  // Σ_{ℓ>5} Ā(ℓ) with Ā(ℓ) = 0.3 (ℓ+1)^{-3}
  CHECK(p.double_tail_A(5)(0, 0) == doctest::Approx(0.3 * support::zeta_tail(3.0, 7.0)).epsilon(1e-12));
}

TEST_CASE("tail recurrences hold for every preset") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto m = preset(name);
    for (long k = -1; k < 40; ++k) {
      CHECK((m.tail_A(k - 1) - m.tail_A(k) - m.block_A(k)).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((m.double_tail_A(k - 1) - m.double_tail_A(k) - m.tail_A(k)).cwiseAbs().maxCoeff() < 1e-13);
      if (k >= 1) {
        CHECK((m.tail_B(k - 1) - m.tail_B(k) - m.block_B(k)).cwiseAbs().maxCoeff() < 1e-14);
      }
      if (k >= 0) {
        CHECK((m.double_tail_B(k - 1) - m.double_tail_B(k) - m.tail_B(k)).cwiseAbs().maxCoeff() < 1e-13);
      }
    }
  }
}

TEST_CASE("validation of the scalar presets") {
  const auto r = validate(scalar1());
  CHECK(r.ok());
  CHECK(r.sigma == doctest::Approx(-0.4).epsilon(1e-14));
  CHECK(r.varpi(0) == doctest::Approx(1.0));
  CHECK(r.m_bar_B(0) == doctest::Approx(0.5));
  CHECK(r.irreducible_P);

  const auto rp = validate(pareto1());
  CHECK(rp.ok());
  CHECK(rp.sigma == doctest::Approx(-0.7 + 0.3 * zeta3()).epsilon(1e-11));
  CHECK(rp.sigma == doctest::Approx(-0.33938).epsilon(1e-4));

  const auto pos = validate(preset("POSITIVE-DRIFT"));
  CHECK(pos.sigma == doctest::Approx(0.8));
  CHECK(pos.has("positive drift"));
}

TEST_CASE("validation of phased presets") {
  for (const char* name : {"PHASED-3", "PHASED-PARETO-3"}) {
    const auto m = preset(name);
    const auto r = validate(m);
    CHECK(r.ok());
    CHECK((r.varpi * m.total_A() - r.varpi).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.varpi.sum() == doctest::Approx(1.0));
    CHECK(r.sigma == doctest::Approx(-0.3).epsilon(1e-8));
  }
}

TEST_CASE("defective models are reported, not thrown") {
  // rows of A sum to 0.9
  MG1Model leaky(1, 1, {m1x1(0.5), m1x1(0.2), m1x1(0.2)}, m1x1(0.5), {m1x1(0.5), m1x1(0.5)});
  const auto r = validate(leaky);
  CHECK(r.has("row sums (levels >= 2)"));
  CHECK_FALSE(r.ok());

  MG1Model infinite(1, 1, {m1x1(0.7)}, m1x1(0.7), {m1x1(0.5), m1x1(0.5)},
                    ParametricTail{Pareto{1.0, 1.0}, Vector::Constant(1, 0.3), RowVector::Ones(1)});
  CHECK(validate(infinite).has("infinite mean increment (A)"));

  MG1Model no_down(1, 1, {m1x1(0.0), m1x1(0.5), m1x1(0.5)}, m1x1(0.0), {m1x1(1.0)});
  CHECK(validate(no_down).has("A(-1) zero"));
}

TEST_CASE("construction errors") {
  auto code_of = [](auto&& make) {
    try {
      make();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;  // sentinel: nothing thrown
  };
  CHECK(code_of([] { MG1Model(0, 1, {m1x1(1.0)}, m1x1(1.0), {m1x1(1.0)}); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { MG1Model(1, 2, {m1x1(1.0)}, m1x1(1.0), {m1x1(1.0)}); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] { MG1Model(1, 1, {m1x1(-0.1)}, m1x1(1.0), {m1x1(1.0)}); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { scalar1().block_A(-2); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("transition blocks follow the block-Hessenberg layout") {
  const auto s = scalar1();
  CHECK(s.transition_block(0, 0)(0, 0) == 0.5);
  CHECK(s.transition_block(0, 1)(0, 0) == 0.5);
  CHECK(s.transition_block(1, 0)(0, 0) == 0.6);
  CHECK(s.transition_block(3, 2)(0, 0) == 0.6);
  CHECK(s.transition_block(3, 4)(0, 0) == 0.2);
  CHECK(s.transition_block(3, 1)(0, 0) == 0.0);
  CHECK(s.transition_block(0, 3)(0, 0) == 0.0);
}

TEST_CASE("series cutoffs") {
  const auto p = pareto1();
  const long m = p.a_series_cutoff(1e-12);
  CHECK(p.tail_A(m)(0, 0) < 1e-12);
  CHECK(p.tail_A(m - 1)(0, 0) >= 1e-12);
  CHECK(scalar1().a_series_cutoff(1e-12) == 1);
}

TEST_CASE("json round trip") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto m = preset(name);
    CHECK(parse_model(model_to_json(m)) == m);
  }
  CHECK(model_to_json(preset("PHASED-PARETO-3")) == model_to_json(parse_model(model_to_json(preset("PHASED-PARETO-3")))));
}

TEST_CASE("json parse errors") {
  auto code_of = [](const std::string& text) {
    try {
      parse_model(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::NotConverged;
  };
  CHECK(code_of("{not json") == ErrorCode::ParseError);
  CHECK(code_of(R"({"m0": 1})") == ErrorCode::ParseError);
  CHECK(code_of(R"({"m0": 1, "m1": 1, "a_blocks": [{"k": -1, "matrix": [[0.6]]}], "b_down": [[0.6]],
                   "b_blocks": [{"k": 0, "matrix": [[1.0]]}],
                   "a_tail": {"family": "cauchy", "params": {}, "row_scale": [0.1], "col_profile": [1]}})") ==
        ErrorCode::ParseError);
  const auto ok = parse_model(R"({"m0": 1, "m1": 1,
      "a_blocks": [{"k": -1, "matrix": [[0.6]]}, {"k": 1, "matrix": [[0.4]]}],
      "b_down": [[0.6]], "b_blocks": [{"k": 0, "matrix": [[1.0]]}], "a_tail": null})");
  CHECK(ok.block_A(0)(0, 0) == 0.0);
  CHECK(ok.block_A(1)(0, 0) == 0.4);
  CHECK(ok.finite_support());
}

TEST_CASE("stationary vector and connectivity helpers") {
  Matrix p(2, 2);
  p << 0, 1, 1, 0;
  const RowVector v = stationary_vector(p);
  CHECK(v(0) == doctest::Approx(0.5));
  CHECK(v(1) == doctest::Approx(0.5));
  CHECK(strongly_connected(p));
  Matrix q(2, 2);
  q << 1, 0, 0.5, 0.5;
  CHECK_FALSE(strongly_connected(q));
}
