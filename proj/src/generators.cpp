#include "mg1/generators.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "mg1/errors.hpp"
#include "mg1/truncation.hpp"

namespace mg1 {

namespace {

constexpr double kMassTol = 1e-12;

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  // 53 random bits mapped to [0, 1); portable across standard libraries.
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

RowVector random_stochastic(Uniform& u, int n) {
  RowVector r(n);
  for (int j = 0; j < n; ++j) r(j) = 0.1 + u();
  return r / r.sum();
}

Matrix random_stochastic_matrix(Uniform& u, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) m.row(i) = random_stochastic(u, cols);
  return m;
}

struct PhasedParts {
  Vector u;                       // per-row up-jump propensity in [0.5, 1]
  Matrix q;                       // positive stochastic phase kernel
  RowVector down_profile;         // rank-one A(-1) direction
  std::vector<RowVector> body;    // per-row body law over 0..K
  Matrix s;                       // B(-1) phase map
  Matrix b0;
  std::vector<Matrix> b_up;
  RowVector col_profile;
};

MG1Model assemble(const PhasedSpec& spec, const PhasedParts& parts, double w) {
  const int m1 = spec.m1;
  const double tau = spec.tail ? spec.tail_fraction : 0.0;
  const Vector up = w * parts.u;
  const Vector stay_down = Vector::Ones(m1) - up;

  std::vector<Matrix> a;
  a.push_back(spec.rank_one_down ? Matrix(stay_down * parts.down_profile)
                                 : Matrix(stay_down.asDiagonal() * parts.q));
  for (long k = 0; k <= spec.body_support; ++k) {
    Matrix blk(m1, m1);
    for (int i = 0; i < m1; ++i) blk.row(i) = up(i) * (1.0 - tau) * parts.body[i](k) * parts.q.row(i);
    a.push_back(std::move(blk));
  }
  std::optional<ParametricTail> tail;
  if (spec.tail) {
    const double fbar = survival(*spec.tail, spec.body_support);
    tail = ParametricTail{*spec.tail, up * tau / fbar, parts.col_profile};
  }
  const Matrix b_down = a.front().rowwise().sum().asDiagonal() * parts.s;
  std::vector<Matrix> b{parts.b0};
  for (const auto& m : parts.b_up) b.push_back(m);
  return MG1Model(spec.m0, m1, std::move(a), b_down, std::move(b), std::move(tail));
}

}  // namespace

MG1Model make_scalar(double down, const std::vector<double>& body, const std::optional<ParametricTail>& tail,
                     const std::vector<double>& boundary) {
  const double tail_mass = tail ? tail->row_scale.sum() * survival(tail->family, static_cast<long>(body.size()) - 1)
                                : 0.0;
  const double level_mass = down + std::accumulate(body.begin(), body.end(), 0.0) + tail_mass;
  if (std::abs(level_mass - 1.0) > kMassTol) {
    throw Error(ErrorCode::MassMismatch, "A(-1) + body + tail sums to " + std::to_string(level_mass));
  }
  const double boundary_mass = std::accumulate(boundary.begin(), boundary.end(), 0.0);
  if (boundary.empty() || std::abs(boundary_mass - 1.0) > kMassTol) {
    throw Error(ErrorCode::MassMismatch, "boundary row sums to " + std::to_string(boundary_mass));
  }
  std::vector<Matrix> a{scalar(down)};
  for (double v : body) a.push_back(scalar(v));
  std::vector<Matrix> b;
  for (double v : boundary) b.push_back(scalar(v));
  return MG1Model(1, 1, std::move(a), scalar(down), std::move(b), tail);
}

MG1Model make_phased(const PhasedSpec& spec) {
  if (spec.m0 < 1 || spec.m1 < 1 || spec.m0 > 50 || spec.m1 > 50) {
    throw Error(ErrorCode::InvalidParameter, "phase counts must lie in 1..50");
  }
  if (!(spec.drift_target < 0.0) || spec.body_support < 0 || !(spec.tail_fraction > 0.0) ||
      !(spec.tail_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "need drift_target < 0, body_support >= 0, 0 < tail_fraction < 1");
  }
  if (spec.tail) check_family(*spec.tail);

  Uniform rng(spec.seed);
  PhasedParts parts;
  parts.u.resize(spec.m1);
  for (int i = 0; i < spec.m1; ++i) parts.u(i) = 0.5 + 0.5 * rng();
  parts.q = random_stochastic_matrix(rng, spec.m1, spec.m1);
  parts.down_profile = random_stochastic(rng, spec.m1);
  for (int i = 0; i < spec.m1; ++i) parts.body.push_back(random_stochastic(rng, static_cast<int>(spec.body_support + 1)));
  parts.s = random_stochastic_matrix(rng, spec.m1, spec.m0);
  parts.col_profile = random_stochastic(rng, spec.m1);
  const Matrix boundary_kernel = random_stochastic_matrix(rng, spec.m0, spec.m0);
  const Matrix boundary_up = random_stochastic_matrix(rng, spec.m0, spec.m1);
  const RowVector boundary_law = random_stochastic(rng, static_cast<int>(spec.body_support + 1));
  parts.b0 = 0.5 * boundary_kernel;
  for (long k = 0; k <= spec.body_support; ++k) parts.b_up.push_back(0.5 * boundary_law(k) * boundary_up);

  auto drift_at = [&](double w) { return validate(assemble(spec, parts, w)).sigma; };
  double lo = 0.0;
  double hi = 1.0;
  if (!(drift_at(hi) >= spec.drift_target)) {
    throw Error(ErrorCode::CannotReachDrift, "drift target below the reachable range");
  }
  double w = 0.5;
  bool hit = false;
  for (int it = 0; it < 200; ++it) {
    w = 0.5 * (lo + hi);
    const double s = drift_at(w);
    if (std::abs(s - spec.drift_target) < 1e-12) {
      hit = true;
      break;
    }
    (s < spec.drift_target ? lo : hi) = w;
    if (hi - lo < 1e-15) break;
  }
  MG1Model model = assemble(spec, parts, w);
  const ValidationReport report = validate(model);
  if (!hit && !(std::abs(report.sigma - spec.drift_target) < 1e-9)) {
    throw Error(ErrorCode::CannotReachDrift, "bisection did not reach the drift target");
  }
  if (!report.ok()) {
    throw Error(ErrorCode::CannotReachDrift, "generated model violates " + report.violations.front().name);
  }
  return model;
}

MG1Model preset(const std::string& name) {
  auto pareto_scalar = [](double alpha) {
    return make_scalar(0.7, {}, ParametricTail{Pareto{alpha, 1.0}, Vector::Constant(1, 0.3), RowVector::Ones(1)});
  };
  if (name == "SCALAR-1") return make_scalar(0.6, {0.2, 0.2});
  if (name == "PARETO-1") return pareto_scalar(3.0);
  if (name == "PARETO-2") return pareto_scalar(2.0);
  if (name == "PARETO-1-CUT12") return li_truncate(pareto_scalar(3.0), 12).model;
  if (name == "POSITIVE-DRIFT") return make_scalar(0.1, {0.0, 0.9});
  if (name == "PHASED-3") return make_phased(PhasedSpec{3, 3, 7, std::nullopt, -0.3});
  if (name == "PHASED-PARETO-3") return make_phased(PhasedSpec{3, 3, 7, TailFamily{Pareto{3.0, 1.0}}, -0.3});
  throw Error(ErrorCode::InvalidParameter, "unknown preset " + name);
}

std::vector<std::string> preset_names() {
  return {"SCALAR-1", "PARETO-1", "PARETO-2", "PARETO-1-CUT12", "POSITIVE-DRIFT", "PHASED-3", "PHASED-PARETO-3"};
}

}  // namespace mg1
