#include "mg1/mam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mg1/errors.hpp"

namespace mg1 {

namespace {

double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

// coeffs[j] = A(j - 1), j = 0..cutoff + 1.
std::vector<Matrix> g_coefficients(const MG1Model& model, long cutoff) {
  std::vector<Matrix> coeffs;
  coeffs.reserve(cutoff + 2);
  for (long k = -1; k <= cutoff; ++k) coeffs.push_back(model.block_A(k));
  return coeffs;
}

RowVector row_normalised_stationary(const Matrix& g) {
  Matrix normalised = g;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    const double s = g.row(i).sum();
    if (s > 0.0) normalised.row(i) /= s;
  }
  return stationary_vector(normalised);
}

double spectral_radius(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

GMatrixResult compute_G(const MG1Model& model, const GOptions& options) {
  const ValidationReport drift = validate(model);
  if (!(drift.sigma < 0.0) && !options.allow_nonnegative_drift) {
    throw Error(ErrorCode::DriftNonNegative, "mean drift sigma = " + std::to_string(drift.sigma) + " >= 0");
  }
  GMatrixResult out;
  out.series_cutoff = model.a_series_cutoff(options.eps_tail);
  const std::vector<Matrix> coeffs = g_coefficients(model, out.series_cutoff);
  const int m1 = model.m1();

  Matrix g = Matrix::Zero(m1, m1);
  out.min_increment = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int it = 1; it <= options.max_iter; ++it) {
    Matrix next = kernels::horner(coeffs, g);
    const Matrix inc = next - g;
    out.min_increment = std::min(out.min_increment, inc.minCoeff());
    g = std::move(next);
    if (options.record_history) out.history.push_back(g);
    out.iterations = it;
    if (inf_norm(inc) < options.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::NotConverged,
                "G iteration did not reach tolerance in " + std::to_string(options.max_iter) + " steps");
  }
  out.residual = inf_norm(g - kernels::horner(coeffs, g));
  out.g_stat = drift.sigma < 0.0 ? stationary_vector(g) : row_normalised_stationary(g);
  out.g_matrix = std::move(g);
  return out;
}

BoundaryResult boundary_matrices(const MG1Model& model, const Matrix& g, double eps_tail) {
  const int m1 = model.m1();
  BoundaryResult out;

  const long ma = std::max(0L, model.a_series_cutoff(eps_tail));
  std::vector<Matrix> a_up;
  a_up.reserve(ma + 1);
  for (long k = 0; k <= ma; ++k) a_up.push_back(model.block_A(k));
  out.phi0 = kernels::horner(a_up, g);
  if (spectral_radius(out.phi0) >= kPhiRadiusLimit) {
    throw Error(ErrorCode::SingularMatrix, "spectral radius of Phi(0) is numerically 1");
  }
  Eigen::FullPivLU<Matrix> lu(Matrix::Identity(m1, m1) - out.phi0);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularMatrix, "I - Phi(0) is singular");
  out.phi0_inv = lu.inverse();

  const long mb = model.b_series_cutoff(eps_tail);
  if (mb >= 1) {
    std::vector<Matrix> b_up;
    b_up.reserve(mb);
    for (long k = 1; k <= mb; ++k) b_up.push_back(model.block_B(k));
    out.v1 = kernels::horner(b_up, g);
  } else {
    out.v1 = Matrix::Zero(model.m0(), m1);
  }
  out.k_matrix = model.block_B(0) + out.v1 * out.phi0_inv * model.block_B(-1);
  out.kappa = stationary_vector(out.k_matrix);
  return out;
}

RSequence r_matrices(const MG1Model& model, const Matrix& g, const BoundaryResult& boundary, long k_max,
                     double eps_tail) {
  if (k_max < 0) throw Error(ErrorCode::InvalidParameter, "k_max must be nonnegative");
  const int m0 = model.m0();
  const int m1 = model.m1();
  RSequence out;
  out.r.assign(k_max + 1, Matrix::Zero(m1, m1));
  out.r0.assign(k_max + 1, Matrix::Zero(m0, m1));

  // W(k) = A(k) + W(k+1) G, summed backwards from the series cutoff.
  const long ma = model.a_series_cutoff(eps_tail);
  Matrix w = Matrix::Zero(m1, m1);
  Matrix w_sum = Matrix::Zero(m1, m1);
  Matrix tmp(m1, m1);
  for (long k = ma; k >= 1; --k) {
    tmp.noalias() = w * g;
    w = tmp + model.block_A(k);
    w_sum += w;
    if (k <= k_max) out.r[k] = w * boundary.phi0_inv;
  }
  out.r_sum = w_sum * boundary.phi0_inv;

  const long mb = model.b_series_cutoff(eps_tail);
  Matrix v = Matrix::Zero(m0, m1);
  Matrix v_sum = Matrix::Zero(m0, m1);
  Matrix vtmp(m0, m1);
  for (long k = mb; k >= 1; --k) {
    vtmp.noalias() = v * g;
    v = vtmp + model.block_B(k);
    v_sum += v;
    if (k <= k_max) out.r0[k] = v * boundary.phi0_inv;
  }
  out.r0_sum = v_sum * boundary.phi0_inv;
  return out;
}

RowVector pi_zero(const MG1Model& model, const Matrix& g, const BoundaryResult& boundary,
                  const ValidationReport& drift) {
  if (!(drift.sigma < 0.0)) {
    throw Error(ErrorCode::DriftNonNegative, "pi(0) requires negative mean drift");
  }
  const int m1 = model.m1();
  // Σ_{m>=1} B(m)(I - G^m) = B̄(0) - V(1) G
  const Matrix correction = model.tail_B(0) - boundary.v1 * g;
  const Matrix fundamental =
      Matrix::Identity(m1, m1) - model.total_A() + Vector::Ones(m1) * drift.varpi;
  Eigen::FullPivLU<Matrix> lu(fundamental);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularMatrix, "I - A + e varpi is singular");
  const Vector x = drift.m_bar_B + correction * lu.solve(drift.m_bar_A);
  const double scale = 1.0 + boundary.kappa.dot(x) / (-drift.sigma);
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::SingularMatrix, "pi(0) normalisation is not positive");
  }
  return boundary.kappa / scale;
}

double StationarySolution::tail_mass(long k) const {
  if (k < 0 || k > horizon) throw Error(ErrorCode::HorizonTooShort, "level beyond solution horizon");
  double total = pi_blocks[0].sum() + pi_bar0.sum();
  for (long l = 0; l <= k; ++l) total -= pi_blocks[l].sum();
  return std::max(0.0, total);
}

double balance_residual(const MG1Model& model, const std::vector<RowVector>& pi, long levels) {
  const long h = static_cast<long>(pi.size()) - 1;
  levels = std::min(levels, h - 1);
  double worst = 0.0;
  for (long k = 0; k <= levels; ++k) {
    RowVector acc = -pi[k];
    for (long l = 0; l <= std::min(h, k + 1); ++l) acc += pi[l] * model.transition_block(l, k);
    worst = std::max(worst, acc.cwiseAbs().maxCoeff());
  }
  return worst;
}

StationarySolution ramaswami_pi(const MG1Model& model, long horizon, const SolveOptions& options) {
  if (horizon < 0) throw Error(ErrorCode::InvalidParameter, "horizon must be nonnegative");
  const ValidationReport drift = validate(model);
  if (!(drift.sigma < 0.0)) {
    throw Error(ErrorCode::DriftNonNegative, "mean drift sigma = " + std::to_string(drift.sigma) + " >= 0");
  }
  const GMatrixResult gres = compute_G(model, options.g);
  const BoundaryResult boundary = boundary_matrices(model, gres.g_matrix, options.g.eps_tail);
  const RSequence rs = r_matrices(model, gres.g_matrix, boundary, std::max(horizon, 1L), options.g.eps_tail);

  StationarySolution sol;
  sol.horizon = horizon;
  sol.sigma = drift.sigma;
  sol.pi_blocks.reserve(horizon + 1);
  sol.pi_blocks.push_back(pi_zero(model, gres.g_matrix, boundary, drift));
  for (long k = 1; k <= horizon; ++k) {
    RowVector pk = sol.pi_blocks[0] * rs.r0[k];
    pk += kernels::convolve_levels(sol.pi_blocks, rs.r, k, options.backend);
    sol.pi_blocks.push_back(std::move(pk));
  }
  // Summing the balance equations over levels >= 1 gives
  // π̄(0)(I - A) = π(0)B̄(0) - π(1)A(-1); the normalisation π̄(0)e = 1 - π(0)e
  // fixes the component along e.
  const int m1 = model.m1();
  const RowVector pi1 = sol.pi_blocks[0] * rs.r0[1];
  const Matrix fundamental = Matrix::Identity(m1, m1) - model.total_A() + Vector::Ones(m1) * drift.varpi;
  Eigen::FullPivLU<Matrix> lu(fundamental.transpose());
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularMatrix, "I - A + e varpi is singular");
  const RowVector rhs = sol.pi_blocks[0] * model.tail_B(0) - pi1 * model.block_A(-1) +
                        (1.0 - sol.pi_blocks[0].sum()) * drift.varpi;
  sol.pi_bar0 = lu.solve(rhs.transpose()).transpose();

  sol.mass = 0.0;
  for (const auto& p : sol.pi_blocks) sol.mass += p.sum();
  sol.tail_mass_bound = std::max(0.0, 1.0 - sol.mass);
  sol.balance_residual = balance_residual(model, sol.pi_blocks, options.verify_levels);
  return sol;
}

}  // namespace mg1
