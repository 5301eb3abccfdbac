#include "mg1/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "mg1/errors.hpp"
#include "mg1/mam.hpp"
#include "mg1/truncation.hpp"

namespace mg1::oracle {

namespace {

Matrix unit_columns(Eigen::Index n, Eigen::Index first, Eigen::Index count) {
  Matrix e = Matrix::Zero(n, count);
  for (Eigen::Index j = 0; j < count; ++j) e(first + j, j) = 1.0;
  return e;
}

Eigen::PartialPivLU<Matrix> f_plus_lu(const FiniteChain& chain) {
  const Eigen::Index n = chain.size() - chain.m0;
  if (n <= 0) throw Error(ErrorCode::InvalidParameter, "chain has no levels above 0");
  Matrix system = Matrix::Identity(n, n) - chain.p.bottomRightCorner(n, n);
  return Eigen::PartialPivLU<Matrix>(system);
}

std::vector<Matrix> powers(const Matrix& g, long count) {
  std::vector<Matrix> out;
  out.reserve(count + 1);
  out.push_back(Matrix::Identity(g.rows(), g.cols()));
  for (long j = 1; j <= count; ++j) out.push_back(out.back() * g);
  return out;
}

}  // namespace

FiniteChain build_finite(const MG1Model& model, long level_cap) {
  if (level_cap < 1) throw Error(ErrorCode::InvalidParameter, "level cap must be >= 1");
  FiniteChain chain;
  chain.level_cap = level_cap;
  chain.m0 = model.m0();
  chain.m1 = model.m1();
  const long L = level_cap;
  const Eigen::Index n = chain.offset(L) + chain.m1;
  chain.p = Matrix::Zero(n, n);

  std::vector<Matrix> a(L + 1), a_bar(L + 1), b(L + 1);
  for (long k = -1; k < L; ++k) {
    a[k + 1] = model.block_A(k);
    a_bar[k + 1] = model.tail_A(k);
  }
  for (long k = 1; k < L; ++k) b[k] = model.block_B(k);

  auto put = [&](long r, long c, const Matrix& m) {
    chain.p.block(chain.offset(r), chain.offset(c), m.rows(), m.cols()) = m;
  };
  put(0, 0, model.block_B(0));
  for (long c = 1; c < L; ++c) put(0, c, b[c]);
  put(0, L, model.tail_B(L - 1));
  for (long r = 1; r <= L; ++r) {
    put(r, r - 1, r == 1 ? model.block_B(-1) : a[0]);
    for (long c = r; c < L; ++c) put(r, c, a[c - r + 1]);
    put(r, L, a_bar[L - r]);  // Ā(L - r - 1)
  }
  return chain;
}

RowVector solve_stationary(const FiniteChain& chain) {
  const Eigen::Index n = chain.size();
  if (!strongly_connected(chain.p)) throw Error(ErrorCode::NotIrreducible, "finite chain is reducible");
  Matrix system = (Matrix::Identity(n, n) - chain.p).transpose();
  system.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::PartialPivLU<Matrix> lu(system);
  RowVector pi = lu.solve(rhs).transpose();
  const double residual = (pi * chain.p - pi).cwiseAbs().maxCoeff();
  if (!pi.allFinite() || !(residual < 1e-10)) {
    throw Error(ErrorCode::SingularMatrix, "finite-chain stationary solve is inaccurate");
  }
  return pi;
}

RowVector level_block(const FiniteChain& chain, const RowVector& pi, long level) {
  if (level < 0 || level > chain.level_cap) throw Error(ErrorCode::InvalidParameter, "level outside chain");
  return pi.segment(chain.offset(level), chain.dim(level));
}

namespace {

Eigen::Index anchor_index(const FiniteChain& chain, Anchor anchor) {
  if (anchor.level < 0 || anchor.level > chain.level_cap || anchor.phase < 0 ||
      anchor.phase >= chain.dim(anchor.level)) {
    throw Error(ErrorCode::InvalidParameter, "anchor state outside chain");
  }
  return chain.offset(anchor.level) + anchor.phase;
}

Matrix taboo_system(const FiniteChain& chain, Anchor anchor) {
  const Eigen::Index n = chain.size();
  Matrix q = chain.p;
  q.col(anchor_index(chain, anchor)).setZero();
  return Matrix::Identity(n, n) - q;
}

}  // namespace

Matrix deviation_H(const FiniteChain& chain, const RowVector& pi, Anchor anchor) {
  Eigen::PartialPivLU<Matrix> lu(taboo_system(chain, anchor));
  const Matrix visits = lu.inverse();
  const Vector t = visits.rowwise().sum();
  return visits - t * pi;
}

Matrix deviation_H_rows(const FiniteChain& chain, const RowVector& pi, long level, Anchor anchor) {
  const Eigen::Index n = chain.size();
  Eigen::PartialPivLU<Matrix> lu(taboo_system(chain, anchor).transpose());
  const Matrix visits = lu.solve(unit_columns(n, chain.offset(level), chain.dim(level))).transpose();
  const Vector t = visits.rowwise().sum();
  return visits - t * pi;
}

double h_identity_residual(const FiniteChain& chain, const RowVector& pi, const Matrix& h) {
  const Eigen::Index n = chain.size();
  const Matrix lhs = (Matrix::Identity(n, n) - chain.p) * h;
  const Matrix rhs = Matrix::Identity(n, n) - Vector::Ones(n) * pi;
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

Matrix taboo_F_plus(const FiniteChain& chain) { return f_plus_lu(chain).inverse(); }

Matrix f_plus_block(const FiniteChain& chain, long row_level, long col_level) {
  if (row_level < 1 || col_level < 1 || row_level > chain.level_cap || col_level > chain.level_cap) {
    throw Error(ErrorCode::InvalidParameter, "F+ is indexed by levels 1..L");
  }
  const Eigen::Index n = chain.size() - chain.m0;
  const Matrix cols = f_plus_lu(chain).solve(unit_columns(n, chain.offset(col_level) - chain.m0, chain.m1));
  return cols.middleRows(chain.offset(row_level) - chain.m0, chain.m1);
}

Vector hitting_times(const FiniteChain& chain) {
  const Eigen::Index n = chain.size() - chain.m0;
  return f_plus_lu(chain).solve(Vector::Ones(n));
}

Vector u_closed_form(const MG1Model& model, const Matrix& g, const RowVector& g_stat, long m) {
  if (m < 1) throw Error(ErrorCode::InvalidParameter, "u(m) is defined for m >= 1");
  const ValidationReport drift = validate(model);
  if (!(drift.sigma < 0.0)) throw Error(ErrorCode::DriftNonNegative, "u(m) needs sigma < 0");
  const int m1 = model.m1();
  Eigen::FullPivLU<Matrix> lu(Matrix::Identity(m1, m1) - model.total_A() - drift.m_bar_A * g_stat);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularMatrix, "I - A - m_A g is singular");
  const Vector w = lu.solve(Vector::Ones(m1));
  Matrix gm = Matrix::Identity(m1, m1);
  for (long j = 0; j < m; ++j) gm = gm * g;
  return w - gm * w + Vector::Constant(m1, static_cast<double>(m) / (-drift.sigma));
}

std::vector<LemmaReport> verify_difference_formula(const MG1Model& model, long n, const std::vector<long>& ks,
                                                   long level_cap, const LemmaOptions& options) {
  if (!model.finite_support()) {
    throw Error(ErrorCode::NotFiniteSupport, "difference-formula check needs a finite-support model");
  }
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "N must be >= 1");
  const long L = level_cap;
  for (long k : ks) {
    if (k < 0 || k > n || k >= L) throw Error(ErrorCode::InvalidParameter, "k must lie in 0..N and below L");
  }

  const FiniteChain chain = build_finite(model, L);
  const RowVector pi = solve_stationary(chain);
  const FiniteChain chain_n = build_finite(li_truncate(model, n).model, L);
  const RowVector pi_n = solve_stationary(chain_n);
  const double bias = std::max(level_block(chain, pi, L).sum(), level_block(chain_n, pi_n, L).sum());
  if (bias > options.bias_tolerance) {
    throw Error(ErrorCode::TruncationBiasTooLarge,
                "oracle mass on the last level is " + std::to_string(bias));
  }

  const int m0 = model.m0();
  const int m1 = model.m1();
  const ValidationReport drift = validate(model);
  const GMatrixResult gres = compute_G(model);
  const Matrix& g = gres.g_matrix;
  const BoundaryResult boundary = boundary_matrices(model, g);
  Eigen::FullPivLU<Matrix> zlu(Matrix::Identity(m1, m1) - model.total_A() - drift.m_bar_A * gres.g_stat);
  if (!zlu.isInvertible()) throw Error(ErrorCode::SingularMatrix, "I - A - m_A g is singular");
  const Vector z_e = zlu.solve(Vector::Ones(m1));
  const Matrix h0 = deviation_H_rows(chain, pi, 0, options.anchor);

  const long ka = model.a_support();
  const long kb = model.b_support();
  const std::vector<Matrix> gp = powers(g, std::max({ka, kb, n}));
  const double minus_sigma = -drift.sigma;
  const double b_dd = (level_block(chain_n, pi_n, 0) * model.double_tail_B(n - 1) * Vector::Ones(m1)).value();
  double a_dd = 0.0;
  for (long l = 1; l <= L; ++l) {
    a_dd += (level_block(chain_n, pi_n, l) * model.double_tail_A(n - 1) * Vector::Ones(m1)).value();
  }

  std::vector<LemmaReport> out;
  for (long k : ks) {
    LemmaReport rep;
    rep.n = n;
    rep.k = k;
    rep.level_cap = L;
    rep.oracle_bias = bias;
    const RowVector pik = level_block(chain, pi, k);
    rep.lhs = level_block(chain_n, pi_n, k) - pik;

    const Matrix s = boundary.phi0_inv * model.block_B(-1) * h0.middleCols(chain.offset(k), chain.dim(k)) +
                     g * z_e * pik;
    // Σ_{n'>N} X(n') (G^{N-j} - G^{n'-j}) for the B and A sequences.
    auto series = [&](bool is_a, long j) {
      Matrix acc = Matrix::Zero(is_a ? m1 : m0, m1);
      const long top = is_a ? ka : kb;
      for (long np = n + 1; np <= top; ++np) {
        acc += (is_a ? model.block_A(np) : model.block_B(np)) * (gp[n - j] - gp[np - j]);
      }
      return acc;
    };
    const Matrix cb_s = series(false, 1);
    const Matrix ca_s = series(true, 1);
    const RowVector pi_n0 = level_block(chain_n, pi_n, 0);

    RowVector rhs = (b_dd + a_dd) / minus_sigma * pik;
    rhs += pi_n0 * cb_s * s;
    // Σ_ℓ π⁽ᴺ⁾(ℓ) C G^ℓ, using G^{N+ℓ-j} = G^{N-j} G^ℓ.
    RowVector acc_s = RowVector::Zero(m1);
    RowVector acc_f = RowVector::Zero(m1);
    const Matrix ca_f = k >= 1 ? series(true, k) : Matrix();
    Matrix g_l = g;
    for (long l = 1; l <= L; ++l) {
      const RowVector pl = level_block(chain_n, pi_n, l);
      acc_s += pl * ca_s * g_l;
      if (k >= 1) acc_f += pl * ca_f * g_l;
      g_l = g_l * g;
    }
    rhs += acc_s * s;
    // F₊(m; 0) = O for m >= 1, so the F₊ terms vanish at k = 0.
    if (k >= 1) {
      const Matrix fkk = f_plus_block(chain, k, k);
      rhs += (pi_n0 * series(false, k) + acc_f) * fkk;
    }
    rep.rhs = rhs;
    rep.residual = (rep.lhs - rep.rhs).cwiseAbs().maxCoeff();
    rep.pass = rep.residual < options.tolerance;
    out.push_back(std::move(rep));
  }
  return out;
}

LemmaReport verify_difference_formula(const MG1Model& model, long n, long k, long level_cap,
                                      const LemmaOptions& options) {
  return verify_difference_formula(model, n, std::vector<long>{k}, level_cap, options).front();
}

std::vector<UkReport> verify_uk(const MG1Model& model, const std::vector<long>& ms, long level_cap) {
  const FiniteChain chain = build_finite(model, level_cap);
  const Vector t = hitting_times(chain);
  const GMatrixResult gres = compute_G(model);
  std::vector<UkReport> out;
  for (long m : ms) {
    if (m < 1 || m >= level_cap) throw Error(ErrorCode::InvalidParameter, "m must lie in 1..L-1");
    UkReport rep;
    rep.m = m;
    rep.level_cap = level_cap;
    rep.closed = u_closed_form(model, gres.g_matrix, gres.g_stat, m);
    rep.oracle = t.segment(chain.offset(m) - chain.m0, chain.m1);
    rep.abs_error = (rep.closed - rep.oracle).cwiseAbs().maxCoeff();
    rep.rel_error = ((rep.closed - rep.oracle).array().abs() / rep.closed.array().abs()).maxCoeff();
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace mg1::oracle
