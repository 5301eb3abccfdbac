#pragma once

#include <vector>

#include "mg1/model.hpp"
#include "mg1/types.hpp"

// Brute-force finite-state machinery used to check the matrix-analytic
// results: a dense truncated chain and the quantities derived from it.
namespace mg1::oracle {

/// P restricted to levels 0..L. Mass a row would send above L is put on
/// level L in the phase it would have landed in.
struct FiniteChain {
  long level_cap = 0;
  int m0 = 0;
  int m1 = 0;
  Matrix p;

  Eigen::Index offset(long level) const { return level == 0 ? 0 : m0 + (level - 1) * static_cast<Eigen::Index>(m1); }
  int dim(long level) const { return level == 0 ? m0 : m1; }
  Eigen::Index size() const { return p.rows(); }
};

FiniteChain build_finite(const MG1Model& model, long level_cap);

/// Throws NotIrreducible or SingularMatrix.
RowVector solve_stationary(const FiniteChain& chain);

/// Block π(level) of a finite-chain vector.
RowVector level_block(const FiniteChain& chain, const RowVector& pi, long level);

struct Anchor {
  long level = 0;
  int phase = 0;
};

/// H = N - (N e) π, N = (I - Q)^{-1}, Q = P with the anchor column removed.
Matrix deviation_H(const FiniteChain& chain, const RowVector& pi, Anchor anchor = {});
/// Rows of H for the states of `level` only.
Matrix deviation_H_rows(const FiniteChain& chain, const RowVector& pi, long level, Anchor anchor = {});

/// max |(I - P)H - (I - eπ)|.
double h_identity_residual(const FiniteChain& chain, const RowVector& pi, const Matrix& h);

/// (I - P₊)^{-1} on levels 1..L.
Matrix taboo_F_plus(const FiniteChain& chain);
/// Block F₊(row_level; col_level), both >= 1.
Matrix f_plus_block(const FiniteChain& chain, long row_level, long col_level);
/// E[T₀] from every state of levels 1..L.
Vector hitting_times(const FiniteChain& chain);

/// u(m) = (I - G^m)(I - A - m̄_A g)^{-1} e + m/(-σ) e, m >= 1.
Vector u_closed_form(const MG1Model& model, const Matrix& g, const RowVector& g_stat, long m);

struct LemmaOptions {
  Anchor anchor;
  double tolerance = 1e-6;       // pass threshold on the residual
  double bias_tolerance = 1e-8;  // largest admissible oracle mass on level L
};

struct LemmaReport {
  long n = 0;
  long k = 0;
  long level_cap = 0;
  RowVector lhs;  // π⁽ᴺ⁾(k) - π(k) from the oracle
  RowVector rhs;  // the difference formula
  double residual = 0.0;
  double oracle_bias = 0.0;
  bool pass = false;
};

/// Checks the level-wise difference formula for LI truncation at N on a
/// finite-support model. Throws NotFiniteSupport or TruncationBiasTooLarge.
std::vector<LemmaReport> verify_difference_formula(const MG1Model& model, long n, const std::vector<long>& ks,
                                                   long level_cap, const LemmaOptions& options = {});
LemmaReport verify_difference_formula(const MG1Model& model, long n, long k, long level_cap,
                                      const LemmaOptions& options = {});

struct UkReport {
  long m = 0;
  long level_cap = 0;
  Vector closed;
  Vector oracle;
  double abs_error = 0.0;
  double rel_error = 0.0;
};

std::vector<UkReport> verify_uk(const MG1Model& model, const std::vector<long>& ms, long level_cap);

}  // namespace mg1::oracle
