#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mg1/tail.hpp"
#include "mg1/types.hpp"

namespace mg1 {

/// Block structure of an M/G/1-type transition matrix.
///
/// Explicit blocks A(-1..K_A) and B(0..K_B) are stored verbatim; beyond the
/// explicit support an optional rank-one parametric tail supplies
/// A(k) = c p_F(k) r for k > K_A (and likewise for B). The object is
/// immutable after construction and all queries are const.
class MG1Model {
 public:
  /// `a_blocks[j]` is A(j - 1); `b_blocks[j]` is B(j).
  MG1Model(int m0, int m1, std::vector<Matrix> a_blocks, Matrix b_down, std::vector<Matrix> b_blocks,
           std::optional<ParametricTail> a_tail = std::nullopt,
           std::optional<ParametricTail> b_tail = std::nullopt);

  int m0() const { return m0_; }
  int m1() const { return m1_; }

  /// Explicit support cutoffs K_A >= -1 and K_B >= 0.
  long a_support() const { return static_cast<long>(a_.size()) - 2; }
  long b_support() const { return static_cast<long>(b_.size()) - 1; }

  const std::optional<ParametricTail>& a_tail() const { return a_tail_; }
  const std::optional<ParametricTail>& b_tail() const { return b_tail_; }
  bool finite_support() const { return !a_tail_ && !b_tail_; }

  /// A(k), k >= -1 (M1 x M1).
  Matrix block_A(long k) const;
  /// B(k), k >= -1: B(-1) is M1 x M0, B(0) is M0 x M0, B(k >= 1) is M0 x M1.
  Matrix block_B(long k) const;

  /// Ā(k) = Σ_{ℓ>k} A(ℓ), k >= -2.
  Matrix tail_A(long k) const;
  /// A̿(k) = Σ_{ℓ>k} Ā(ℓ), k >= -3.
  Matrix double_tail_A(long k) const;
  /// B̄(k) = Σ_{ℓ>k} B(ℓ), k >= 0.
  Matrix tail_B(long k) const;
  /// B̿(k) = Σ_{ℓ>k} B̄(ℓ), k >= -1.
  Matrix double_tail_B(long k) const;

  /// Smallest M >= K_A such that every row of Ā(M) is below eps.
  long a_series_cutoff(double eps, long cap = kDefaultTolerances.series_cap) const;
  /// Smallest M >= K_B such that every row of B̄(M) is below eps.
  long b_series_cutoff(double eps, long cap = kDefaultTolerances.series_cap) const;

  /// A = Σ_{k>=-1} A(k).
  Matrix total_A() const { return a_.front() + tail_A(-1); }

  /// (row_level, col_level) block of the transition matrix P.
  Matrix transition_block(long row_level, long col_level) const;

  /// Dimension of level `level` (M0 for level 0, M1 otherwise).
  int level_dim(long level) const { return level == 0 ? m0_ : m1_; }

  bool operator==(const MG1Model& other) const;

 private:
  double a_tail_scale_max() const;
  double b_tail_scale_max() const;

  int m0_;
  int m1_;
  std::vector<Matrix> a_;  // A(-1..K_A)
  Matrix b_down_;
  std::vector<Matrix> b_;  // B(0..K_B)
  std::optional<ParametricTail> a_tail_;
  std::optional<ParametricTail> b_tail_;

  // Suffix sums of the explicit blocks only.
  std::vector<Matrix> a_sfx_;   // index k + 2: Σ_{k<ℓ<=K_A} A(ℓ), k = -2..K_A
  std::vector<Matrix> a_sfx2_;  // index k + 3: Σ_{ℓ>k} a_sfx(ℓ), k = -3..K_A
  std::vector<Matrix> b_sfx_;   // index k: Σ_{k<ℓ<=K_B} B(ℓ), k = 0..K_B
  std::vector<Matrix> b_sfx2_;  // index k + 1: Σ_{ℓ>k} b_sfx(ℓ), k = -1..K_B
};

struct Violation {
  std::string name;
  double magnitude;
};

/// Diagnostic summary of the standing assumptions on a model.
struct ValidationReport {
  bool irreducible_P = false;
  bool irreducible_A = false;
  double sigma = 0.0;
  Vector m_bar_A;
  Vector m_bar_B;
  Vector m_bar_A_plus;
  RowVector varpi;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(const std::string& name) const;
};

/// Never throws for a positive drift; defects are listed in `violations`.
ValidationReport validate(const MG1Model& model, const Tolerances& tol = kDefaultTolerances);

/// Stationary row vector of an irreducible stochastic matrix by a dense direct solve.
RowVector stationary_vector(const Matrix& stochastic);

/// Strong connectivity of the directed graph whose edges are positive entries.
bool strongly_connected(const Matrix& adjacency);

}  // namespace mg1
