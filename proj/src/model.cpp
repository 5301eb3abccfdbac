#include "mg1/model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "mg1/errors.hpp"

namespace mg1 {

namespace {

constexpr long kIrreducibilityWindow = 64;

void check_block(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorCode::DimensionMismatch,
                what + " has shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!m.allFinite() || (m.array() < 0.0).any()) {
    throw Error(ErrorCode::InvalidParameter, what + " must be finite and nonnegative");
  }
}

bool same_tail(const std::optional<ParametricTail>& a, const std::optional<ParametricTail>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  if (a->family.index() != b->family.index()) return false;
  const bool params_equal = std::visit(
      [&](const auto& fa) {
        using T = std::decay_t<decltype(fa)>;
        const auto& fb = std::get<T>(b->family);
        if constexpr (std::is_same_v<T, Pareto>) return fa.alpha == fb.alpha && fa.gamma == fb.gamma;
        if constexpr (std::is_same_v<T, Weibull>) return fa.lambda == fb.lambda && fa.alpha == fb.alpha;
        if constexpr (std::is_same_v<T, Geometric>) return fa.rho == fb.rho;
      },
      a->family);
  return params_equal && a->row_scale == b->row_scale && a->col_profile == b->col_profile;
}

}  // namespace

MG1Model::MG1Model(int m0, int m1, std::vector<Matrix> a_blocks, Matrix b_down, std::vector<Matrix> b_blocks,
                   std::optional<ParametricTail> a_tail, std::optional<ParametricTail> b_tail)
    : m0_(m0),
      m1_(m1),
      a_(std::move(a_blocks)),
      b_down_(std::move(b_down)),
      b_(std::move(b_blocks)),
      a_tail_(std::move(a_tail)),
      b_tail_(std::move(b_tail)) {
  if (m0_ < 1 || m1_ < 1) {
    throw Error(ErrorCode::InvalidParameter, "phase counts M0 and M1 must be positive");
  }
  if (a_.empty()) throw Error(ErrorCode::DimensionMismatch, "A(-1) is required");
  if (b_.empty()) throw Error(ErrorCode::DimensionMismatch, "B(0) is required");
  for (std::size_t j = 0; j < a_.size(); ++j) {
    check_block(a_[j], m1_, m1_, "A(" + std::to_string(static_cast<long>(j) - 1) + ")");
  }
  check_block(b_down_, m1_, m0_, "B(-1)");
  check_block(b_[0], m0_, m0_, "B(0)");
  for (std::size_t j = 1; j < b_.size(); ++j) {
    check_block(b_[j], m0_, m1_, "B(" + std::to_string(j) + ")");
  }
  if (a_tail_) check_tail(*a_tail_, m1_, m1_);
  if (b_tail_) check_tail(*b_tail_, m0_, m1_);

  const long ka = a_support();
  a_sfx_.assign(ka + 3, Matrix::Zero(m1_, m1_));
  for (long k = ka - 1; k >= -2; --k) a_sfx_[k + 2] = a_sfx_[k + 3] + a_[k + 2];
  a_sfx2_.assign(ka + 4, Matrix::Zero(m1_, m1_));
  for (long k = ka - 1; k >= -3; --k) a_sfx2_[k + 3] = a_sfx2_[k + 4] + a_sfx_[k + 3];

  const long kb = b_support();
  b_sfx_.assign(kb + 1, Matrix::Zero(m0_, m1_));
  for (long k = kb - 1; k >= 0; --k) b_sfx_[k] = b_sfx_[k + 1] + b_[k + 1];
  b_sfx2_.assign(kb + 2, Matrix::Zero(m0_, m1_));
  for (long k = kb - 1; k >= -1; --k) b_sfx2_[k + 1] = b_sfx2_[k + 2] + b_sfx_[k + 1];
}

Matrix MG1Model::block_A(long k) const {
  if (k < -1) throw Error(ErrorCode::InvalidParameter, "A(k) requires k >= -1");
  if (k <= a_support()) return a_[k + 1];
  if (a_tail_) return a_tail_->shape() * point_mass(a_tail_->family, k);
  return Matrix::Zero(m1_, m1_);
}

Matrix MG1Model::block_B(long k) const {
  if (k < -1) throw Error(ErrorCode::InvalidParameter, "B(k) requires k >= -1");
  if (k == -1) return b_down_;
  if (k <= b_support()) return b_[k];
  if (b_tail_) return b_tail_->shape() * point_mass(b_tail_->family, k);
  return Matrix::Zero(m0_, m1_);
}

Matrix MG1Model::tail_A(long k) const {
  if (k < -2) throw Error(ErrorCode::InvalidParameter, "Ā(k) requires k >= -2");
  const long ka = a_support();
  Matrix out = k >= ka ? Matrix::Zero(m1_, m1_) : a_sfx_[k + 2];
  if (a_tail_) out += a_tail_->shape() * survival(a_tail_->family, std::max(k, ka));
  return out;
}

Matrix MG1Model::double_tail_A(long k) const {
  if (k < -3) throw Error(ErrorCode::InvalidParameter, "A̿(k) requires k >= -3");
  const long ka = a_support();
  Matrix out = k >= ka ? Matrix::Zero(m1_, m1_) : a_sfx2_[k + 3];
  if (a_tail_) {
    const double flat = static_cast<double>(std::max(0L, ka - k)) * survival(a_tail_->family, ka);
    out += a_tail_->shape() * (flat + summed_survival(a_tail_->family, std::max(k, ka)));
  }
  return out;
}

Matrix MG1Model::tail_B(long k) const {
  if (k < 0) throw Error(ErrorCode::InvalidParameter, "B̄(k) requires k >= 0");
  const long kb = b_support();
  Matrix out = k >= kb ? Matrix::Zero(m0_, m1_) : b_sfx_[k];
  if (b_tail_) out += b_tail_->shape() * survival(b_tail_->family, std::max(k, kb));
  return out;
}

Matrix MG1Model::double_tail_B(long k) const {
  if (k < -1) throw Error(ErrorCode::InvalidParameter, "B̿(k) requires k >= -1");
  const long kb = b_support();
  Matrix out = k >= kb ? Matrix::Zero(m0_, m1_) : b_sfx2_[k + 1];
  if (b_tail_) {
    const double flat = static_cast<double>(std::max(0L, kb - k)) * survival(b_tail_->family, kb);
    out += b_tail_->shape() * (flat + summed_survival(b_tail_->family, std::max(k, kb)));
  }
  return out;
}

double MG1Model::a_tail_scale_max() const { return a_tail_ ? a_tail_->row_scale.maxCoeff() : 0.0; }
double MG1Model::b_tail_scale_max() const { return b_tail_ ? b_tail_->row_scale.maxCoeff() : 0.0; }

long MG1Model::a_series_cutoff(double eps, long cap) const {
  if (!a_tail_) return a_support();
  return std::max(a_support(), survival_cutoff(a_tail_->family, a_tail_scale_max(), eps, cap));
}

long MG1Model::b_series_cutoff(double eps, long cap) const {
  if (!b_tail_) return b_support();
  return std::max(b_support(), survival_cutoff(b_tail_->family, b_tail_scale_max(), eps, cap));
}

Matrix MG1Model::transition_block(long row_level, long col_level) const {
  if (row_level < 0 || col_level < 0) {
    throw Error(ErrorCode::InvalidParameter, "levels are nonnegative");
  }
  if (row_level == 0) return col_level == 0 ? block_B(0) : block_B(col_level);
  if (col_level == row_level - 1) return row_level == 1 ? block_B(-1) : block_A(-1);
  if (col_level >= row_level) return block_A(col_level - row_level);
  return Matrix::Zero(level_dim(row_level), level_dim(col_level));
}

bool MG1Model::operator==(const MG1Model& other) const {
  return m0_ == other.m0_ && m1_ == other.m1_ && a_ == other.a_ && b_down_ == other.b_down_ &&
         b_ == other.b_ && same_tail(a_tail_, other.a_tail_) && same_tail(b_tail_, other.b_tail_);
}

bool ValidationReport::has(const std::string& name) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.name == name; });
}

RowVector stationary_vector(const Matrix& stochastic) {
  const Eigen::Index n = stochastic.rows();
  if (stochastic.cols() != n || n == 0) {
    throw Error(ErrorCode::DimensionMismatch, "stationary_vector requires a nonempty square matrix");
  }
  Matrix system = (Matrix::Identity(n, n) - stochastic).transpose();
  system.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::SingularMatrix, "stationary vector is not unique");
  }
  return lu.solve(rhs).transpose();
}

bool strongly_connected(const Matrix& adjacency) {
  const Eigen::Index n = adjacency.rows();
  if (n == 0) return false;
  auto reach_all = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::queue<Eigen::Index> todo;
    todo.push(0);
    seen[0] = 1;
    Eigen::Index count = 1;
    while (!todo.empty()) {
      const Eigen::Index u = todo.front();
      todo.pop();
      for (Eigen::Index v = 0; v < n; ++v) {
        const double w = forward ? adjacency(u, v) : adjacency(v, u);
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          ++count;
          todo.push(v);
        }
      }
    }
    return count == n;
  };
  return reach_all(true) && reach_all(false);
}

ValidationReport validate(const MG1Model& model, const Tolerances& tol) {
  ValidationReport report;
  const int m0 = model.m0();
  const int m1 = model.m1();
  const Vector e0 = Vector::Ones(m0);
  const Vector e1 = Vector::Ones(m1);

  const Matrix a_down = model.block_A(-1);
  const Matrix a_up = model.tail_A(-1);
  const double boundary_defect =
      (model.block_B(0) * e0 + model.tail_B(0) * e1 - e0).cwiseAbs().maxCoeff();
  const double level1_defect = (model.block_B(-1) * e0 + a_up * e1 - e1).cwiseAbs().maxCoeff();
  const double level2_defect = (a_down * e1 + a_up * e1 - e1).cwiseAbs().maxCoeff();
  if (boundary_defect > tol.stoch) report.violations.push_back({"row sums (level 0)", boundary_defect});
  if (level1_defect > tol.stoch) report.violations.push_back({"row sums (level 1)", level1_defect});
  if (level2_defect > tol.stoch) report.violations.push_back({"row sums (levels >= 2)", level2_defect});
  if (a_down.maxCoeff() <= 0.0) report.violations.push_back({"A(-1) zero", 0.0});

  const Matrix a_total = model.total_A();
  report.irreducible_A = strongly_connected(a_total);
  if (!report.irreducible_A) report.violations.push_back({"A reducible", 0.0});

  // Levels beyond the window are folded into its top level.
  const long l_irr = std::min(std::max(model.a_support(), model.b_support()) + 2, kIrreducibilityWindow);
  const Eigen::Index states = m0 + l_irr * m1;
  Matrix graph = Matrix::Zero(states, states);
  auto offset = [&](long level) { return level == 0 ? 0 : m0 + (level - 1) * m1; };
  for (long r = 0; r <= l_irr; ++r) {
    for (long c = std::max(0L, r - 1); c < l_irr; ++c) {
      graph.block(offset(r), offset(c), model.level_dim(r), model.level_dim(c)) =
          model.transition_block(r, c);
    }
    graph.block(offset(r), offset(l_irr), model.level_dim(r), m1) =
        r == 0 ? model.tail_B(l_irr - 1) : model.tail_A(l_irr - r - 1);
  }
  report.irreducible_P = strongly_connected(graph);
  if (!report.irreducible_P) report.violations.push_back({"P reducible", 0.0});

  try {
    report.varpi = stationary_vector(a_total);
  } catch (const Error&) {
    report.varpi = RowVector::Constant(m1, 1.0 / m1);
    report.violations.push_back({"A stationary vector not unique", 0.0});
  }

  try {
    report.m_bar_A_plus = model.double_tail_A(-1) * e1;
    report.m_bar_A = report.m_bar_A_plus - a_down * e1;
    report.sigma = report.varpi.dot(report.m_bar_A);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::SeriesNotConvergent) throw;
    report.m_bar_A_plus = Vector::Constant(m1, std::numeric_limits<double>::infinity());
    report.m_bar_A = report.m_bar_A_plus;
    report.sigma = std::numeric_limits<double>::infinity();
    report.violations.push_back({"infinite mean increment (A)", report.sigma});
  }
  try {
    report.m_bar_B = model.double_tail_B(-1) * e1;
  } catch (const Error& err) {
    if (err.code() != ErrorCode::SeriesNotConvergent) throw;
    report.m_bar_B = Vector::Constant(m0, std::numeric_limits<double>::infinity());
    report.violations.push_back({"infinite mean increment (B)", report.m_bar_B(0)});
  }
  if (!(report.sigma < 0.0)) report.violations.push_back({"positive drift", report.sigma});
  return report;
}

}  // namespace mg1
