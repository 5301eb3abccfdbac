#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "mg1/kernels.hpp"
#include "mg1/mam.hpp"
#include "mg1/model.hpp"
#include "mg1/tail.hpp"

namespace mg1 {

/// Tabulated survival function F̄(0..n-1); queries past the table are errors.
struct Empirical {
  std::vector<double> survival;
};

/// Integrated tail of a base law: F̄_I(k) = Σ_{ℓ>k} F̄(ℓ) / Σ_{ℓ>=0} F̄(ℓ).
struct Integrated {
  TailFamily base;
};

/// Reference distribution F on the nonnegative integers.
struct TailDistribution {
  std::variant<Pareto, Weibull, Geometric, Empirical, Integrated> law;

  TailDistribution(Pareto p) : law(p) {}
  TailDistribution(Weibull w) : law(w) {}
  TailDistribution(Geometric g) : law(g) {}
  TailDistribution(Empirical e) : law(std::move(e)) {}
  TailDistribution(Integrated i) : law(i) {}
};

std::string distribution_name(const TailDistribution& f);

/// F̄(k) for k >= -1 (F̄(-1) = 1).
double tail_value(const TailDistribution& f, long k);

/// P(X = k) = F̄(k-1) - F̄(k).
double mass_value(const TailDistribution& f, long k);

struct LongTailProbe {
  std::vector<long> k;
  std::vector<double> ratio;  // F̄(k+n)/F̄(k)
  bool long_tailed = false;   // |last ratio - 1| < 1e-2
};

LongTailProbe is_long_tailed_numeric(const TailDistribution& f, long n_shift, const std::vector<long>& k_probe);

/// F̄*²(k)/F̄(k) for k = 0..k_max (k_max <= 1e5). Throws InvalidDistribution if F̄ vanishes.
std::vector<double> subexponential_ratio(const TailDistribution& f, long k_max,
                                         kernels::Backend backend = kernels::Backend::OpenMP);

struct CRatioRow {
  long n;
  Vector ratio_a;  // A̿(N)e / F̄(N)
  Vector ratio_b;  // B̿(N)e / F̄(N)
};

struct CEstimate {
  Vector c_a;
  Vector c_b;
  double residual = 0.0;  // max relative change over the last two grid points
  bool analytic = false;  // closed-form Pareto/Pareto limit used
  bool reference_mismatch = false;  // ratios collapse towards zero: F is too heavy
  std::vector<CRatioRow> table;
};

/// c_A = lim A̿(N)e/F̄(N), c_B = lim B̿(N)e/F̄(N). Throws Divergent when the ratios blow up.
CEstimate estimate_c_vectors(const MG1Model& model, const TailDistribution& f, const std::vector<long>& n_grid);

struct NLSDistribution {
  std::vector<double> d;    // D(k), k = 0..horizon
  std::vector<double> d_i;  // D_I(k)
  double mean_increment = 0.0;  // π(0)m̄_B + π̄(0)m̄_A⁺
  RowVector pi0;
  RowVector pi_bar0;

  /// D̄_I(k) = (π(0)B̿(k)e + π̄(0)A̿(k)e) / mean_increment, evaluated directly.
  double d_i_bar(const MG1Model& model, long k) const;
};

/// Requires |π(0)e + π̄(0)e - 1| < eps_mass, else HorizonTooShort.
NLSDistribution nls_distribution(const MG1Model& model, const StationarySolution& pi, long horizon,
                                 double eps_mass = 1e-6);

struct LimitConstants {
  Vector c_a;
  Vector c_b;
  double numerator = 0.0;    // π(0)c_B + π̄(0)c_A
  double denominator = 0.0;  // π(0)m̄_B + π̄(0)m̄_A⁺
  double sigma = 0.0;
  double theta = 0.0;      // numerator / (-σ)
  double d_i_ratio = 0.0;  // numerator / denominator
  double theta_di = 0.0;   // denominator / (-σ), the limit of the D̄_I-scaled difference over π(k)e
};

/// Throws DegenerateLimit if c_A = c_B = 0.
LimitConstants limit_constants(const MG1Model& model, const CEstimate& c, const StationarySolution& pi);

struct SweepRow {
  long n;
  long k;
  double err_signed;
  double err_l1;
  double ratio_F;
  double ratio_DI;
  double ratio_pitail;
  double rel_tv_ratio;
  double target_theta_pik;
  double target_thetaDI_pik;
  double target_pik;
};

struct ConvergenceReport {
  std::vector<long> grid;
  long k_max = 0;
  long n_ref = 0;  // 0: untruncated reference
  std::vector<SweepRow> rows;  // ordered by (N, k)
  std::optional<LimitConstants> constants;  // empty when the tails vanish
  CEstimate c;
  double reference_bias = 0.0;  // F̄(N_ref)/F̄(max N), 0 for an untruncated reference

  const SweepRow& at(long n, long k) const;
};

struct SweepOptions {
  SolveOptions solve;
  std::vector<long> c_grid{1024, 2048, 4096, 8192, 16384, 32768, 65536};
  int workers = 0;  // 0: kernels::worker_count()
};

/// `n_ref` must be 0 (untruncated reference) or at least 16 max(n_grid).
ConvergenceReport convergence_sweep(const MG1Model& model, const TailDistribution& f, std::vector<long> n_grid,
                                    long k_max, long n_ref, const SweepOptions& options = {});

}  // namespace mg1
