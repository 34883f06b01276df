#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "jgreedy/greedy.hpp"
#include "jgreedy/jacobi.hpp"
#include "jgreedy/quadrature.hpp"
#include "jgreedy/slope_fit.hpp"

namespace jgreedy {

struct CriticalExponents {
  double p_crit = 0.0;  // 4(gamma+1)/(2 gamma+3)
  double q_crit = 0.0;  // 4(gamma+1)/(2 gamma+1)
  Interval schauder;    // open interval (p_crit, q_crit)

  bool in_schauder_range(double p) const { return p > schauder.lo && p < schauder.hi; }
};

/// Requires min(alpha, beta) > -1/2; throws ConfigError otherwise.
CriticalExponents critical_exponents(const JacobiParams& params);

/// omega = max over (a in {alpha, beta}) of (2a+3)/2 - 2(a+1)/p; the growth exponent of
/// ||sum_{n in A_N} n^{1/2} P_n||_p.
double omega_exponent(const JacobiParams& params, double p);

/// {lo, 2 lo, 4 lo, ...} up to hi inclusive.
std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, std::size_t ratio = 2);

struct ExperimentConfig {
  JacobiParams params{0.0, 0.0};
  double p = 2.0;
  NormalizationMode mode = NormalizationMode::orthonormal();
  std::vector<std::size_t> grid;  // n_grid or N_grid, depending on the experiment
  MeshConfig mesh;
  std::uint64_t seed = 0;
  std::size_t samples = 64;
  double fit_tolerance = 0.05;  // residual tolerance for the trimming rule

  void validate() const;
};

std::vector<std::size_t> default_n_grid();  // 64 .. 4096
std::vector<std::size_t> default_N_grid();  // 8 .. 512

enum class NormRegime { Bounded, Critical, Power };
std::string to_string(NormRegime r);

/// Classifies p against q(alpha, beta); exact equality (within 1e-12) is the critical case.
NormRegime classify_norm_regime(const JacobiParams& params, double p);

struct NormRegimeResult {
  NormRegime regime = NormRegime::Bounded;
  double expected_slope = 0.0;  // 0 for bounded/critical, (2g+1)/2 - 2(g+1)/p for power
  std::vector<double> sizes;
  std::vector<double> norms;
  SlopeFit fit;
  LinearFit critical_fit;  // ||x_n||^p against log n (critical regime only)
};

/// ||x_n||_{L_p(mu)} over cfg.grid for the basis in cfg.mode.
NormRegimeResult norm_regimes_experiment(const ExperimentConfig& cfg);

struct BlockSumResult {
  double expected_slope = 0.0;  // omega
  std::vector<double> sizes;
  std::vector<double> norms;
  SlopeFit fit;
};

/// ||sum_{n in A_N} x_n||_p over N in cfg.grid. Requires p inside the Schauder range.
BlockSumResult block_sum_experiment(const ExperimentConfig& cfg);

struct AverageBlockResult {
  std::vector<double> sizes;
  std::vector<std::size_t> samples_used;
  // orthonormal family {p_n : n in A_N}
  std::vector<double> square_function;
  std::vector<double> rademacher_mean;
  std::vector<double> rademacher_stderr;
  // sqrt-scaled family {n^{1/2} P_n : n in A_N}
  std::vector<double> sqrt_square_function;
  std::vector<double> sqrt_rademacher_mean;
  std::vector<double> sqrt_rademacher_stderr;

  SlopeFit square_fit;
  SlopeFit rademacher_fit;
  SlopeFit sqrt_square_fit;
  SlopeFit sqrt_rademacher_fit;
  double ratio_min = 0.0;  // min over N of rademacher_mean / square_function
  double ratio_max = 0.0;
};

/// Square-function and random-sign norms over the block A_N. Requires 1 <= p < q(alpha, beta).
/// The sample count doubles (up to 16x) while the bootstrap error exceeds 2% of the mean.
AverageBlockResult average_block_experiment(const ExperimentConfig& cfg);

/// |sum_{n in A_N} cos(n theta + phi)| against |sin(N theta) cos((2N-1) theta + phi)| / sin theta,
/// phi = phi(theta) from the Darboux formula. Returns the max absolute deviation.
double geometric_sum_identity_check(const JacobiParams& params, std::size_t N,
                                    const std::vector<double>& thetas);

/// Random (N <= max_N, theta) trials with theta in [1e-3, pi - 1e-3].
double geometric_sum_fuzz(const JacobiParams& params, std::size_t trials, std::size_t max_N,
                          std::uint64_t seed);

/// Largest zero of P_n^{(alpha,beta)}, found by bracketing in theta and bisection. Returns
/// 1 - z_n (computed as 2 sin^2(theta_n / 2)).
double one_minus_largest_root(const JacobiParams& params, std::size_t n);

struct NearOneRow {
  double d = 0.0;
  std::size_t n = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

struct NearOneResult {
  std::vector<NearOneRow> rows;
  struct Envelope {
    double d = 0.0;
    double min_ratio = 0.0;  // over all n and the window grid
    double max_ratio = 0.0;
    bool bounded = false;    // min > 0 and max / min <= envelope_limit
  };
  std::vector<Envelope> envelopes;  // one per d, in sweep order
  double selected_d = 0.0;          // largest bounded d, 0 if none
  std::vector<double> root_sizes;
  std::vector<double> one_minus_roots;
  SlopeFit root_fit;                // expected slope -2
};

NearOneResult near_one_experiment(const JacobiParams& params, const std::vector<std::size_t>& n_grid,
                                  const std::vector<double>& d_sweep, std::size_t grid_points = 33,
                                  double envelope_limit = 5.0);

struct DarbouxCheckResult {
  std::vector<std::size_t> sizes;
  std::vector<double> max_scaled_error;  // max |n^{1/2} P_n - main| n sin / k over the grid
  std::vector<double> max_abs_error;
  double growth = 0.0;                   // last / first scaled error
};

/// Darboux error envelope on an equispaced theta grid over [theta_lo, theta_hi].
DarbouxCheckResult darboux_check(const JacobiParams& params, const std::vector<std::size_t>& n_grid,
                                 double theta_lo, double theta_hi, std::size_t points = 200);

struct WitnessReport {
  double omega = 0.0;
  BlockSumResult block;
  AverageBlockResult average;
  double gap = 0.0;           // block slope - sqrt-scaled Rademacher slope
  double gap_residual = 0.0;  // sum of the two fits' max residuals
  std::vector<double> sign_ratios;  // one seeded sign pattern per N along A_N
  SlopeFit sign_fit;                // expected slope 1/2 - omega
  std::string verdict;
};

/// Compares the constant-coefficient block growth N^omega with the random-sign growth N^{1/2}.
/// Verdict "non-quasi-greedy" when |gap| > 3 * residual, "quasi-greedy" when |gap| < residual,
/// otherwise "inconclusive".
WitnessReport main_theorem_witness(const ExperimentConfig& cfg);

}  // namespace jgreedy
