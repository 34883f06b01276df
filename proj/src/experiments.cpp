#include "jgreedy/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "jgreedy/errors.hpp"

namespace jgreedy {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void require_schauder(const JacobiParams& params, double p) {
  const CriticalExponents ce = critical_exponents(params);
  if (!ce.in_schauder_range(p)) {
    throw ConfigError("p = " + std::to_string(p) + " is outside the Schauder range (" +
                      std::to_string(ce.p_crit) + ", " + std::to_string(ce.q_crit) + ")");
  }
}

}  // namespace

CriticalExponents critical_exponents(const JacobiParams& params) {
  if (!params.half_range_ok()) {
    throw ConfigError("critical exponents require min(alpha, beta) > -1/2");
  }
  const double g = params.gamma();
  CriticalExponents ce;
  ce.p_crit = 4.0 * (g + 1.0) / (2.0 * g + 3.0);
  ce.q_crit = 4.0 * (g + 1.0) / (2.0 * g + 1.0);
  ce.schauder = {ce.p_crit, ce.q_crit};
  if (std::abs(1.0 / ce.p_crit + 1.0 / ce.q_crit - 1.0) > 1e-12) {
    throw std::logic_error("critical exponents are not conjugate");
  }
  return ce;
}

double omega_exponent(const JacobiParams& params, double p) {
  require_schauder(params, p);
  auto branch = [p](double a) { return (2.0 * a + 3.0) / 2.0 - 2.0 * (a + 1.0) / p; };
  const double omega = std::max(branch(params.alpha()), branch(params.beta()));
  if ((std::abs(omega - 0.5) < 1e-14) != (p == 2.0) && std::abs(p - 2.0) > 1e-12) {
    throw std::logic_error("omega = 1/2 must hold exactly when p = 2");
  }
  return omega;
}

std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, std::size_t ratio) {
  if (lo == 0 || ratio < 2) throw ConfigError("geometric grid needs lo >= 1 and ratio >= 2");
  std::vector<std::size_t> g;
  for (std::size_t n = lo; n <= hi; n *= ratio) g.push_back(n);
  return g;
}

std::vector<std::size_t> default_n_grid() { return geometric_grid(64, 4096); }
std::vector<std::size_t> default_N_grid() { return geometric_grid(8, 512); }

void ExperimentConfig::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("p must satisfy 1 <= p < infinity");
  if (grid.empty()) throw ConfigError("experiment grid is empty");
  for (std::size_t n : grid) {
    if (n < 4) throw ConfigError("grid sizes must be >= 4");
  }
  if (samples == 0) throw ConfigError("samples must be positive");
  mesh.validate();
}

std::string to_string(NormRegime r) {
  switch (r) {
    case NormRegime::Bounded:
      return "bounded";
    case NormRegime::Critical:
      return "critical-log";
    case NormRegime::Power:
      return "power";
  }
  return "unknown";
}

NormRegime classify_norm_regime(const JacobiParams& params, double p) {
  const double q = critical_exponents(params).q_crit;
  if (std::abs(p - q) <= 1e-12 * q) return NormRegime::Critical;
  return p < q ? NormRegime::Bounded : NormRegime::Power;
}

NormRegimeResult norm_regimes_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  NormRegimeResult res;
  const JacobiParams& params = cfg.params;
  const double g = params.gamma();
  res.regime = classify_norm_regime(params, cfg.p);
  res.expected_slope =
      res.regime == NormRegime::Power ? (2.0 * g + 1.0) / 2.0 - 2.0 * (g + 1.0) / cfg.p : 0.0;

  const OrthonormalLpNorm backend = lp_norm_backend(cfg.mesh);
  for (std::size_t n : cfg.grid) {
    const double onorm = orthonormal_lp_norm(params, n, cfg.p, cfg.mesh);
    const double norm = onorm * basis_scale(params, cfg.mode, n, backend) / orthonormal_const(params, n);
    res.sizes.push_back(static_cast<double>(n));
    res.norms.push_back(norm);
  }
  res.fit = fit_loglog_trimmed(res.sizes, res.norms, cfg.fit_tolerance);
  if (res.regime == NormRegime::Critical) {
    std::vector<double> logs, powers;
    for (std::size_t i = 0; i < res.sizes.size(); ++i) {
      logs.push_back(std::log(res.sizes[i]));
      powers.push_back(std::pow(res.norms[i], cfg.p));
    }
    res.critical_fit = fit_linear(logs, powers);
  }
  return res;
}

BlockSumResult block_sum_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  require_schauder(cfg.params, cfg.p);
  BlockSumResult res;
  res.expected_slope = omega_exponent(cfg.params, cfg.p);
  const BasisPtr basis = Basis::make(cfg.params, cfg.mode, cfg.mesh);
  for (std::size_t N : cfg.grid) {
    std::map<std::size_t, double> coeffs;
    for (std::size_t n : block_indices(N)) coeffs[n] = 1.0;
    res.sizes.push_back(static_cast<double>(N));
    res.norms.push_back(lp_norm(Expansion(basis, std::move(coeffs)), cfg.p, cfg.mesh));
  }
  res.fit = fit_loglog_trimmed(res.sizes, res.norms, cfg.fit_tolerance);
  return res;
}

AverageBlockResult average_block_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const CriticalExponents ce = critical_exponents(cfg.params);
  if (!(cfg.p < ce.q_crit)) {
    throw ConfigError("average-block requires 1 <= p < q(alpha, beta) = " + std::to_string(ce.q_crit));
  }
  AverageBlockResult res;
  const std::size_t max_samples = 16 * cfg.samples;

  auto sign_average = [&](const JacobiFamily& family, std::uint64_t seed) {
    std::size_t samples = cfg.samples;
    RademacherEstimate est = rademacher_average_norm(family, cfg.params, cfg.p, samples, seed, cfg.mesh);
    while (est.std_error > 0.02 * est.mean && samples < max_samples) {
      samples *= 2;
      est = rademacher_average_norm(family, cfg.params, cfg.p, samples, seed, cfg.mesh);
    }
    return est;
  };

  for (std::size_t N : cfg.grid) {
    const auto block = block_indices(N);
    const JacobiFamily ortho = JacobiFamily::make(cfg.params, NormalizationMode::orthonormal(), block);
    const JacobiFamily sqrt_scaled =
        JacobiFamily::make(cfg.params, NormalizationMode::sqrt_scaled(), block);
    const std::uint64_t seed = derive_seed(cfg.seed, N);

    res.sizes.push_back(static_cast<double>(N));
    res.square_function.push_back(square_function_norm(ortho, cfg.params, cfg.p, cfg.mesh));
    res.sqrt_square_function.push_back(square_function_norm(sqrt_scaled, cfg.params, cfg.p, cfg.mesh));

    const RademacherEstimate r1 = sign_average(ortho, seed);
    const RademacherEstimate r2 = sign_average(sqrt_scaled, seed);
    res.rademacher_mean.push_back(r1.mean);
    res.rademacher_stderr.push_back(r1.std_error);
    res.sqrt_rademacher_mean.push_back(r2.mean);
    res.sqrt_rademacher_stderr.push_back(r2.std_error);
    res.samples_used.push_back(std::max(r1.samples, r2.samples));
  }

  res.square_fit = fit_loglog_trimmed(res.sizes, res.square_function, cfg.fit_tolerance);
  res.rademacher_fit = fit_loglog_trimmed(res.sizes, res.rademacher_mean, cfg.fit_tolerance);
  res.sqrt_square_fit = fit_loglog_trimmed(res.sizes, res.sqrt_square_function, cfg.fit_tolerance);
  res.sqrt_rademacher_fit =
      fit_loglog_trimmed(res.sizes, res.sqrt_rademacher_mean, cfg.fit_tolerance);

  res.ratio_min = INFINITY;
  res.ratio_max = -INFINITY;
  for (std::size_t i = 0; i < res.sizes.size(); ++i) {
    const double r = res.rademacher_mean[i] / res.square_function[i];
    res.ratio_min = std::min(res.ratio_min, r);
    res.ratio_max = std::max(res.ratio_max, r);
  }
  return res;
}

double geometric_sum_identity_check(const JacobiParams& params, std::size_t N,
                                    const std::vector<double>& thetas) {
  if (N == 0) throw ConfigError("identity check needs N >= 1");
  const double a = params.alpha();
  const double b = params.beta();
  double worst = 0.0;
  for (double theta : thetas) {
    const double s = std::sin(theta);
    if (!(s > 0.0)) throw DomainError("identity check requires sin(theta) != 0");
    const double phi = (a + b + 1.0) * theta / 2.0 - (2.0 * a + 1.0) * std::numbers::pi / 4.0;
    double direct = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      direct += std::cos(static_cast<double>(N + 2 * n) * theta + phi);
    }
    const double NN = static_cast<double>(N);
    const double closed = std::abs(std::sin(NN * theta) * std::cos((2.0 * NN - 1.0) * theta + phi)) / s;
    worst = std::max(worst, std::abs(std::abs(direct) - closed));
  }
  return worst;
}

double geometric_sum_fuzz(const JacobiParams& params, std::size_t trials, std::size_t max_N,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(1e-3, std::numbers::pi - 1e-3);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t N = 1 + static_cast<std::size_t>(rng() % max_N);
    worst = std::max(worst, geometric_sum_identity_check(params, N, {angle(rng)}));
  }
  return worst;
}

double one_minus_largest_root(const JacobiParams& params, std::size_t n) {
  if (n == 0) throw DomainError("P_0 has no roots");
  auto value = [&](double theta) { return eval_P(params, n, std::cos(theta)); };
  const double step = std::numbers::pi / (4.0 * static_cast<double>(n + 1));
  double lo = 0.0;
  const double sign0 = value(0.0);
  double hi = step;
  while (value(hi) * sign0 > 0.0) {
    lo = hi;
    hi += step;
    if (hi >= std::numbers::pi) throw NonConvergence("no sign change found for largest root", lo, hi);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (value(mid) * sign0 > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double theta = 0.5 * (lo + hi);
  const double s = std::sin(0.5 * theta);
  return 2.0 * s * s;
}

NearOneResult near_one_experiment(const JacobiParams& params, const std::vector<std::size_t>& n_grid,
                                  const std::vector<double>& d_sweep, std::size_t grid_points,
                                  double envelope_limit) {
  if (n_grid.empty() || d_sweep.empty()) throw ConfigError("near-one needs a grid and a d sweep");
  NearOneResult res;
  for (double d : d_sweep) {
    NearOneResult::Envelope env{d, INFINITY, -INFINITY, false};
    for (std::size_t n : n_grid) {
      const RatioRange r = near_one_ratio_range(params, n, d, grid_points);
      res.rows.push_back({d, n, r.min, r.max});
      env.min_ratio = std::min(env.min_ratio, r.min);
      env.max_ratio = std::max(env.max_ratio, r.max);
    }
    env.bounded = env.min_ratio > 0.0 && env.max_ratio / env.min_ratio <= envelope_limit;
    if (env.bounded) res.selected_d = std::max(res.selected_d, d);
    res.envelopes.push_back(env);
  }
  for (std::size_t n : n_grid) {
    res.root_sizes.push_back(static_cast<double>(n));
    res.one_minus_roots.push_back(one_minus_largest_root(params, n));
  }
  if (n_grid.size() >= 2) res.root_fit = fit_loglog(res.root_sizes, res.one_minus_roots);
  return res;
}

DarbouxCheckResult darboux_check(const JacobiParams& params, const std::vector<std::size_t>& n_grid,
                                 double theta_lo, double theta_hi, std::size_t points) {
  if (!(theta_lo > 0.0 && theta_hi < std::numbers::pi && theta_lo < theta_hi) || points < 2) {
    throw ConfigError("Darboux check needs 0 < theta_lo < theta_hi < pi and >= 2 points");
  }
  DarbouxCheckResult res;
  for (std::size_t n : n_grid) {
    double worst_scaled = 0.0;
    double worst_abs = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      const double theta =
          theta_lo + (theta_hi - theta_lo) * static_cast<double>(i) / static_cast<double>(points - 1);
      const DarbouxTerms t = darboux_terms(params, n, theta);
      const double exact = std::sqrt(static_cast<double>(n)) * eval_P(params, n, std::cos(theta));
      const double err = std::abs(exact - t.main_term);
      worst_abs = std::max(worst_abs, err);
      worst_scaled = std::max(worst_scaled, err / t.error_bound_scale);
    }
    res.sizes.push_back(n);
    res.max_scaled_error.push_back(worst_scaled);
    res.max_abs_error.push_back(worst_abs);
  }
  if (!res.max_scaled_error.empty() && res.max_scaled_error.front() > 0.0) {
    res.growth = res.max_scaled_error.back() / res.max_scaled_error.front();
  }
  return res;
}

WitnessReport main_theorem_witness(const ExperimentConfig& cfg) {
  cfg.validate();
  require_schauder(cfg.params, cfg.p);
  WitnessReport rep;
  rep.omega = omega_exponent(cfg.params, cfg.p);
  rep.block = block_sum_experiment(cfg);
  rep.average = average_block_experiment(cfg);

  const SlopeFit& avg = cfg.mode.kind == NormalizationMode::Kind::Orthonormal
                            ? rep.average.rademacher_fit
                            : rep.average.sqrt_rademacher_fit;
  rep.gap = rep.block.fit.slope - avg.slope;
  rep.gap_residual = rep.block.fit.max_residual + avg.max_residual;

  const BasisPtr basis = Basis::make(cfg.params, cfg.mode, cfg.mesh);
  std::vector<double> sizes;
  for (std::size_t N : cfg.grid) {
    const auto block = block_indices(N);
    const auto signs = rademacher_signs(derive_seed(cfg.seed, N), 0, N);
    sizes.push_back(static_cast<double>(N));
    rep.sign_ratios.push_back(sign_ratio(basis, block, signs, cfg.p, cfg.mesh));
  }
  rep.sign_fit = fit_loglog(sizes, rep.sign_ratios);

  const double g = std::abs(rep.gap);
  if (g > 3.0 * rep.gap_residual) {
    rep.verdict = "non-quasi-greedy";
  } else if (g < rep.gap_residual) {
    rep.verdict = "quasi-greedy";
  } else {
    rep.verdict = "inconclusive";
  }
  return rep;
}

}  // namespace jgreedy
