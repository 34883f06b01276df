#include "jgreedy/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "jgreedy/errors.hpp"

namespace jgreedy {

namespace {

void check_argument(double x) {
  if (!(x >= -1.0 && x <= 1.0)) {
    throw DomainError("Jacobi polynomial argument outside [-1, 1]: " + std::to_string(x));
  }
}

// One step of the three-term recurrence: returns P_n from P_{n-1}, P_{n-2}, n >= 2.
inline double recurrence_step(double a, double b, std::size_t n, double x, double p1, double p2) {
  const double nn = static_cast<double>(n);
  const double s = 2.0 * nn + a + b;
  const double lead = 2.0 * nn * (nn + a + b) * (s - 2.0);
  const double c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
  const double c2 = 2.0 * (nn + a - 1.0) * (nn + b - 1.0) * s;
  return (c1 * p1 - c2 * p2) / lead;
}

inline double first_degree(double a, double b, double x) {
  return (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
}

}  // namespace

JacobiParams::JacobiParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha > -1.0) || !(beta > -1.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw ConfigError("Jacobi indices must satisfy alpha > -1 and beta > -1");
  }
  gamma_ = std::max(alpha, beta);
  half_range_ok_ = std::min(alpha, beta) > -0.5;
}

double JacobiParams::total_mass() const {
  const double a = alpha_;
  const double b = beta_;
  return std::exp((a + b + 1.0) * std::numbers::ln2 + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                  std::lgamma(a + b + 2.0));
}

NormalizationMode NormalizationMode::lp_normalized(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ConfigError("LpNormalized requires 1 <= p < infinity");
  }
  return {Kind::LpNormalized, p};
}

std::string NormalizationMode::name() const {
  switch (kind) {
    case Kind::Orthonormal:
      return "orthonormal";
    case Kind::SqrtScaled:
      return "sqrt-scaled";
    case Kind::LpNormalized:
      return "lp";
  }
  return "unknown";
}

double generalized_binomial(double a, std::size_t n) {
  const double nn = static_cast<double>(n);
  return std::exp(std::lgamma(nn + a + 1.0) - std::lgamma(nn + 1.0) - std::lgamma(a + 1.0));
}

double eval_P(const JacobiParams& params, std::size_t n, double x) {
  check_argument(x);
  const double a = params.alpha();
  const double b = params.beta();
  if (n == 0) return 1.0;
  double p2 = 1.0;
  double p1 = first_degree(a, b, x);
  for (std::size_t k = 2; k <= n; ++k) {
    const double next = recurrence_step(a, b, k, x, p1, p2);
    p2 = p1;
    p1 = next;
  }
  if (!std::isfinite(p1)) {
    throw OverflowError("Jacobi recurrence overflow at degree " + std::to_string(n));
  }
  return p1;
}

void eval_P_upto(const JacobiParams& params, double x, std::span<double> out) {
  check_argument(x);
  if (out.empty()) return;
  const double a = params.alpha();
  const double b = params.beta();
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = first_degree(a, b, x);
  for (std::size_t k = 2; k < out.size(); ++k) {
    out[k] = recurrence_step(a, b, k, x, out[k - 1], out[k - 2]);
  }
  if (!std::isfinite(out.back())) {
    throw OverflowError("Jacobi recurrence overflow at degree " + std::to_string(out.size() - 1));
  }
}

JacobiRecurrence::JacobiRecurrence(const JacobiParams& params, std::size_t max_degree)
    : params_(params), a_(max_degree + 1, 0.0), b_(max_degree + 1, 0.0), c_(max_degree + 1, 0.0) {
  const double a = params.alpha();
  const double b = params.beta();
  for (std::size_t k = 2; k <= max_degree; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + a + b;
    const double lead = 2.0 * kk * (kk + a + b) * (s - 2.0);
    a_[k] = (s - 1.0) * s * (s - 2.0) / lead;
    b_[k] = (s - 1.0) * (a * a - b * b) / lead;
    c_[k] = 2.0 * (kk + a - 1.0) * (kk + b - 1.0) * s / lead;
  }
}

void JacobiRecurrence::evaluate(double x, std::span<double> out) const {
  check_argument(x);
  if (out.empty()) return;
  if (out.size() > a_.size()) throw DomainError("JacobiRecurrence: degree above table size");
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = first_degree(params_.alpha(), params_.beta(), x);
  double p2 = out[0];
  double p1 = out[1];
  for (std::size_t k = 2; k < out.size(); ++k) {
    const double next = (a_[k] * x + b_[k]) * p1 - c_[k] * p2;
    out[k] = next;
    p2 = p1;
    p1 = next;
  }
  if (!std::isfinite(p1)) {
    throw OverflowError("Jacobi recurrence overflow at degree " + std::to_string(out.size() - 1));
  }
}

double orthonormal_const(const JacobiParams& params, std::size_t n) {
  const double a = params.alpha();
  const double b = params.beta();
  if (n == 0) {
    // (a+b+1) Gamma(a+b+1) = Gamma(a+b+2) also covers a + b = -1.
    return 1.0 / std::sqrt(params.total_mass());
  }
  const double nn = static_cast<double>(n);
  const double log_sq = std::log(2.0 * nn + a + b + 1.0) + std::lgamma(nn + 1.0) +
                        std::lgamma(nn + a + b + 1.0) - (a + b + 1.0) * std::numbers::ln2 -
                        std::lgamma(nn + a + 1.0) - std::lgamma(nn + b + 1.0);
  return std::exp(0.5 * log_sq);
}

double basis_scale(const JacobiParams& params, const NormalizationMode& mode, std::size_t n,
                   const OrthonormalLpNorm& lp_norm) {
  switch (mode.kind) {
    case NormalizationMode::Kind::Orthonormal:
      return orthonormal_const(params, n);
    case NormalizationMode::Kind::SqrtScaled:
      return n == 0 ? 1.0 : std::sqrt(static_cast<double>(n));
    case NormalizationMode::Kind::LpNormalized: {
      if (!lp_norm) {
        throw ConfigError("LpNormalized basis requires an L_p norm backend");
      }
      return orthonormal_const(params, n) / lp_norm(params, n, mode.p);
    }
  }
  return 0.0;
}

double eval_basis(const JacobiParams& params, const NormalizationMode& mode, std::size_t n,
                  double x, const OrthonormalLpNorm& lp_norm) {
  return basis_scale(params, mode, n, lp_norm) * eval_P(params, n, x);
}

double eval_derivative(const JacobiParams& params, std::size_t n, double x) {
  if (n == 0) {
    throw DomainError("eval_derivative requires n >= 1");
  }
  const double factor = 0.5 * (1.0 + params.alpha() + params.beta() + static_cast<double>(n));
  return factor * eval_P(params.raised(), n - 1, x);
}

DarbouxTerms darboux_terms(const JacobiParams& params, std::size_t n, double theta, double delta) {
  if (!(theta > 0.0 && theta < std::numbers::pi)) {
    throw DomainError("Darboux angle must lie in (0, pi)");
  }
  if (n == 0) {
    throw DomainError("darboux_terms requires n >= 1");
  }
  const double a = params.alpha();
  const double b = params.beta();
  const double nn = static_cast<double>(n);
  DarbouxTerms t;
  t.k_theta = std::pow(std::sin(0.5 * theta), -a - 0.5) * std::pow(std::cos(0.5 * theta), -b - 0.5) /
              std::sqrt(std::numbers::pi);
  t.phi_theta = (a + b + 1.0) * theta / 2.0 - (2.0 * a + 1.0) * std::numbers::pi / 4.0;
  t.main_term = t.k_theta * std::cos(nn * theta + t.phi_theta);
  t.error_bound_scale = t.k_theta / (nn * std::sin(theta));
  t.inside_window = theta >= delta / nn && theta <= std::numbers::pi - delta / nn;
  return t;
}

Interval near_one_window(const JacobiParams&, std::size_t n, double d) {
  if (!(d > 0.0)) throw ConfigError("near-one window width d must be positive");
  if (n == 0) throw DomainError("near_one_window requires n >= 1");
  const double nn = static_cast<double>(n);
  return {std::max(-1.0, 1.0 - d / (nn * nn)), 1.0};
}

RatioRange near_one_ratio_range(const JacobiParams& params, std::size_t n, double d,
                                std::size_t grid_points) {
  const Interval w = near_one_window(params, n, d);
  const double scale = std::pow(static_cast<double>(n), params.alpha());
  const std::size_t m = std::max<std::size_t>(grid_points, 2);
  RatioRange r{INFINITY, -INFINITY};
  for (std::size_t i = 0; i < m; ++i) {
    const double x = w.lo + (w.hi - w.lo) * static_cast<double>(i) / static_cast<double>(m - 1);
    const double v = eval_P(params, n, x) / scale;
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
  }
  return r;
}

bool near_one_bounded(const JacobiParams& params, std::size_t n, double d, double c1, double c2,
                      std::size_t grid_points) {
  const RatioRange r = near_one_ratio_range(params, n, d, grid_points);
  return r.min >= c1 && r.max <= c2;
}

}  // namespace jgreedy
