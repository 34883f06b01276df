#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace jgreedy {

/// Jacobi indices (alpha, beta), both > -1. The measure is
/// (1-x)^alpha (1+x)^beta dx on (-1, 1).
class JacobiParams {
 public:
  JacobiParams(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  /// max(alpha, beta)
  double gamma() const noexcept { return gamma_; }
  /// min(alpha, beta) > -1/2
  bool half_range_ok() const noexcept { return half_range_ok_; }

  JacobiParams swapped() const { return {beta_, alpha_}; }
  /// (alpha + 1, beta + 1), the indices of the derivative.
  JacobiParams raised() const { return {alpha_ + 1.0, beta_ + 1.0}; }

  /// mu(-1, 1) = 2^{alpha+beta+1} B(alpha+1, beta+1).
  double total_mass() const;

  friend bool operator==(const JacobiParams&, const JacobiParams&) = default;

 private:
  double alpha_;
  double beta_;
  double gamma_;
  bool half_range_ok_;
};

struct NormalizationMode {
  enum class Kind { Orthonormal, SqrtScaled, LpNormalized };

  Kind kind = Kind::Orthonormal;
  double p = 2.0;  // only meaningful for LpNormalized

  static NormalizationMode orthonormal() { return {Kind::Orthonormal, 2.0}; }
  static NormalizationMode sqrt_scaled() { return {Kind::SqrtScaled, 2.0}; }
  static NormalizationMode lp_normalized(double p);

  std::string name() const;

  friend bool operator==(const NormalizationMode&, const NormalizationMode&) = default;
};

/// Backend returning ||p_n||_{L_p(mu)} of the orthonormal polynomial p_n.
/// Supplied by the quadrature module; needed only for LpNormalized.
using OrthonormalLpNorm = std::function<double(const JacobiParams&, std::size_t n, double p)>;

/// Generalized binomial C(n + a, n) = Gamma(n+a+1) / (Gamma(n+1) Gamma(a+1)), via log-gamma.
double generalized_binomial(double a, std::size_t n);

/// P_n^{(alpha,beta)}(x), normalized by P_n(1) = C(n+alpha, n); forward three-term recurrence.
/// Throws DomainError for |x| > 1 and OverflowError if the recurrence leaves double range.
double eval_P(const JacobiParams& params, std::size_t n, double x);

/// Fills out[k] = P_k(x) for k = 0 .. out.size()-1 with a single recurrence pass.
void eval_P_upto(const JacobiParams& params, double x, std::span<double> out);

/// Three-term recurrence with precomputed coefficients,
/// P_k = (a_k x + b_k) P_{k-1} - c_k P_{k-2}, for repeated evaluation up to a fixed degree.
class JacobiRecurrence {
 public:
  JacobiRecurrence(const JacobiParams& params, std::size_t max_degree);

  const JacobiParams& params() const noexcept { return params_; }
  std::size_t max_degree() const noexcept { return a_.size() - 1; }

  /// out[k] = P_k(x) for k < out.size(); out.size() <= max_degree() + 1.
  void evaluate(double x, std::span<double> out) const;

 private:
  JacobiParams params_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> c_;
};

/// d_n with p_n = d_n P_n orthonormal in L_2(mu).
double orthonormal_const(const JacobiParams& params, std::size_t n);

/// Multiplier c_n with (basis element n) = c_n P_n.
double basis_scale(const JacobiParams& params, const NormalizationMode& mode, std::size_t n,
                   const OrthonormalLpNorm& lp_norm = {});

double eval_basis(const JacobiParams& params, const NormalizationMode& mode, std::size_t n,
                  double x, const OrthonormalLpNorm& lp_norm = {});

/// (P_n)' = (1 + alpha + beta + n) P_{n-1}^{(alpha+1, beta+1)}. Requires n >= 1.
double eval_derivative(const JacobiParams& params, std::size_t n, double x);

struct DarbouxTerms {
  double k_theta = 0.0;
  double phi_theta = 0.0;
  double main_term = 0.0;          // k(theta) cos(n theta + phi(theta))
  double error_bound_scale = 0.0;  // k(theta) / (n sin theta)
  bool inside_window = true;       // delta/n <= theta <= pi - delta/n
};

/// First term of the Darboux asymptotic n^{1/2} P_n(cos theta) ~ k(theta) cos(n theta + phi(theta)).
/// Throws DomainError if theta is not in (0, pi). Leaving the delta/n window is only flagged.
DarbouxTerms darboux_terms(const JacobiParams& params, std::size_t n, double theta,
                           double delta = 1.0);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// [1 - d/n^2, 1]
Interval near_one_window(const JacobiParams& params, std::size_t n, double d = 0.5);

struct RatioRange {
  double min = 0.0;
  double max = 0.0;
};

/// min / max of P_n(x) / n^alpha over an equispaced grid on near_one_window(n, d).
RatioRange near_one_ratio_range(const JacobiParams& params, std::size_t n, double d,
                                std::size_t grid_points = 33);

/// c1 <= P_n(x) / n^alpha <= c2 on the window grid.
bool near_one_bounded(const JacobiParams& params, std::size_t n, double d, double c1, double c2,
                      std::size_t grid_points = 33);

}  // namespace jgreedy
