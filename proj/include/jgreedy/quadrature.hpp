#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "jgreedy/jacobi.hpp"

namespace jgreedy {

/// |v|^p with a multiplication fast path for small integer p.
inline double abs_pow(double v, double p) {
  const double a = v < 0.0 ? -v : v;
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  if (p == 1.0) return a;
  if (p == 4.0) {
    const double s = a * a;
    return s * s;
  }
  if (p == 6.0) {
    const double c = a * a * a;
    return c * c;
  }
  return std::pow(a, p);
}

/// Nodes and weights for integration against mu_{alpha,beta} on (-1, 1).
struct QuadratureRule {
  JacobiParams params;
  std::vector<double> nodes;    // strictly increasing
  std::vector<double> weights;  // positive

  double integrate(const std::function<double(double)>& f) const;
};

/// m-point Gauss rule for the weight (1-x)^alpha (1+x)^beta (Golub-Welsch).
QuadratureRule gauss_jacobi_rule(const JacobiParams& params, std::size_t m);

/// Composite Gauss-Legendre mesh in theta = arccos(x), graded geometrically toward
/// theta = 0 and theta = pi where the transformed weight behaves like
/// theta^{2 alpha + 1} and (pi - theta)^{2 beta + 1}.
struct MeshConfig {
  std::size_t panels_per_unit = 4;   // base panels per unit of theta length
  std::size_t points_per_panel = 16;
  double endpoint_grading = 4.0;     // geometric ratio of the end panels; 1 disables grading
  double tolerance = 1e-8;           // relative, between successive doublings
  std::size_t max_refinements = 12;
  std::size_t threads = 0;           // 0: hardware concurrency

  void validate() const;
};

/// Integrand kernel: writes the value of every output at x (before the measure is applied).
/// Called concurrently; must not mutate shared state.
using PointKernel = std::function<void(double x, std::span<double> out)>;

struct IntegralEstimate {
  std::vector<double> values;    // converged integrals, one per output
  std::vector<double> previous;  // estimates on the previous (half) mesh
  std::size_t panels = 0;        // uniform panels of the final mesh
  std::size_t refinements = 0;
};

/// Integrates every output of `kernel` against mu, doubling the mesh until all of them
/// agree with the previous level to mesh.tolerance. `bandwidth` is the highest frequency
/// in theta expected in the integrand and seeds the initial panel count.
IntegralEstimate integrate_kernel(const JacobiParams& params, std::size_t outputs,
                                  const PointKernel& kernel, const MeshConfig& mesh,
                                  double bandwidth = 0.0);

/// A finite family of functions evaluated together at each point.
class FunctionFamily {
 public:
  virtual ~FunctionFamily() = default;
  virtual std::size_t size() const = 0;
  virtual void evaluate(double x, std::span<double> out) const = 0;
  /// Highest polynomial degree in the family, 0 when unknown.
  virtual std::size_t degree_hint() const { return 0; }
};

class CallableFamily final : public FunctionFamily {
 public:
  explicit CallableFamily(std::vector<std::function<double(double)>> functions,
                          std::size_t degree_hint = 0);

  std::size_t size() const override { return functions_.size(); }
  void evaluate(double x, std::span<double> out) const override;
  std::size_t degree_hint() const override { return degree_hint_; }

 private:
  std::vector<std::function<double(double)>> functions_;
  std::size_t degree_hint_;
};

/// {c_i P_{n_i}}: Jacobi polynomials of the given degrees with fixed multipliers, all
/// evaluated from one recurrence pass.
class JacobiFamily final : public FunctionFamily {
 public:
  JacobiFamily(JacobiParams params, std::vector<std::size_t> degrees, std::vector<double> scales);

  static JacobiFamily make(const JacobiParams& params, const NormalizationMode& mode,
                           std::vector<std::size_t> degrees, const OrthonormalLpNorm& lp_norm = {});

  std::size_t size() const override { return degrees_.size(); }
  void evaluate(double x, std::span<double> out) const override;
  std::size_t degree_hint() const override { return max_degree_; }

  const std::vector<std::size_t>& degrees() const { return degrees_; }
  const std::vector<double>& scales() const { return scales_; }

 private:
  JacobiParams params_;
  JacobiRecurrence recurrence_;
  std::vector<std::size_t> degrees_;
  std::vector<double> scales_;
  std::size_t max_degree_ = 0;
};

/// (int |f|^p dmu)^{1/p}. Throws EvaluationError if f yields NaN, NonConvergence on failure.
double lp_norm(const std::function<double(double)>& f, const JacobiParams& params, double p,
               const MeshConfig& mesh = {}, std::size_t degree_hint = 0);

/// L_p norms of every member of the family from a single mesh pass.
std::vector<double> family_lp_norms(const FunctionFamily& family, const JacobiParams& params,
                                    double p, const MeshConfig& mesh = {});

/// || (sum_j |f_j|^2)^{1/2} ||_p
double square_function_norm(const FunctionFamily& family, const JacobiParams& params, double p,
                            const MeshConfig& mesh = {});

struct RademacherEstimate {
  double mean = 0.0;    // (mean over samples of ||sum eps_j f_j||_p^p)^{1/p}
  double std_error = 0.0;  // bootstrap standard error of `mean`
  std::size_t samples = 0;
};

/// Monte-Carlo estimate of (E_eps ||sum_j eps_j f_j||_p^p)^{1/p} with independent uniform
/// signs. Sign sample s is drawn from a stream seeded by (seed, s).
RademacherEstimate rademacher_average_norm(const FunctionFamily& family, const JacobiParams& params,
                                           double p, std::size_t samples, std::uint64_t seed,
                                           const MeshConfig& mesh = {});

/// Signs for sample `index` of a run seeded by `seed`; +1 or -1 per family member.
std::vector<int> rademacher_signs(std::uint64_t seed, std::uint64_t index, std::size_t count);

/// ||p_n||_{L_p(mu)}. Uses an exact Gauss-Jacobi rule when p == 2 and n is small.
double orthonormal_lp_norm(const JacobiParams& params, std::size_t n, double p,
                           const MeshConfig& mesh = {});

OrthonormalLpNorm lp_norm_backend(const MeshConfig& mesh = {});

}  // namespace jgreedy
