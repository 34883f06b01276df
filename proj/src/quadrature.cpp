#include "jgreedy/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "jgreedy/errors.hpp"

namespace jgreedy {

namespace {

// Points of the theta mesh with the measure folded into the weights.
struct ThetaMesh {
  std::vector<double> x;
  std::vector<double> w;
};

struct ReferencePanel {
  std::vector<double> nodes;  // on [0, 1]
  std::vector<double> weights;
};

ReferencePanel reference_panel(std::size_t q) {
  const QuadratureRule gl = gauss_jacobi_rule(JacobiParams(0.0, 0.0), q);
  ReferencePanel ref;
  for (std::size_t i = 0; i < q; ++i) {
    ref.nodes.push_back(0.5 * (gl.nodes[i] + 1.0));
    ref.weights.push_back(0.5 * gl.weights[i]);
  }
  return ref;
}

// Density of mu in the theta variable: (1-cos)^a (1+cos)^b sin.
double theta_density(double a, double b, double theta) {
  const double s = std::sin(0.5 * theta);
  const double c = std::cos(0.5 * theta);
  return std::exp((a + b + 1.0) * std::numbers::ln2) * std::pow(s, 2.0 * a + 1.0) *
         std::pow(c, 2.0 * b + 1.0);
}

ThetaMesh build_mesh(const JacobiParams& params, const MeshConfig& cfg, const ReferencePanel& ref,
                     std::size_t panels) {
  const double pi = std::numbers::pi;
  const double h = pi / static_cast<double>(panels);
  std::vector<std::pair<double, double>> intervals;

  const bool graded = cfg.endpoint_grading > 1.0;
  const std::size_t levels =
      graded ? static_cast<std::size_t>(std::ceil(std::log(1e16) / std::log(cfg.endpoint_grading)))
             : 0;

  auto graded_left = [&](double width) {
    // [0, width] split as [0, width r^-L], ..., [width r^-1, width]
    std::vector<std::pair<double, double>> parts;
    double hi = width;
    for (std::size_t k = 0; k < levels; ++k) {
      const double lo = hi / cfg.endpoint_grading;
      parts.emplace_back(lo, hi);
      hi = lo;
    }
    parts.emplace_back(0.0, hi);
    std::reverse(parts.begin(), parts.end());
    return parts;
  };

  if (graded) {
    for (auto& iv : graded_left(h)) intervals.push_back(iv);
  } else {
    intervals.emplace_back(0.0, h);
  }
  for (std::size_t k = 1; k + 1 < panels; ++k) {
    intervals.emplace_back(h * static_cast<double>(k), h * static_cast<double>(k + 1));
  }
  if (panels > 1) {
    if (graded) {
      auto left = graded_left(h);
      for (auto it = left.rbegin(); it != left.rend(); ++it) {
        intervals.emplace_back(pi - it->second, pi - it->first);
      }
    } else {
      intervals.emplace_back(pi - h, pi);
    }
  }

  const double a = params.alpha();
  const double b = params.beta();
  ThetaMesh mesh;
  mesh.x.reserve(intervals.size() * ref.nodes.size());
  mesh.w.reserve(intervals.size() * ref.nodes.size());
  for (const auto& [lo, hi] : intervals) {
    const double len = hi - lo;
    if (!(len > 0.0)) continue;
    for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
      const double theta = lo + len * ref.nodes[i];
      mesh.x.push_back(std::cos(theta));
      mesh.w.push_back(len * ref.weights[i] * theta_density(a, b, theta));
    }
  }
  return mesh;
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Sum of w_i * kernel(x_i) per output. Partial sums are formed over fixed chunks and
// reduced in chunk order, so the result does not depend on the thread count.
std::vector<double> apply_mesh(const ThetaMesh& mesh, std::size_t outputs, const PointKernel& kernel,
                               std::size_t threads) {
  constexpr std::size_t kChunk = 256;
  const std::size_t points = mesh.x.size();
  const std::size_t chunks = (points + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks * outputs, 0.0);

  auto run_chunk = [&](std::size_t c, std::vector<double>& buf) {
    double* acc = partial.data() + c * outputs;
    const std::size_t end = std::min(points, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      kernel(mesh.x[i], std::span<double>(buf));
      for (std::size_t j = 0; j < outputs; ++j) acc[j] += mesh.w[i] * buf[j];
    }
  };

  const std::size_t nthreads = std::min(resolve_threads(threads), std::max<std::size_t>(chunks, 1));
  if (nthreads <= 1) {
    std::vector<double> buf(outputs);
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c, buf);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (std::size_t t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        std::vector<double> buf(outputs);
        try {
          for (std::size_t c = next++; c < chunks && !failed; c = next++) run_chunk(c, buf);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
        (void)t;
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<double> total(outputs, 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t j = 0; j < outputs; ++j) total[j] += partial[c * outputs + j];
  }
  for (double v : total) {
    if (!std::isfinite(v)) throw EvaluationError("integrand produced a non-finite value");
  }
  return total;
}

double check_exponent(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("L_p norm requires 1 <= p < infinity");
  return p;
}

double bandwidth_for(double p, std::size_t degree) {
  return std::max(p, 2.0) * static_cast<double>(degree);
}

}  // namespace

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
  return s;
}

QuadratureRule gauss_jacobi_rule(const JacobiParams& params, std::size_t m) {
  if (m == 0) throw ConfigError("Gauss rule needs at least one point");
  const double a = params.alpha();
  const double b = params.beta();

  Eigen::VectorXd diag(m);
  Eigen::VectorXd sub(m > 1 ? m - 1 : 0);
  for (std::size_t k = 0; k < m; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + a + b;
    diag(k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (std::size_t k = 1; k < m; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + a + b;
    double sq;
    if (k == 1) {
      sq = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    } else {
      sq = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    }
    sub(k - 1) = std::sqrt(sq);
  }

  QuadratureRule rule{params, {}, {}};
  const double mass = params.total_mass();
  if (m == 1) {
    rule.nodes = {diag(0)};
    rule.weights = {mass};
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NonConvergence("Golub-Welsch eigen-solver failed", 0.0, 0.0);
  }
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mass * v0 * v0;
  }
  return rule;
}

void MeshConfig::validate() const {
  if (panels_per_unit == 0) throw ConfigError("panels_per_unit must be positive");
  if (points_per_panel == 0) throw ConfigError("points_per_panel must be positive");
  if (!(endpoint_grading >= 1.0)) throw ConfigError("endpoint_grading must be >= 1");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
}

IntegralEstimate integrate_kernel(const JacobiParams& params, std::size_t outputs,
                                  const PointKernel& kernel, const MeshConfig& mesh,
                                  double bandwidth) {
  mesh.validate();
  const ReferencePanel ref = reference_panel(mesh.points_per_panel);
  const double q = static_cast<double>(mesh.points_per_panel);
  std::size_t panels = std::max<std::size_t>(
      static_cast<std::size_t>(std::ceil(std::numbers::pi * static_cast<double>(mesh.panels_per_unit))),
      static_cast<std::size_t>(std::ceil(std::numbers::pi * bandwidth / (1.5 * q))));
  panels = std::max<std::size_t>(panels, 2);

  IntegralEstimate est;
  est.previous = apply_mesh(build_mesh(params, mesh, ref, panels), outputs, kernel, mesh.threads);
  for (std::size_t r = 1; r <= mesh.max_refinements; ++r) {
    panels *= 2;
    est.values = apply_mesh(build_mesh(params, mesh, ref, panels), outputs, kernel, mesh.threads);
    est.panels = panels;
    est.refinements = r;
    bool converged = true;
    std::size_t worst = 0;
    double worst_gap = -1.0;
    for (std::size_t j = 0; j < outputs; ++j) {
      const double gap = std::abs(est.values[j] - est.previous[j]);
      const double scale = std::abs(est.values[j]);
      const double rel = scale > 0.0 ? gap / scale : (gap > 0.0 ? INFINITY : 0.0);
      if (rel > mesh.tolerance) converged = false;
      if (rel > worst_gap) {
        worst_gap = rel;
        worst = j;
      }
    }
    if (converged) return est;
    if (r == mesh.max_refinements) {
      throw NonConvergence("mesh doubling did not reach the requested tolerance",
                           est.previous[worst], est.values[worst]);
    }
    est.previous = est.values;
  }
  // max_refinements == 0: report the single estimate.
  est.values = est.previous;
  return est;
}

CallableFamily::CallableFamily(std::vector<std::function<double(double)>> functions,
                               std::size_t degree_hint)
    : functions_(std::move(functions)), degree_hint_(degree_hint) {}

void CallableFamily::evaluate(double x, std::span<double> out) const {
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    const double v = functions_[i](x);
    if (std::isnan(v)) throw EvaluationError("function returned NaN");
    out[i] = v;
  }
}

JacobiFamily::JacobiFamily(JacobiParams params, std::vector<std::size_t> degrees,
                           std::vector<double> scales)
    : params_(params),
      recurrence_(params, 0),
      degrees_(std::move(degrees)),
      scales_(std::move(scales)) {
  if (degrees_.size() != scales_.size()) {
    throw ConfigError("JacobiFamily: degrees and scales differ in length");
  }
  for (std::size_t d : degrees_) max_degree_ = std::max(max_degree_, d);
  recurrence_ = JacobiRecurrence(params_, max_degree_);
}

JacobiFamily JacobiFamily::make(const JacobiParams& params, const NormalizationMode& mode,
                                std::vector<std::size_t> degrees, const OrthonormalLpNorm& lp_norm) {
  std::vector<double> scales;
  scales.reserve(degrees.size());
  for (std::size_t n : degrees) scales.push_back(basis_scale(params, mode, n, lp_norm));
  return JacobiFamily(params, std::move(degrees), std::move(scales));
}

void JacobiFamily::evaluate(double x, std::span<double> out) const {
  std::vector<double> values(max_degree_ + 1);
  recurrence_.evaluate(x, values);
  for (std::size_t i = 0; i < degrees_.size(); ++i) out[i] = scales_[i] * values[degrees_[i]];
}

double lp_norm(const std::function<double(double)>& f, const JacobiParams& params, double p,
               const MeshConfig& mesh, std::size_t degree_hint) {
  check_exponent(p);
  const PointKernel kernel = [&](double x, std::span<double> out) {
    const double v = f(x);
    if (std::isnan(v)) throw EvaluationError("function returned NaN");
    out[0] = abs_pow(v, p);
  };
  const auto est = integrate_kernel(params, 1, kernel, mesh, bandwidth_for(p, degree_hint));
  return std::pow(est.values[0], 1.0 / p);
}

std::vector<double> family_lp_norms(const FunctionFamily& family, const JacobiParams& params,
                                    double p, const MeshConfig& mesh) {
  check_exponent(p);
  const std::size_t n = family.size();
  if (n == 0) return {};
  const PointKernel kernel = [&](double x, std::span<double> out) {
    family.evaluate(x, out);
    for (double& v : out) v = abs_pow(v, p);
  };
  auto est = integrate_kernel(params, n, kernel, mesh, bandwidth_for(p, family.degree_hint()));
  for (double& v : est.values) v = std::pow(v, 1.0 / p);
  return est.values;
}

double square_function_norm(const FunctionFamily& family, const JacobiParams& params, double p,
                            const MeshConfig& mesh) {
  check_exponent(p);
  const std::size_t n = family.size();
  if (n == 0) throw ConfigError("square function of an empty family");
  const PointKernel kernel = [&](double x, std::span<double> out) {
    std::vector<double> vals(n);
    family.evaluate(x, vals);
    double s = 0.0;
    for (double v : vals) s += v * v;
    out[0] = abs_pow(std::sqrt(s), p);
  };
  const auto est = integrate_kernel(params, 1, kernel, mesh, bandwidth_for(p, family.degree_hint()));
  return std::pow(est.values[0], 1.0 / p);
}

std::vector<int> rademacher_signs(std::uint64_t seed, std::uint64_t index, std::size_t count) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::vector<int> signs(count);
  for (auto& s : signs) s = (rng() >> 63) ? 1 : -1;
  return signs;
}

RademacherEstimate rademacher_average_norm(const FunctionFamily& family, const JacobiParams& params,
                                           double p, std::size_t samples, std::uint64_t seed,
                                           const MeshConfig& mesh) {
  check_exponent(p);
  if (samples == 0) throw ConfigError("rademacher_average_norm needs at least one sample");
  const std::size_t n = family.size();
  if (n == 0) throw ConfigError("Rademacher average of an empty family");

  // signs[j * samples + s]: member-major so the per-point update vectorizes over samples.
  std::vector<double> signs(samples * n);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto row = rademacher_signs(seed, s, n);
    for (std::size_t j = 0; j < n; ++j) signs[j * samples + s] = row[j];
  }
  const PointKernel kernel = [&](double x, std::span<double> out) {
    std::vector<double> vals(n);
    family.evaluate(x, vals);
    std::fill(out.begin(), out.end(), 0.0);
    double* acc = out.data();
    for (std::size_t j = 0; j < n; ++j) {
      const double v = vals[j];
      const double* eps = signs.data() + j * samples;
      for (std::size_t s = 0; s < samples; ++s) acc[s] += eps[s] * v;
    }
    for (double& a : out) a = abs_pow(a, p);
  };
  const auto est =
      integrate_kernel(params, samples, kernel, mesh, bandwidth_for(p, family.degree_hint()));

  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };

  RademacherEstimate r;
  r.samples = samples;
  r.mean = std::pow(mean_of(est.values), 1.0 / p);

  constexpr std::size_t kBootstrap = 256;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0xB0075u};
  std::mt19937_64 rng(seq);
  std::vector<double> resample(samples);
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t b = 0; b < kBootstrap; ++b) {
    for (auto& v : resample) v = est.values[rng() % samples];
    const double e = std::pow(mean_of(resample), 1.0 / p);
    m1 += e;
    m2 += e * e;
  }
  m1 /= kBootstrap;
  m2 /= kBootstrap;
  r.std_error = std::sqrt(std::max(0.0, m2 - m1 * m1) * kBootstrap / (kBootstrap - 1.0));
  return r;
}

double orthonormal_lp_norm(const JacobiParams& params, std::size_t n, double p,
                           const MeshConfig& mesh) {
  check_exponent(p);
  const double dn = orthonormal_const(params, n);
  if (p == 2.0 && n <= 256) {
    const QuadratureRule rule = gauss_jacobi_rule(params, n + 1);
    const double sq = rule.integrate([&](double x) {
      const double v = dn * eval_P(params, n, x);
      return v * v;
    });
    return std::sqrt(sq);
  }
  const JacobiRecurrence rec(params, n);
  const PointKernel kernel = [&](double x, std::span<double> out) {
    std::vector<double> values(n + 1);
    rec.evaluate(x, values);
    out[0] = abs_pow(dn * values[n], p);
  };
  const auto est = integrate_kernel(params, 1, kernel, mesh, bandwidth_for(p, n));
  return std::pow(est.values[0], 1.0 / p);
}

OrthonormalLpNorm lp_norm_backend(const MeshConfig& mesh) {
  return [mesh](const JacobiParams& params, std::size_t n, double p) {
    return orthonormal_lp_norm(params, n, p, mesh);
  };
}

}  // namespace jgreedy
