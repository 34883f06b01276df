#include "jgreedy/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "jgreedy/errors.hpp"

namespace jgreedy {

namespace {

double bandwidth_for(double p, std::size_t degree) {
  return std::max(p, 2.0) * static_cast<double>(degree);
}

}  // namespace

Basis::Basis(JacobiParams params, NormalizationMode mode, MeshConfig mesh, Multiplier multiplier)
    : params_(params), mode_(mode), mesh_(mesh), multiplier_(std::move(multiplier)) {}

BasisPtr Basis::make(JacobiParams params, NormalizationMode mode, MeshConfig mesh,
                     Multiplier multiplier) {
  return std::make_shared<const Basis>(params, mode, mesh, std::move(multiplier));
}

double Basis::scale(std::size_t n) const {
  double c;
  if (mode_.kind == NormalizationMode::Kind::LpNormalized) {
    std::lock_guard lock(mutex_);
    auto it = lp_scales_.find(n);
    if (it == lp_scales_.end()) {
      it = lp_scales_.emplace(n, basis_scale(params_, mode_, n, lp_norm_backend(mesh_))).first;
    }
    c = it->second;
  } else {
    c = basis_scale(params_, mode_, n);
  }
  return multiplier_ ? c * multiplier_(n) : c;
}

BasisPtr Basis::rescaled(Multiplier lambda) const {
  Multiplier combined = multiplier_ ? Multiplier([outer = multiplier_, lambda](std::size_t n) {
    return outer(n) * lambda(n);
  })
                                    : lambda;
  return make(params_, mode_, mesh_, std::move(combined));
}

Expansion::Expansion(BasisPtr basis, std::map<std::size_t, double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_) throw ConfigError("Expansion requires a basis");
  std::erase_if(coeffs_, [](const auto& kv) { return kv.second == 0.0; });
}

std::vector<std::size_t> Expansion::support() const {
  std::vector<std::size_t> s;
  s.reserve(coeffs_.size());
  for (const auto& [n, c] : coeffs_) s.push_back(n);
  return s;
}

double Expansion::coefficient(std::size_t n) const {
  const auto it = coeffs_.find(n);
  return it == coeffs_.end() ? 0.0 : it->second;
}

std::size_t Expansion::max_degree() const noexcept {
  return coeffs_.empty() ? 0 : coeffs_.rbegin()->first;
}

double Expansion::operator()(double x) const {
  if (coeffs_.empty()) return 0.0;
  std::vector<double> values(max_degree() + 1);
  JacobiRecurrence(basis_->params(), max_degree()).evaluate(x, values);
  double s = 0.0;
  for (const auto& [n, c] : coeffs_) s += c * basis_->scale(n) * values[n];
  return s;
}

JacobiFamily Expansion::terms(const std::vector<std::size_t>& order) const {
  std::vector<double> scales;
  scales.reserve(order.size());
  for (std::size_t n : order) scales.push_back(coefficient(n) * basis_->scale(n));
  return JacobiFamily(basis_->params(), order, std::move(scales));
}

Expansion Expansion::scaled(double factor) const {
  auto c = coeffs_;
  for (auto& [n, v] : c) v *= factor;
  return Expansion(basis_, std::move(c));
}

double lp_norm(const Expansion& e, double p, const MeshConfig& mesh) {
  if (e.empty()) return 0.0;
  const JacobiFamily family = e.terms(e.support());
  const std::size_t k = family.size();
  const PointKernel kernel = [&](double x, std::span<double> out) {
    std::vector<double> vals(k);
    family.evaluate(x, vals);
    double s = 0.0;
    for (double v : vals) s += v;
    out[0] = abs_pow(s, p);
  };
  const auto est = integrate_kernel(e.basis().params(), 1, kernel, mesh,
                                    bandwidth_for(p, e.max_degree()));
  return std::pow(est.values[0], 1.0 / p);
}

GreedyOrdering greedy_ordering(const Expansion& e) {
  GreedyOrdering g{e.support()};
  // support() is ascending in degree, so a stable sort on magnitude realizes the tie-break.
  std::stable_sort(g.order.begin(), g.order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(e.coefficient(a)) > std::abs(e.coefficient(b));
  });
  return g;
}

Expansion greedy_approx(const Expansion& e, std::size_t m) {
  const GreedyOrdering g = greedy_ordering(e);
  std::map<std::size_t, double> kept;
  for (std::size_t k = 0; k < std::min(m, g.order.size()); ++k) {
    kept.emplace(g.order[k], e.coefficient(g.order[k]));
  }
  return Expansion(e.basis_ptr(), std::move(kept));
}

QuasiGreedyProfile quasi_greedy_profile(const Expansion& e, double p, const MeshConfig& mesh) {
  if (e.empty()) throw ConfigError("quasi-greedy ratio of the zero expansion");
  const GreedyOrdering g = greedy_ordering(e);
  const JacobiFamily family = e.terms(g.order);
  const std::size_t k = family.size();
  const PointKernel kernel = [&](double x, std::span<double> out) {
    std::vector<double> vals(k);
    family.evaluate(x, vals);
    double s = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      s += vals[m];
      out[m] = abs_pow(s, p);
    }
  };
  const auto est =
      integrate_kernel(e.basis().params(), k, kernel, mesh, bandwidth_for(p, e.max_degree()));

  QuasiGreedyProfile prof;
  prof.partial_norms.resize(k);
  for (std::size_t m = 0; m < k; ++m) prof.partial_norms[m] = std::pow(est.values[m], 1.0 / p);
  prof.full_norm = prof.partial_norms.back();
  if (!(prof.full_norm > 0.0)) throw EvaluationError("expansion has zero L_p norm");
  prof.ratio = 0.0;
  for (std::size_t m = 0; m < k; ++m) {
    const double r = prof.partial_norms[m] / prof.full_norm;
    if (r > prof.ratio) {
      prof.ratio = r;
      prof.argmax = m + 1;
    }
  }
  return prof;
}

double quasi_greedy_ratio(const Expansion& e, double p, const MeshConfig& mesh) {
  return quasi_greedy_profile(e, p, mesh).ratio;
}

double sign_ratio(const BasisPtr& basis, const std::vector<std::size_t>& indices,
                  const std::vector<int>& signs, double p, const MeshConfig& mesh) {
  if (indices.empty()) throw ConfigError("sign_ratio needs a nonempty index set");
  if (signs.size() != indices.size()) throw ConfigError("sign_ratio: one sign per index required");
  std::vector<double> scales;
  for (std::size_t n : indices) scales.push_back(basis->scale(n));
  const JacobiFamily family(basis->params(), indices, scales);
  const std::size_t k = family.size();
  const PointKernel kernel = [&](double x, std::span<double> out) {
    std::vector<double> vals(k);
    family.evaluate(x, vals);
    double plain = 0.0;
    double signed_sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      plain += vals[j];
      signed_sum += signs[j] * vals[j];
    }
    out[0] = abs_pow(signed_sum, p);
    out[1] = abs_pow(plain, p);
  };
  const auto est =
      integrate_kernel(basis->params(), 2, kernel, mesh, bandwidth_for(p, family.degree_hint()));
  return std::pow(est.values[0] / est.values[1], 1.0 / p);
}

std::vector<std::size_t> block_indices(std::size_t N) {
  std::vector<std::size_t> a(N);
  for (std::size_t n = 0; n < N; ++n) a[n] = N + 2 * n;
  return a;
}

Expansion sign_split_expansion(const BasisPtr& basis, const std::vector<std::size_t>& indices,
                               const std::vector<int>& signs, double eta) {
  if (signs.size() != indices.size()) throw ConfigError("one sign per index required");
  std::map<std::size_t, double> c;
  for (std::size_t j = 0; j < indices.size(); ++j) c[indices[j]] = signs[j] > 0 ? 1.0 + eta : -1.0;
  return Expansion(basis, std::move(c));
}

std::vector<std::vector<std::size_t>> SearchFamily::enumerate(std::size_t N) const {
  std::vector<std::vector<std::size_t>> sets;
  if (N == 0) return sets;
  if (contiguous) {
    std::vector<std::size_t> s(N);
    std::iota(s.begin(), s.end(), std::size_t{0});
    sets.push_back(std::move(s));
  }
  if (block) sets.push_back(block_indices(N));
  if (lacunary && N <= 63 && (std::size_t{1} << (N - 1)) <= max_degree) {
    std::vector<std::size_t> s(N);
    for (std::size_t k = 0; k < N; ++k) s[k] = std::size_t{1} << k;
    sets.push_back(std::move(s));
  }
  const std::size_t pool = std::max(random_pool_factor, std::size_t{1}) * N;
  for (std::size_t r = 0; r < random_sets; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(N), static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::vector<std::size_t> all(pool);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (pool - i));
      std::swap(all[i], all[j]);
    }
    std::vector<std::size_t> s(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(N));
    std::sort(s.begin(), s.end());
    sets.push_back(std::move(s));
  }
  for (const auto& s : extra) {
    if (s.size() == N) sets.push_back(s);
  }
  return sets;
}

DemocracyReport democracy_scan(const BasisPtr& basis, std::size_t N, double p,
                               const SearchFamily& search, const MeshConfig& mesh) {
  DemocracyReport rep;
  rep.N = N;
  rep.sets = search.enumerate(N);
  if (rep.sets.empty()) throw ConfigError("democracy_scan: empty search family");

  std::size_t max_deg = 0;
  for (const auto& s : rep.sets) {
    for (std::size_t n : s) max_deg = std::max(max_deg, n);
  }
  std::vector<double> scales(max_deg + 1, 0.0);
  std::vector<bool> needed(max_deg + 1, false);
  for (const auto& s : rep.sets) {
    for (std::size_t n : s) needed[n] = true;
  }
  for (std::size_t n = 0; n <= max_deg; ++n) {
    if (needed[n]) scales[n] = basis->scale(n);
  }

  const std::size_t k = rep.sets.size();
  const JacobiRecurrence rec(basis->params(), max_deg);
  const PointKernel kernel = [&](double x, std::span<double> out) {
    std::vector<double> values(max_deg + 1);
    rec.evaluate(x, values);
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0.0;
      for (std::size_t n : rep.sets[i]) s += scales[n] * values[n];
      out[i] = abs_pow(s, p);
    }
  };
  const auto est = integrate_kernel(basis->params(), k, kernel, mesh, bandwidth_for(p, max_deg));

  rep.norms.resize(k);
  for (std::size_t i = 0; i < k; ++i) rep.norms[i] = std::pow(est.values[i], 1.0 / p);
  const auto [lo, hi] = std::minmax_element(rep.norms.begin(), rep.norms.end());
  rep.phi_l_estimate = *lo;
  rep.phi_u_estimate = *hi;
  rep.witness_l = rep.sets[static_cast<std::size_t>(lo - rep.norms.begin())];
  rep.witness_u = rep.sets[static_cast<std::size_t>(hi - rep.norms.begin())];
  return rep;
}

}  // namespace jgreedy
