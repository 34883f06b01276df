#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "jgreedy/jacobi.hpp"
#include "jgreedy/quadrature.hpp"

namespace jgreedy {

/// The system (x_j): Jacobi polynomials under a normalization mode, optionally rescaled
/// by a multiplier lambda_j. Immutable apart from the memoized L_p normalizers.
class Basis {
 public:
  using Multiplier = std::function<double(std::size_t)>;

  Basis(JacobiParams params, NormalizationMode mode, MeshConfig mesh = {}, Multiplier multiplier = {});

  static std::shared_ptr<const Basis> make(JacobiParams params, NormalizationMode mode,
                                           MeshConfig mesh = {}, Multiplier multiplier = {});

  const JacobiParams& params() const noexcept { return params_; }
  const NormalizationMode& mode() const noexcept { return mode_; }
  const MeshConfig& mesh() const noexcept { return mesh_; }

  /// c_j with x_j = c_j P_j.
  double scale(std::size_t n) const;

  /// The system (lambda_j x_j).
  std::shared_ptr<const Basis> rescaled(Multiplier lambda) const;

 private:
  JacobiParams params_;
  NormalizationMode mode_;
  MeshConfig mesh_;
  Multiplier multiplier_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, double> lp_scales_;
};

using BasisPtr = std::shared_ptr<const Basis>;

/// Finitely supported sum_j c_j x_j. Zero coefficients are dropped on construction.
class Expansion {
 public:
  explicit Expansion(BasisPtr basis, std::map<std::size_t, double> coeffs = {});

  const Basis& basis() const noexcept { return *basis_; }
  const BasisPtr& basis_ptr() const noexcept { return basis_; }
  const std::map<std::size_t, double>& coeffs() const noexcept { return coeffs_; }

  std::vector<std::size_t> support() const;
  std::size_t support_size() const noexcept { return coeffs_.size(); }
  bool empty() const noexcept { return coeffs_.empty(); }
  double coefficient(std::size_t n) const;
  std::size_t max_degree() const noexcept;

  double operator()(double x) const;

  /// Family {c_j x_j : j in order}, in the given order.
  JacobiFamily terms(const std::vector<std::size_t>& order) const;

  Expansion scaled(double factor) const;

  friend bool operator==(const Expansion& a, const Expansion& b) {
    return a.basis_ == b.basis_ && a.coeffs_ == b.coeffs_;
  }

 private:
  BasisPtr basis_;
  std::map<std::size_t, double> coeffs_;
};

double lp_norm(const Expansion& e, double p, const MeshConfig& mesh = {});

/// Permutation of the support: non-increasing |c_j|, exact ties broken by ascending degree.
struct GreedyOrdering {
  std::vector<std::size_t> order;
};

GreedyOrdering greedy_ordering(const Expansion& e);

/// G_m(e): the first min(m, |support|) terms in greedy order.
Expansion greedy_approx(const Expansion& e, std::size_t m);

struct QuasiGreedyProfile {
  std::vector<double> partial_norms;  // ||G_m e||_p, m = 1 .. |support|
  double full_norm = 0.0;             // ||e||_p
  double ratio = 0.0;                 // max_m ||G_m e|| / ||e||
  std::size_t argmax = 0;             // m attaining the ratio
};

/// All greedy partial sums from one mesh pass.
QuasiGreedyProfile quasi_greedy_profile(const Expansion& e, double p, const MeshConfig& mesh = {});

/// max_m ||G_m e||_p / ||e||_p. Throws ConfigError for the zero expansion.
double quasi_greedy_ratio(const Expansion& e, double p, const MeshConfig& mesh = {});

/// ||sum_{j in A} eps_j x_j||_p / ||sum_{j in A} x_j||_p
double sign_ratio(const BasisPtr& basis, const std::vector<std::size_t>& indices,
                  const std::vector<int>& signs, double p, const MeshConfig& mesh = {});

/// The block A_N = {N + 2n : 0 <= n < N}.
std::vector<std::size_t> block_indices(std::size_t N);

/// Coefficient 1 + eta on indices with sign +1 and -1 on the others. The greedy algorithm
/// picks the + part first, so ||G_m|| ~ ||sum_A x_j|| / 2 against ||e|| ~ ||sum eps_j x_j||.
Expansion sign_split_expansion(const BasisPtr& basis, const std::vector<std::size_t>& indices,
                               const std::vector<int>& signs, double eta);

/// Candidate sets for democracy_scan.
struct SearchFamily {
  bool contiguous = true;   // {0 .. N-1}
  bool block = true;        // A_N
  bool lacunary = true;     // {2^k : k < N}, only while 2^{N-1} <= max_degree
  std::size_t random_sets = 4;
  std::size_t random_pool_factor = 4;  // random sets drawn from {0 .. factor*N - 1}
  std::size_t max_degree = 8192;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> extra;

  std::vector<std::vector<std::size_t>> enumerate(std::size_t N) const;
};

/// One-sided estimates of the democracy functions: phi_u_estimate is a lower bound for
/// sup_{|A| = N} ||sum_A x_j||, phi_l_estimate an upper bound for the inf.
struct DemocracyReport {
  std::size_t N = 0;
  double phi_u_estimate = 0.0;
  double phi_l_estimate = 0.0;
  std::vector<std::size_t> witness_u;
  std::vector<std::size_t> witness_l;
  std::vector<std::vector<std::size_t>> sets;
  std::vector<double> norms;
};

DemocracyReport democracy_scan(const BasisPtr& basis, std::size_t N, double p,
                               const SearchFamily& search = {}, const MeshConfig& mesh = {});

}  // namespace jgreedy
