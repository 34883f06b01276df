#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "jgreedy/errors.hpp"
#include "jgreedy/greedy.hpp"
#include "oracles.hpp"

using namespace jgreedy;

namespace {

BasisPtr legendre_basis(NormalizationMode mode = NormalizationMode::orthonormal()) {
  return Basis::make({0.0, 0.0}, mode);
}

}  // namespace

TEST_CASE("greedy ordering examples") {
  const auto b = legendre_basis();
  CHECK(greedy_ordering(Expansion(b, {{0, 0.5}, {1, -2.0}, {2, 0.5}})).order ==
        std::vector<std::size_t>{1, 0, 2});
  CHECK(greedy_ordering(Expansion(b, {{7, 3.0}})).order == std::vector<std::size_t>{7});
  CHECK(greedy_ordering(Expansion(b, {{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}})).order ==
        std::vector<std::size_t>{0, 1, 2, 3});
  // exact ties only; a near tie is ordered by magnitude
  CHECK(greedy_ordering(Expansion(b, {{0, 1.0}, {5, std::nextafter(1.0, 2.0)}})).order ==
        std::vector<std::size_t>{5, 0});
}

TEST_CASE("greedy_approx examples") {
  const auto b = legendre_basis();
  const Expansion e(b, {{0, 0.5}, {1, -2.0}, {2, 0.5}});
  CHECK(greedy_approx(e, 0).empty());
  CHECK(greedy_approx(e, 3) == e);
  CHECK(greedy_approx(e, 10) == e);
  CHECK(greedy_approx(e, 1) == Expansion(b, {{1, -2.0}}));
  CHECK(greedy_approx(e, 2) == Expansion(b, {{0, 0.5}, {1, -2.0}}));
}

TEST_CASE("Expansion drops zeros and evaluates the sum") {
  const auto b = Basis::make({0.5, 0.0}, NormalizationMode::sqrt_scaled());
  const Expansion e(b, {{0, 1.5}, {3, 0.0}, {4, -2.0}});
  CHECK(e.support() == std::vector<std::size_t>{0, 4});
  CHECK(e.coefficient(3) == 0.0);
  CHECK(e.max_degree() == 4);
  for (double x : {-0.8, 0.0, 0.6}) {
    const double expected = 1.5 * eval_basis(b->params(), b->mode(), 0, x) -
                            2.0 * eval_basis(b->params(), b->mode(), 4, x);
    CHECK(e(x) == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(lp_norm(Expansion(b), 2.0) == 0.0);
}

TEST_CASE("ordering matches exhaustive search") {
  const auto b = legendre_basis();
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = oracle::random_coeffs(rng, 8, 12, trial % 4 != 0);
    CHECK(greedy_ordering(Expansion(b, c)).order == oracle::brute_force_order(c));
  }
}

TEST_CASE("nesting, idempotence and scale equivariance") {
  const auto b = legendre_basis();
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const Expansion e(b, oracle::random_coeffs(rng, 10, 30, trial % 2 == 0));
    const std::size_t n = e.support_size();
    CHECK(greedy_approx(e, n) == e);
    for (std::size_t m = 0; m < n; ++m) {
      const auto small = greedy_approx(e, m).support();
      const auto big = greedy_approx(e, m + 1).support();
      CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
      CHECK(greedy_approx(greedy_approx(e, m), m) == greedy_approx(e, m));
    }
    for (double s : {-3.0, 0.125, 1e5}) {
      CHECK(greedy_ordering(e.scaled(s)).order == greedy_ordering(e).order);
    }
  }
}

TEST_CASE("quasi-greedy ratio") {
  const auto b = legendre_basis();
  CHECK(quasi_greedy_ratio(Expansion(b, {{9, -4.0}}), 3.0) == 1.0);
  CHECK_THROWS_AS(quasi_greedy_ratio(Expansion(b), 3.0), ConfigError);

  const Expansion e(b, {{1, 1.0}, {2, -0.7}, {5, 0.3}, {8, 2.0}});
  const double r = quasi_greedy_ratio(e, 3.0);
  for (double s : {-2.0, 1e-3, 50.0}) {
    CHECK(quasi_greedy_ratio(e.scaled(s), 3.0) == doctest::Approx(r).epsilon(1e-10));
  }
}

TEST_CASE("p = 2 contraction for orthonormal expansions") {
  const auto b = legendre_basis();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Expansion e(b, oracle::random_coeffs(rng, 8, 30, false));
    CHECK(quasi_greedy_ratio(e, 2.0) <= 1.0 + 1e-8);
  }
}

TEST_CASE("profile agrees with separate evaluation of every G_m") {
  const auto b = legendre_basis(NormalizationMode::sqrt_scaled());
  const auto idx = block_indices(8);
  const auto signs = rademacher_signs(3, 0, idx.size());
  const Expansion e = sign_split_expansion(b, idx, signs, 0.01);
  const QuasiGreedyProfile prof = quasi_greedy_profile(e, 3.0);
  REQUIRE(prof.partial_norms.size() == e.support_size());
  double best = 0.0;
  const double full = lp_norm(e, 3.0);
  CHECK(prof.full_norm == doctest::Approx(full).epsilon(1e-7));
  for (std::size_t m = 1; m <= e.support_size(); ++m) {
    const double v = lp_norm(greedy_approx(e, m), 3.0);
    CHECK(prof.partial_norms[m - 1] == doctest::Approx(v).epsilon(1e-7));
    best = std::max(best, v / full);
  }
  CHECK(prof.ratio == doctest::Approx(best).epsilon(1e-7));
}

TEST_CASE("crafted sign-split expansions have growing quasi-greedy ratio at p = 3") {
  const auto b = legendre_basis(NormalizationMode::sqrt_scaled());
  std::vector<double> ratios;
  for (std::size_t N : {4u, 8u, 16u, 32u, 64u}) {
    const auto idx = block_indices(N);
    const Expansion e = sign_split_expansion(b, idx, rademacher_signs(1, N, idx.size()), 0.01);
    ratios.push_back(quasi_greedy_ratio(e, 3.0));
  }
  for (std::size_t i = 1; i < ratios.size(); ++i) CHECK(ratios[i] > ratios[i - 1]);
  CHECK(ratios.back() > 1.5 * ratios.front());
}

TEST_CASE("sign ratio") {
  const auto b = legendre_basis(NormalizationMode::sqrt_scaled());
  const auto idx = block_indices(6);
  CHECK(sign_ratio(b, idx, std::vector<int>(idx.size(), 1), 3.0) == 1.0);
  CHECK(sign_ratio(b, {11}, {-1}, 3.0) == 1.0);
  CHECK(sign_ratio(b, {11}, {1}, 1.5) == 1.0);
  CHECK_THROWS_AS(sign_ratio(b, {}, {}, 3.0), ConfigError);
  CHECK_THROWS_AS(sign_ratio(b, {1, 2}, {1}, 3.0), ConfigError);
}

TEST_CASE("block indices") {
  CHECK(block_indices(1) == std::vector<std::size_t>{1});
  CHECK(block_indices(3) == std::vector<std::size_t>{3, 5, 7});
}

TEST_CASE("perturbation stability under multipliers in [1/2, 2]") {
  const auto base = legendre_basis(NormalizationMode::sqrt_scaled());
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lam(0.5, 2.0);
  std::vector<double> table(64);
  for (auto& v : table) v = lam(rng);
  const auto scaled = base->rescaled([table](std::size_t n) { return table[n % table.size()]; });

  std::vector<std::map<std::size_t, double>> tests;
  for (int i = 0; i < 6; ++i) tests.push_back(oracle::random_coeffs(rng, 12, 40, i % 2 == 0));
  const auto idx = block_indices(12);
  const auto signs = rademacher_signs(4, 0, idx.size());
  tests.push_back(sign_split_expansion(base, idx, signs, 0.01).coeffs());

  for (const auto& c : tests) {
    const double r0 = quasi_greedy_ratio(Expansion(base, c), 3.0);
    const double r1 = quasi_greedy_ratio(Expansion(scaled, c), 3.0);
    CHECK(r1 <= 4.0 * r0);
  }
}

TEST_CASE("democracy scan") {
  SUBCASE("singletons in the L_p normalized system") {
    const auto b = Basis::make({0.0, 0.0}, NormalizationMode::lp_normalized(3.0));
    const auto rep = democracy_scan(b, 1, 3.0);
    CHECK(rep.phi_u_estimate == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.phi_l_estimate == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("p = 2 orthonormal") {
    const auto b = legendre_basis();
    const auto rep = democracy_scan(b, 6, 2.0);
    REQUIRE(!rep.norms.empty());
    for (double v : rep.norms) CHECK(v == doctest::Approx(std::sqrt(6.0)).epsilon(1e-6));
  }
  SUBCASE("default family and ordering of the estimates") {
    SearchFamily fam;
    fam.seed = 12;
    const auto sets = fam.enumerate(5);
    auto has = [&](const std::vector<std::size_t>& s) {
      return std::find(sets.begin(), sets.end(), s) != sets.end();
    };
    CHECK(has({0, 1, 2, 3, 4}));
    CHECK(has(block_indices(5)));
    CHECK(has({1, 2, 4, 8, 16}));
    CHECK(sets.size() == 3 + fam.random_sets);
    for (const auto& s : sets) CHECK(s.size() == 5);

    const auto b = legendre_basis(NormalizationMode::sqrt_scaled());
    const auto rep = democracy_scan(b, 5, 3.0, fam);
    CHECK(rep.phi_l_estimate <= rep.phi_u_estimate);
    CHECK(rep.witness_u.size() == 5);
    CHECK(rep.witness_l.size() == 5);
  }
}
