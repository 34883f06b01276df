#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "jgreedy/errors.hpp"
#include "jgreedy/jacobi.hpp"
#include "jgreedy/quadrature.hpp"

using namespace jgreedy;

namespace {

// Explicit sum representation, independent of the recurrence:
// P_n(x) = sum_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^(n-s)
double binom(double top, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (top - i) / (i + 1);
  return r;
}

double jacobi_explicit(double a, double b, int n, double x) {
  double s = 0.0;
  for (int k = 0; k <= n; ++k) {
    s += binom(n + a, n - k) * binom(n + b, k) * std::pow((x - 1.0) / 2.0, k) *
         std::pow((x + 1.0) / 2.0, n - k);
  }
  return s;
}

const std::vector<JacobiParams> kParams = {{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.3}, {-0.4, 1.5}};

}  // namespace

TEST_CASE("JacobiParams validates indices and derives gamma") {
  CHECK_THROWS_AS(JacobiParams(-1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(JacobiParams(0.0, -1.5), ConfigError);
  CHECK_THROWS_AS(JacobiParams(NAN, 0.0), ConfigError);
  const JacobiParams p(0.25, -0.3);
  CHECK(p.gamma() == 0.25);
  CHECK(p.half_range_ok());
  CHECK_FALSE(JacobiParams(-0.5, 2.0).half_range_ok());
  CHECK_FALSE(JacobiParams(-0.7, 0.0).half_range_ok());
  CHECK(JacobiParams(0.0, 0.0).total_mass() == doctest::Approx(2.0).epsilon(1e-14));
  // 2^{2} B(2, 1) = 4 / 2
  CHECK(JacobiParams(1.0, 0.0).total_mass() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("eval_P examples") {
  CHECK(eval_P({0.0, 0.0}, 0, 0.7) == 1.0);
  CHECK(eval_P({0.0, 0.0}, 2, 0.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(eval_P({1.5, 0.5}, 3, 1.0) == doctest::Approx(6.5625).epsilon(1e-14));
  // Legendre closed forms
  for (double x : {-0.9, -0.3, 0.1, 0.65, 1.0}) {
    CHECK(eval_P({0.0, 0.0}, 3, x) == doctest::Approx((5 * x * x * x - 3 * x) / 2).epsilon(1e-14));
    CHECK(eval_P({0.0, 0.0}, 4, x) ==
          doctest::Approx((35 * std::pow(x, 4) - 30 * x * x + 3) / 8).epsilon(1e-13));
  }
}

TEST_CASE("eval_P rejects arguments outside [-1, 1]") {
  CHECK_THROWS_AS(eval_P({0.0, 0.0}, 3, 1.0000001), DomainError);
  CHECK_THROWS_AS(eval_P({0.0, 0.0}, 3, -2.0), DomainError);
  CHECK_THROWS_AS(eval_P({0.0, 0.0}, 3, NAN), DomainError);
}

TEST_CASE("eval_P matches the explicit sum for small degrees") {
  for (const auto& p : kParams) {
    for (int n = 0; n <= 12; ++n) {
      for (double x : {-1.0, -0.77, -0.2, 0.0, 0.41, 0.93, 1.0}) {
        const double ref = jacobi_explicit(p.alpha(), p.beta(), n, x);
        CHECK(eval_P(p, n, x) == doctest::Approx(ref).epsilon(1e-11).scale(1.0));
      }
    }
  }
}

TEST_CASE("normalization pin: P_n(1) = C(n + alpha, n)") {
  for (const auto& p : kParams) {
    for (std::size_t n = 0; n <= 200; ++n) {
      const double expected = generalized_binomial(p.alpha(), n);
      CHECK(std::abs(eval_P(p, n, 1.0) / expected - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("symmetry P_n^{(a,b)}(-x) = (-1)^n P_n^{(b,a)}(x)") {
  for (const auto& p : kParams) {
    for (std::size_t n = 0; n <= 100; n += 7) {
      double scale = 0.0;
      for (int i = 0; i <= 100; ++i) scale = std::max(scale, std::abs(eval_P(p, n, -1.0 + i / 50.0)));
      for (int i = 0; i <= 100; ++i) {
        const double x = -1.0 + i / 50.0;
        const double lhs = eval_P(p, n, -x);
        const double rhs = (n % 2 == 0 ? 1.0 : -1.0) * eval_P(p.swapped(), n, x);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("JacobiRecurrence agrees with eval_P") {
  const JacobiParams p(0.7, -0.2);
  const JacobiRecurrence rec(p, 300);
  std::vector<double> v(301);
  for (double x : {-0.99, -0.5, 0.01, 0.8, 1.0}) {
    rec.evaluate(x, v);
    for (std::size_t n : {0u, 1u, 2u, 17u, 150u, 300u}) {
      CHECK(v[n] == doctest::Approx(eval_P(p, n, x)).epsilon(1e-12).scale(1.0));
    }
  }
  std::vector<double> too_long(302);
  CHECK_THROWS_AS(rec.evaluate(0.0, too_long), DomainError);
}

TEST_CASE("orthonormal constants") {
  const JacobiParams leg(0.0, 0.0);
  CHECK(orthonormal_const(leg, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(orthonormal_const(leg, 1) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
  const double v = orthonormal_const(leg, 10000);
  CHECK(std::abs(v / std::sqrt(10000.0) - 1.0) < 0.01);

  // d_n / sqrt(n) varies by less than 1% over [1e3, 1e4]
  for (const auto& p : kParams) {
    double lo = INFINITY, hi = 0.0;
    for (std::size_t n = 1000; n <= 10000; n += 500) {
      const double r = orthonormal_const(p, n) / std::sqrt(static_cast<double>(n));
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(hi / lo < 1.01);
  }

  // cross-check against a Gauss rule: int (d_n P_n)^2 dmu = 1
  for (const auto& p : kParams) {
    const QuadratureRule rule = gauss_jacobi_rule(p, 40);
    for (std::size_t n : {0u, 1u, 5u, 30u}) {
      const double dn = orthonormal_const(p, n);
      const double sq = rule.integrate([&](double x) { return std::pow(dn * eval_P(p, n, x), 2); });
      CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("orthonormal constant at alpha + beta = -1") {
  const JacobiParams p(-0.25, -0.75);
  const QuadratureRule rule = gauss_jacobi_rule(p, 10);
  for (std::size_t n : {0u, 1u, 3u}) {
    const double dn = orthonormal_const(p, n);
    CHECK(rule.integrate([&](double x) { return std::pow(dn * eval_P(p, n, x), 2); }) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("eval_basis under each normalization mode") {
  const JacobiParams leg(0.0, 0.0);
  CHECK(eval_basis(leg, NormalizationMode::orthonormal(), 0, 0.3) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(eval_basis(leg, NormalizationMode::sqrt_scaled(), 0, 0.3) == 1.0);
  CHECK(eval_basis(leg, NormalizationMode::sqrt_scaled(), 4, 0.3) ==
        doctest::Approx(2.0 * eval_P(leg, 4, 0.3)).epsilon(1e-15));
  CHECK_THROWS_AS(eval_basis(leg, NormalizationMode::lp_normalized(3.0), 2, 0.1), ConfigError);
  CHECK_THROWS_AS(NormalizationMode::lp_normalized(0.5), ConfigError);

  const auto backend = lp_norm_backend();
  for (const auto& p : kParams) {
    for (std::size_t n : {0u, 3u, 40u}) {
      for (double x : {-0.6, 0.2, 0.95}) {
        CHECK(eval_basis(p, NormalizationMode::lp_normalized(2.0), n, x, backend) ==
              doctest::Approx(eval_basis(p, NormalizationMode::orthonormal(), n, x)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("derivative identity") {
  const JacobiParams leg(0.0, 0.0);
  CHECK(eval_derivative(leg, 1, 0.4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_derivative(leg, 2, 0.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(eval_derivative(leg, 0, 0.5), DomainError);

  const double h = 1e-5;
  const double fd3 = (eval_P(leg, 3, 0.2 + h) - eval_P(leg, 3, 0.2 - h)) / (2 * h);
  CHECK(std::abs(eval_derivative(leg, 3, 0.2) - fd3) < 1e-6);

  for (const auto& p : kParams) {
    for (std::size_t n = 1; n <= 50; n += 7) {
      double scale = 0.0;
      std::vector<double> xs;
      for (int i = 0; i <= 36; ++i) xs.push_back(-0.9 + 0.05 * i);
      for (double x : xs) scale = std::max(scale, std::abs(eval_derivative(p, n, x)));
      for (double x : xs) {
        const double fd = (eval_P(p, n, x + h) - eval_P(p, n, x - h)) / (2 * h);
        CHECK(std::abs(eval_derivative(p, n, x) - fd) <= 1e-5 * scale);
      }
    }
  }
}

TEST_CASE("Darboux terms") {
  const double pi = std::numbers::pi;
  for (const auto& p : kParams) {
    const DarbouxTerms t = darboux_terms(p, 10, pi / 2);
    CHECK(t.k_theta == doctest::Approx(std::pow(2.0, (p.alpha() + p.beta() + 1) / 2) / std::sqrt(pi))
                           .epsilon(1e-14));
  }
  CHECK_THROWS_AS(darboux_terms({0.0, 0.0}, 5, 0.0), DomainError);
  CHECK_THROWS_AS(darboux_terms({0.0, 0.0}, 5, pi), DomainError);
  CHECK_FALSE(darboux_terms({0.0, 0.0}, 5, 0.1).inside_window);
  CHECK(darboux_terms({0.0, 0.0}, 50, 0.1).inside_window);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> th(1e-3, pi - 1e-3);
  for (int i = 0; i < 200; ++i) {
    const auto& p = kParams[i % kParams.size()];
    const DarbouxTerms t = darboux_terms(p, 1 + i, th(rng));
    CHECK(t.k_theta > 0.0);
    CHECK(std::abs(t.main_term) <= t.k_theta);
  }

  // n = 50 at theta = pi/2: the error is a small multiple of k/(n sin theta)
  const DarbouxTerms t = darboux_terms({0.0, 0.0}, 50, pi / 2);
  const double exact = std::sqrt(50.0) * eval_P({0.0, 0.0}, 50, std::cos(pi / 2));
  CHECK(std::abs(exact - t.main_term) <= 10.0 * t.error_bound_scale);
}

TEST_CASE("Darboux error is O(k / (n sin theta)) uniformly") {
  const double pi = std::numbers::pi;
  for (const auto& p : kParams) {
    std::vector<double> worst;
    for (std::size_t n = 16; n <= 512; n *= 2) {
      double w = 0.0;
      for (int i = 0; i < 200; ++i) {
        const double theta = 1.0 / n + (pi - 2.0 / n) * (i + 0.5) / 200.0;
        const DarbouxTerms t = darboux_terms(p, n, theta);
        const double exact = std::sqrt(double(n)) * eval_P(p, n, std::cos(theta));
        w = std::max(w, std::abs(exact - t.main_term) / t.error_bound_scale);
      }
      worst.push_back(w);
    }
    const double first = worst.front();
    for (double w : worst) CHECK(w <= 2.0 * first + 1.0);
  }
}

TEST_CASE("near-one window and envelope") {
  const Interval w = near_one_window({0.0, 0.0}, 10, 1.0);
  CHECK(w.lo == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(w.hi == 1.0);
  CHECK_THROWS_AS(near_one_window({0.0, 0.0}, 10, 0.0), ConfigError);

  double lo = INFINITY, hi = 0.0;
  for (std::size_t n = 10; n <= 1000; n += 10) {
    const RatioRange r = near_one_ratio_range({0.0, 0.0}, n, 0.5);
    lo = std::min(lo, r.min);
    hi = std::max(hi, r.max);
  }
  CHECK(lo > 0.5);
  CHECK(hi == 1.0);  // P_n(1) = 1 for Legendre
  CHECK(near_one_bounded({0.0, 0.0}, 100, 0.5, 0.5, 1.0));

  // alpha = 1: P_n(1) = n + 1, so P_n(1) / n is pinned between 1 and 1.1 on n >= 10
  for (std::size_t n = 10; n <= 1000; n += 33) {
    const double r = eval_P({1.0, 0.0}, n, 1.0) / n;
    CHECK(r >= 1.0);
    CHECK(r <= 1.1);
    CHECK(near_one_bounded({1.0, 0.0}, n, 0.5, 0.5, 1.2));
  }
}
