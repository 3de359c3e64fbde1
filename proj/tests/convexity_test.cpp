#include <cmath>

#include "doctest.h"
#include "pcx/convexity.hpp"
#include "pcx/error.hpp"
#include "pcx/oracle.hpp"
#include "test_support.hpp"

using namespace pcx;
using namespace pcx::convexity;

namespace {

// Independent evaluation: bisection on the sign change of f_a''(0) - style
// bracket at fixed w, written out from the expansion of (e^x - a)^2 + (e^-x - 1/a)^2.
double bracket(double a, double w) {
  // a * f_a''(log w) / 2 = -(a^2 w - 2a(w^-2 + w^2) + 1/w) up to sign.
  return a * a * w - 2.0 * a * (1.0 / (w * w) + w * w) + 1.0 / w;
}

double bisect_root(double w, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((bracket(lo, w) > 0) == (bracket(mid, w) > 0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("threshold constants") {
  const auto& c = constants();
  CHECK(std::abs(c.a0 - 3.330191) <= 1e-6);
  CHECK(std::abs(c.a0 - std::sqrt((11.0 + 5.0 * std::sqrt(5.0)) / 2.0)) <= 1e-15);
  CHECK(std::abs(compute_a0() - compute_a0_quartic()) <= 1e-12);
  CHECK(std::abs(c.w0 - std::sqrt((1.0 + std::sqrt(5.0)) / 2.0)) <= 1e-15);
  CHECK(std::abs(c.w0 - 1.27202) <= 1e-5);
  CHECK(std::abs(psi(c.w0) - c.a0) <= 1e-12);
  CHECK(c.a1 == 3.6);
  CHECK(c.a1 > c.a0);
}

TEST_CASE("f_a worked values") {
  CHECK(std::abs(f_a(0.0, 1.0)) <= 1e-15);
  CHECK(std::abs(f_a(0.0, 3.0) - 40.0 / 9.0) <= 1e-12);
  CHECK(std::abs(f_a_second(0.0, 1.0) - 4.0) <= 1e-12);
  CHECK(std::abs(f_a_second(0.0, 3.0) - 4.0 / 3.0) <= 1e-12);
  CHECK_THROWS_AS(f_a(0.0, 0.0), Error);
  CHECK_THROWS_AS(f_a_second(0.0, -1.0), Error);
}

TEST_CASE("f_a derivatives agree with central differences") {
  auto gen = test::rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = std::exp(uniform(gen, -2, 2));
    const double x = uniform(gen, -3, 3);
    const auto f = [a](double t) { return f_a(t, a); };
    const auto fp = [a](double t) { return f_a_prime(t, a); };
    const double d1 = oracle::finite_diff(f, x, 1e-5, oracle::DiffOrder::kFirst);
    const double d2 = oracle::finite_diff(fp, x, 1e-5, oracle::DiffOrder::kFirst);
    CHECK(test::rel_diff(d1, f_a_prime(x, a)) <= 1e-6);
    CHECK(test::rel_diff(d2, f_a_second(x, a)) <= 1e-6);
  }
}

TEST_CASE("f_a symmetry under reciprocal entry and reflected argument") {
  auto gen = test::rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = std::exp(uniform(gen, -3, 3));
    const double x = uniform(gen, -4, 4);
    CHECK(f_a(x, a) == doctest::Approx(f_a(-x, 1.0 / a)).epsilon(1e-12));
    CHECK(f_a(x, a) >= 0.0);
  }
}

TEST_CASE("phi and psi bound the convex band at fixed w") {
  for (double w : {0.3, 0.7, 1.0, 1.27202, 2.0, 5.0}) {
    const double p = phi(w), q = psi(w);
    CHECK(p > 0.0);
    CHECK(p < q);
    CHECK(std::abs(p * q - 1.0 / (w * w)) <= 1e-12);
    // Roots in a of the bracket, found independently.
    CHECK(test::rel_diff(bisect_root(w, 1e-9, std::sqrt(p * q)), p) <= 1e-10);
    CHECK(test::rel_diff(bisect_root(w, std::sqrt(p * q), 1e6), q) <= 1e-10);
    // f_a'' > 0 strictly between the roots, < 0 outside.
    const double mid = std::sqrt(p * q);
    CHECK(f_a_second(std::log(w), mid) > 0.0);
    CHECK(f_a_second(std::log(w), 0.5 * p) < 0.0);
    CHECK(f_a_second(std::log(w), 2.0 * q) < 0.0);
  }
  CHECK(std::abs(phi(1.0) - (2.0 - std::sqrt(3.0))) <= 1e-12);
  CHECK(std::abs(psi(1.0) - (2.0 + std::sqrt(3.0))) <= 1e-12);
}

TEST_CASE("psi attains its minimum a0 at w0") {
  const auto& c = constants();
  CHECK(std::abs(psi_prime_expr(c.w0)) <= 1e-12);
  CHECK(psi_prime_expr(0.9 * c.w0) < 0.0);
  CHECK(psi_prime_expr(1.1 * c.w0) > 0.0);
  for (const auto& pt : curve_table(1e-2, 1e2, 4001)) CHECK(pt.psi >= c.a0 - 1e-12);
  const auto d = oracle::finite_diff([](double w) { return psi(w); }, c.w0, 1e-5,
                                     oracle::DiffOrder::kFirst);
  CHECK(std::abs(d) <= 1e-8);
}

TEST_CASE("curve table is log-spaced and inclusive") {
  const auto tab = curve_table(0.5, 8.0, 5);
  REQUIRE(tab.size() == 5);
  CHECK(tab.front().w == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(tab[2].w == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(tab.back().w == doctest::Approx(8.0).epsilon(1e-14));
  CHECK_THROWS_AS(curve_table(0.0, 1.0, 3), Error);
}

TEST_CASE("convexity holds exactly on the band") {
  const double a0 = constants().a0;
  for (double a : {1.0 / a0, 0.5, 1.0, 2.0, 3.3, a0}) {
    for (int k = 0; k <= 400; ++k) {
      const double x = -5.0 + 10.0 * k / 400.0;
      CHECK(f_a_second(x, a) >= -1e-12);
    }
  }
  for (double a : {3.4, 3.6, 5.0, 1.0 / 3.4, 1.0 / 5.0}) {
    double lo = 1.0;
    for (int k = 0; k <= 4000; ++k) lo = std::min(lo, f_a_second(-5.0 + 10.0 * k / 4000.0, a));
    CHECK(lo < 0.0);
  }
}

TEST_CASE("certify") {
  const double a0 = constants().a0;
  const auto r = certify(build_matrix(3, {3, 5, 3}));
  CHECK_FALSE(r.admissible);
  CHECK(r.verdict == Verdict::kUnknown);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].i == 0);
  CHECK(r.violations[0].j == 2);
  CHECK(r.violations[0].value == 5.0);
  CHECK(r.max_entry == 5.0);

  const auto ok = certify(build_matrix(3, {2, 3, 2}));
  CHECK(ok.admissible);
  CHECK(ok.verdict == Verdict::kUniqueGuaranteed);
  CHECK(std::string(to_string(ok.verdict)) == "UNIQUE_GUARANTEED");
  CHECK(std::string(to_string(r.verdict)) == "UNKNOWN");

  // Endpoints are inclusive.
  CHECK(certify(build_matrix(2, {a0})).admissible);
  CHECK(certify(build_matrix(2, {1.0 / a0})).admissible);
  CHECK_FALSE(certify(build_matrix(2, {std::nextafter(a0, 10.0)})).admissible);

  // Below-diagonal entries of a reciprocal matrix never add violations.
  const auto low = certify(build_matrix(3, {1, 0.2, 1}));
  REQUIRE(low.violations.size() == 1);
  CHECK(low.violations[0].value == 0.2);
}
