#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "spinfe/errors.hpp"
#include "spinfe/mixture.hpp"

using spinfe::MixtureFunction;

namespace {
const MixtureFunction sk = MixtureFunction::sk(1.0);
const MixtureFunction mixed({{2, 1.0}, {4, 0.5}});
}  // namespace

TEST_CASE("xi evaluates the sparse polynomial") {
  CHECK(sk.xi(0.5) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(sk.xi(0.0) == 0.0);
  CHECK(mixed.xi(0.0) == 0.0);
  CHECK(mixed.xi(1.0) == doctest::Approx(1.5).epsilon(1e-14));
  const MixtureFunction m({{3, 0.2}, {2, 0.1}, {6, 0.05}});
  const double r = 0.83;
  CHECK(m.xi(r) ==
        doctest::Approx(0.1 * r * r + 0.2 * r * r * r + 0.05 * std::pow(r, 6)).epsilon(1e-14));
}

TEST_CASE("derivatives") {
  CHECK(sk.xi_prime(0.7) == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(sk.xi_prime(0.0) == 0.0);
  CHECK(mixed.xi_prime(1.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(sk.xi_second(0.3) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(mixed.xi_second(1.0) == doctest::Approx(2.0 + 6.0).epsilon(1e-14));
}

TEST_CASE("theta") {
  CHECK(sk.theta(0.5) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(sk.theta(0.0) == 0.0);
  CHECK(mixed.theta(1.0) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK_THROWS_AS(sk.theta(-0.1), std::domain_error);
}

TEST_CASE("xi_star basic values") {
  CHECK(sk.xi_star(-3.0) == 0.0);
  CHECK(sk.xi_star(0.0) == 0.0);
  CHECK(sk.xi_star(2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sk.xi_star(1.4) == doctest::Approx(sk.theta(0.7)).epsilon(1e-12));
}

TEST_CASE("xi_star_prime inverts xi_prime") {
  CHECK(sk.xi_star_prime(1.4) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(sk.xi_star_prime(0.0) == 0.0);
  CHECK(mixed.xi_star_prime(4.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(sk.xi_star_prime(-1.0), std::domain_error);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(MixtureFunction({}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureFunction({{1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureFunction({{2, -0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureFunction({{2, 0.0}, {4, 0.0}}), std::invalid_argument);
  // duplicate exponents merge
  const MixtureFunction m({{2, 0.25}, {2, 0.75}});
  CHECK(m.terms().size() == 1);
  CHECK(m.xi(1.0) == doctest::Approx(1.0));
}

TEST_CASE("conjugacy xi*(xi'(r)) = theta(r) on a grid") {
  const std::vector<MixtureFunction> families = {
      sk, mixed, MixtureFunction::pure(4, 0.7), MixtureFunction({{2, 0.04}}),
      MixtureFunction({{2, 0.5}, {3, 0.2}, {6, 0.1}})};
  for (const auto& m : families) {
    for (int i = 0; i <= 60; ++i) {
      const double r = 3.0 * i / 60.0;
      CHECK(std::abs(m.xi_star(m.xi_prime(r)) - m.theta(r)) <= 1e-10);
    }
  }
}

TEST_CASE("xi_star monotone nondecreasing and convex, xi_star_prime nondecreasing") {
  for (const auto& m : {sk, mixed}) {
    double prev = -1.0, prev_d = -1.0;
    for (int i = 0; i <= 80; ++i) {
      const double s = -1.0 + 4.0 * i / 80.0;
      const double v = m.xi_star(s);
      CHECK(v >= prev - 1e-12);
      prev = v;
      if (s >= 0.0) {
        const double dv = m.xi_star_prime(s);
        CHECK(dv >= prev_d - 1e-12);
        prev_d = dv;
      }
    }
    // midpoint convexity on [0, xi'(3)]
    const double hi = m.xi_prime(3.0);
    for (int i = 1; i < 40; ++i) {
      const double a = hi * (i - 1) / 40.0, b = hi * (i + 1) / 40.0;
      CHECK(m.xi_star(0.5 * (a + b)) <= 0.5 * (m.xi_star(a) + m.xi_star(b)) + 1e-11);
    }
  }
}

TEST_CASE("Young's inequality with equality at s = xi'(r)") {
  for (const auto& m : {sk, mixed}) {
    for (int i = 0; i <= 20; ++i) {
      const double r = 3.0 * i / 20.0;
      for (int j = 0; j <= 20; ++j) {
        const double s = -3.0 + (m.xi_prime(3.0) + 3.0) * j / 20.0;
        CHECK(r * s <= m.xi(r) + m.xi_star(s) + 1e-10);
      }
      const double s_eq = m.xi_prime(r);
      CHECK(std::abs(r * s_eq - (m.xi(r) + m.xi_star(s_eq))) <= 1e-9);
    }
  }
}

TEST_CASE("finite-difference consistency of the derivatives") {
  const double step = 1e-5;
  for (const auto& m : {sk, mixed}) {
    for (double r : {0.3, 0.9, 2.1}) {
      const double fd = (m.xi(r + step) - m.xi(r - step)) / (2.0 * step);
      CHECK(std::abs(fd - m.xi_prime(r)) / std::abs(m.xi_prime(r)) <= 1e-6);
    }
    for (double s : {0.4, 1.1, 2.5}) {
      const double fd = (m.xi_star(s + step) - m.xi_star(s - step)) / (2.0 * step);
      CHECK(std::abs(fd - m.xi_star_prime(s)) / std::max(1e-12, m.xi_star_prime(s)) <= 1e-6);
    }
  }
}
