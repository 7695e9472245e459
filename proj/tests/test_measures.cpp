#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "spinfe/discrete_measure.hpp"
#include "spinfe/mixture.hpp"
#include "spinfe/rng.hpp"

using spinfe::DiscreteMeasure;
using spinfe::MixtureFunction;

namespace {

const MixtureFunction sk = MixtureFunction::sk(1.0);

DiscreteMeasure two_atom(double q0, double w0, double q1) {
  return DiscreteMeasure({{q0, w0}, {q1, 1.0 - w0}});
}

// random measure with up to `max_atoms` atoms in [0, top]
DiscreteMeasure random_measure(std::mt19937_64& rng, int max_atoms, double top) {
  std::uniform_int_distribution<int> natoms(1, max_atoms);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int k = natoms(rng);
  std::vector<DiscreteMeasure::Atom> atoms;
  double loc = unif(rng) * top / (2 * k);
  for (int i = 0; i < k; ++i) {
    atoms.push_back({loc, 0.1 + unif(rng)});
    loc += 0.05 + unif(rng) * top / k;
  }
  double total = 0.0;
  for (auto& a : atoms) total += a.weight;
  for (auto& a : atoms) a.weight /= total;
  // repair rounding so weights sum to one exactly
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) sum += atoms[i].weight;
  atoms.back().weight = 1.0 - sum;
  return DiscreteMeasure(std::move(atoms));
}

}  // namespace

TEST_CASE("construction validates and coalesces") {
  CHECK_THROWS_AS(DiscreteMeasure({{0.1, 0.5}, {0.2, 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure({{-0.1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure({{0.1, 0.0}, {0.2, 1.0}}), std::invalid_argument);
  const DiscreteMeasure m({{0.3, 0.5}, {0.3 + 1e-13, 0.5}});
  CHECK(m.size() == 1);
  CHECK(m.top() == doctest::Approx(0.3));
}

TEST_CASE("quantile") {
  const DiscreteMeasure m = two_atom(0.2, 0.3, 0.5);
  CHECK(m.quantile(0.3) == doctest::Approx(0.2));
  CHECK(m.quantile(0.31) == doctest::Approx(0.5));
  CHECK(DiscreteMeasure::delta(0.7).quantile(1.0) == doctest::Approx(0.7));
  CHECK(DiscreteMeasure::delta(0.4).quantile(0.0) == 0.0);
  CHECK_THROWS_AS(m.quantile(1.5), std::domain_error);
  CHECK_THROWS_AS(m.quantile(-0.1), std::domain_error);
}

TEST_CASE("cdf") {
  const DiscreteMeasure d = DiscreteMeasure::delta(0.4);
  CHECK(d.cdf(0.39) == 0.0);
  CHECK(d.cdf(0.4) == 1.0);
  const DiscreteMeasure m = two_atom(0.2, 0.3, 0.5);
  CHECK(m.cdf(0.3) == doctest::Approx(0.3));
}

TEST_CASE("quantile/cdf duality") {
  const DiscreteMeasure m({{0.1, 0.25}, {0.35, 0.4}, {0.9, 0.35}});
  for (int i = 0; i <= 50; ++i) {
    const double r = i / 50.0;
    CHECK(m.cdf(m.quantile(r)) >= r - 1e-12);
  }
  for (int i = 0; i <= 50; ++i) {
    const double s = 1.2 * i / 50.0;
    if (m.cdf(s) > 0.0) CHECK(m.quantile(m.cdf(s)) <= s + 1e-12);
  }
}

TEST_CASE("zeta_mu merges level grids") {
  CHECK(zeta_mu(sk, DiscreteMeasure::delta(0.5), DiscreteMeasure::delta(0.1)) ==
        DiscreteMeasure::delta(1.1));
  CHECK(zeta_mu(sk, DiscreteMeasure::delta(0.0), DiscreteMeasure::delta(0.0)) ==
        DiscreteMeasure::delta(0.0));

  const DiscreteMeasure zeta = two_atom(0.2, 0.5, 0.6);
  const DiscreteMeasure mu = two_atom(0.0, 0.25, 0.1);
  const DiscreteMeasure out = zeta_mu(sk, zeta, mu);
  REQUIRE(out.size() == 3);
  CHECK(out.atoms()[0].location == doctest::Approx(0.4));
  CHECK(out.atoms()[0].weight == doctest::Approx(0.25));
  CHECK(out.atoms()[1].location == doctest::Approx(0.5));
  CHECK(out.atoms()[1].weight == doctest::Approx(0.25));
  CHECK(out.atoms()[2].location == doctest::Approx(1.3));
  CHECK(out.atoms()[2].weight == doctest::Approx(0.5));

  // fine-level-grid check of the defining identity
  const int n = 10000;
  for (int i = 1; i <= n; ++i) {
    const double x = (i - 0.5) / n;
    CHECK(out.quantile(x) ==
          doctest::Approx(sk.xi_prime(zeta.quantile(x)) + mu.quantile(x)).epsilon(1e-12));
  }
}

TEST_CASE("zeta_mu quantile identity at sampled levels, random measures") {
  auto rng = spinfe::make_stream(42, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscreteMeasure zeta = random_measure(rng, 3, 0.9);
    const DiscreteMeasure mu = random_measure(rng, 3, 0.8);
    const DiscreteMeasure out = zeta_mu(sk, zeta, mu);
    std::uniform_real_distribution<double> unif(1e-9, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double x = unif(rng);
      CHECK(out.quantile(x) ==
            doctest::Approx(sk.xi_prime(zeta.quantile(x)) + mu.quantile(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("transport_cost") {
  const DiscreteMeasure mu = two_atom(0.1, 0.5, 0.4);
  CHECK(transport_cost(sk, mu, mu, 1.0) == 0.0);
  CHECK(transport_cost(sk, DiscreteMeasure::delta(0.5), DiscreteMeasure::delta(0.0), 1.0) ==
        doctest::Approx(0.0625).epsilon(1e-14));
  const DiscreteMeasure nu = two_atom(0.0, 0.5, 0.8);
  CHECK(transport_cost(sk, nu, DiscreteMeasure::delta(0.0), 1.0) ==
        doctest::Approx(0.08).epsilon(1e-14));
  CHECK_THROWS_AS(transport_cost(sk, nu, mu, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(transport_cost(sk, nu, mu, -1.0), std::invalid_argument);
}

TEST_CASE("transport_cost agrees with quantile-coupling Monte Carlo") {
  const DiscreteMeasure nu = two_atom(0.0, 0.5, 0.8);
  const DiscreteMeasure mu = DiscreteMeasure::delta(0.0);
  auto rng = spinfe::make_stream(7, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 1000000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = unif(rng);
    acc += sk.xi_star(nu.quantile(u) - mu.quantile(u));
  }
  CHECK(std::abs(acc / n - transport_cost(sk, nu, mu, 1.0)) <= 1e-3);
}

TEST_CASE("cdf_l1_distance") {
  CHECK(cdf_l1_distance(DiscreteMeasure::delta(0.0), DiscreteMeasure::delta(0.6)) ==
        doctest::Approx(0.6).epsilon(1e-14));
  const DiscreteMeasure m = two_atom(0.2, 0.3, 0.5);
  CHECK(cdf_l1_distance(m, m) == 0.0);

  const DiscreteMeasure nu = two_atom(0.1, 0.6, 0.7);
  // Monte Carlo of E|X_mu - X_nu| under the quantile coupling
  auto rng = spinfe::make_stream(8, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 1000000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = unif(rng);
    acc += std::abs(m.quantile(u) - nu.quantile(u));
  }
  CHECK(std::abs(acc / n - cdf_l1_distance(m, nu)) <= 1e-3);
}

TEST_CASE("truncate_support") {
  CHECK(truncate_support(DiscreteMeasure::delta(2.0), 1.0) == DiscreteMeasure::delta(1.0));
  const DiscreteMeasure m = two_atom(0.3, 0.5, 2.0);
  const DiscreteMeasure cut = truncate_support(m, 1.0);
  REQUIRE(cut.size() == 2);
  CHECK(cut.atoms()[1].location == doctest::Approx(1.0));
  CHECK(cut.atoms()[1].weight == doctest::Approx(0.5));
  CHECK(truncate_support(m, 3.0) == m);
}

TEST_CASE("dominate_truncate") {
  const DiscreteMeasure mu = two_atom(0.1, 0.4, 0.6);
  CHECK(dominate_truncate(mu, mu) == mu);
  CHECK(dominate_truncate(DiscreteMeasure::delta(0.0), DiscreteMeasure::delta(0.9)) ==
        DiscreteMeasure::delta(0.9));

  const DiscreteMeasure nu = two_atom(0.05, 0.7, 0.8);
  const DiscreteMeasure out = dominate_truncate(nu, mu);
  // fine-grid quantile-max check
  for (int i = 1; i <= 5000; ++i) {
    const double x = (i - 0.5) / 5000.0;
    CHECK(out.quantile(x) ==
          doctest::Approx(std::max(nu.quantile(x), mu.quantile(x))).epsilon(1e-12));
  }
  // CDF of the output is the pointwise min at every breakpoint
  for (const auto& a : out.atoms()) {
    CHECK(out.cdf(a.location) ==
          doctest::Approx(std::min(nu.cdf(a.location), mu.cdf(a.location))).epsilon(1e-12));
  }
}

TEST_CASE("transport cost nonnegative; zero iff equal under domination") {
  auto rng = spinfe::make_stream(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const DiscreteMeasure mu = random_measure(rng, 3, 0.8);
    const DiscreteMeasure nu = dominate_truncate(random_measure(rng, 3, 1.2), mu);
    const double c = transport_cost(sk, nu, mu, 1.0);
    CHECK(c >= 0.0);
    if (cdf_l1_distance(nu, mu) > 1e-12)
      CHECK(c > 0.0);
    else
      CHECK(c <= 1e-15);
    CHECK(transport_cost(sk, mu, mu, 1.0) == 0.0);
  }
}

TEST_CASE("transport cost convex along quantile interpolation") {
  // interpolate atoms of two dominated measures at matched levels
  const DiscreteMeasure mu = DiscreteMeasure::delta(0.0);
  const DiscreteMeasure a = two_atom(0.1, 0.5, 0.6);
  const DiscreteMeasure b = two_atom(0.3, 0.5, 1.0);
  auto blend = [&](double w) {
    std::vector<DiscreteMeasure::Atom> atoms;
    for (std::size_t i = 0; i < a.size(); ++i)
      atoms.push_back({(1.0 - w) * a.atoms()[i].location + w * b.atoms()[i].location,
                       a.atoms()[i].weight});
    return DiscreteMeasure(std::move(atoms));
  };
  for (double w : {0.2, 0.5, 0.8}) {
    const double mid = transport_cost(sk, blend(w), mu, 1.0);
    const double ends =
        (1.0 - w) * transport_cost(sk, a, mu, 1.0) + w * transport_cost(sk, b, mu, 1.0);
    CHECK(mid <= ends + 1e-12);
  }
}

TEST_CASE("transport cost invariant under dominate_truncate") {
  auto rng = spinfe::make_stream(13, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const DiscreteMeasure mu = random_measure(rng, 3, 0.7);
    const DiscreteMeasure nu = random_measure(rng, 3, 1.1);
    const DiscreteMeasure dom = dominate_truncate(nu, mu);
    CHECK(transport_cost(sk, dom, mu, 1.0) ==
          doctest::Approx(transport_cost(sk, nu, mu, 1.0)).epsilon(1e-12));
  }
}
