#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "spinfe/base_measure.hpp"
#include "spinfe/cascade.hpp"
#include "spinfe/discrete_measure.hpp"
#include "spinfe/mixture.hpp"
#include "spinfe/parisi_pde.hpp"
#include "spinfe/rng.hpp"

using namespace spinfe;

namespace {

// exact within-tree probabilities of the common-ancestor depth, from the
// normalized leaf weights
std::vector<double> overlap_depth_probs(const CascadeTree& tree) {
  const int k = tree.levels();
  std::vector<double> same_or_deeper(k + 1, 0.0);  // P(depth >= l)
  same_or_deeper[0] = 1.0;
  std::size_t block = tree.leaves();
  for (int l = 1; l <= k; ++l) {
    block /= static_cast<std::size_t>(tree.branching);
    double acc = 0.0;
    for (std::size_t start = 0; start < tree.leaves(); start += block) {
      double node_mass = 0.0;
      for (std::size_t i = start; i < start + block; ++i)
        node_mass += std::exp(tree.leaf_log_weights[i]);
      acc += node_mass * node_mass;
    }
    same_or_deeper[l] = acc;
  }
  std::vector<double> probs(k + 1);
  for (int l = 0; l < k; ++l) probs[l] = same_or_deeper[l] - same_or_deeper[l + 1];
  probs[k] = same_or_deeper[k];
  return probs;
}

}  // namespace

TEST_CASE("weights normalize and per-parent blocks decrease") {
  const CascadeTree tree = sample_cascade({0.5}, 10000, 99);
  CHECK(tree.leaves() == 10000);
  double total = 0.0;
  for (double lw : tree.leaf_log_weights) total += std::exp(lw);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i + 1 < tree.leaves(); ++i)
    CHECK(tree.leaf_log_weights[i] >= tree.leaf_log_weights[i + 1]);

  const CascadeTree deep = sample_cascade({0.3, 0.7}, 100, 7);
  double total2 = 0.0;
  for (double lw : deep.leaf_log_weights) total2 += std::exp(lw);
  CHECK(total2 == doctest::Approx(1.0).epsilon(1e-12));
  // within each parent the child points decrease
  for (std::size_t parent = 0; parent < 100; ++parent)
    for (std::size_t i = 0; i + 1 < 100; ++i)
      CHECK(deep.leaf_log_weights[parent * 100 + i] >=
            deep.leaf_log_weights[parent * 100 + i + 1]);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(sample_cascade({0.7, 0.3}, 1000, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_cascade({0.0}, 1000, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_cascade({1.0}, 1000, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_cascade({0.5}, 50, 1), std::invalid_argument);
  const CascadeTree tree = sample_cascade({0.5}, 100, 1);
  CHECK_THROWS_AS(sample_field(tree, HierGaussianSpec{{0.5, 0.2}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_field(tree, HierGaussianSpec{{0.5}}, 1), std::invalid_argument);
}

TEST_CASE("overlap depth from leaf indices") {
  const CascadeTree tree = sample_cascade({0.3, 0.7}, 100, 5);
  CHECK(tree.overlap_depth(0, 0) == 2);
  CHECK(tree.overlap_depth(0, 1) == 1);    // same depth-1 parent
  CHECK(tree.overlap_depth(0, 100) == 0);  // different depth-1 parent
  CHECK(tree.overlap_depth(101, 102) == 1);
}

TEST_CASE("overlap law, one level") {
  // fraction of pairs with common ancestor at depth >= 1 equals zeta_1
  RunningStat stat;
  for (int r = 0; r < 800; ++r) {
    const CascadeTree tree = sample_cascade({0.5}, 2000, substream(1234, r));
    stat.add(overlap_depth_probs(tree)[1]);
  }
  CHECK(std::abs(stat.mean() - 0.5) <= 3.0 * stat.standard_error());
}

TEST_CASE("overlap law, two levels") {
  std::vector<RunningStat> stats(3);
  for (int r = 0; r < 4000; ++r) {
    const CascadeTree tree = sample_cascade({0.3, 0.7}, 600, substream(4321, r));
    const std::vector<double> probs = overlap_depth_probs(tree);
    for (int l = 0; l < 3; ++l) stats[l].add(probs[l]);
  }
  const double expected[3] = {0.3, 0.4, 0.3};
  for (int l = 0; l < 3; ++l) {
    CHECK(std::abs(stats[l].mean() - expected[l]) <= 0.01);
    CHECK(std::abs(stats[l].mean() - expected[l]) <= 3.0 * stats[l].standard_error());
  }
}

TEST_CASE("constant field spec shares one root draw across leaves") {
  const CascadeTree tree = sample_cascade({0.5}, 100, 3);
  const std::vector<double> field = sample_field(tree, HierGaussianSpec{{0.7, 0.7}}, 11);
  for (double v : field) CHECK(v == field[0]);
}

TEST_CASE("zero root level gives independent subtrees with the right variance") {
  const CascadeTree tree = sample_cascade({0.4}, 200, 5);
  RunningStat cov, var;
  for (int r = 0; r < 20000; ++r) {
    const std::vector<double> f = sample_field(tree, HierGaussianSpec{{0.0, 0.9}}, 1000 + r);
    cov.add(f[0] * f[1]);
    var.add(f[0] * f[0]);
  }
  CHECK(std::abs(cov.mean()) <= 3.0 * cov.standard_error());
  CHECK(std::abs(var.mean() - 0.9) <= 3.0 * var.standard_error());
}

TEST_CASE("two-level field covariance matches the ultrametric kernel") {
  const CascadeTree tree = sample_cascade({0.3, 0.7}, 100, 8);
  const HierGaussianSpec spec{{0.2, 0.5, 0.9}};
  RunningStat cov0, cov1, var;
  for (int r = 0; r < 10000; ++r) {
    const std::vector<double> f = sample_field(tree, spec, 5000 + r);
    cov0.add(f[0] * f[100 * 100 - 1]);  // different depth-1 parents
    cov1.add(f[0] * f[1]);              // same depth-1 parent
    var.add(f[0] * f[0]);
  }
  CHECK(std::abs(cov0.mean() - 0.2) <= 3.0 * cov0.standard_error());
  CHECK(std::abs(cov1.mean() - 0.5) <= 3.0 * cov1.standard_error());
  CHECK(std::abs(var.mean() - 0.9) <= 3.0 * var.standard_error());
}

TEST_CASE("log partition: unit-variance independent leaves at one level") {
  CascadeTree proto = sample_cascade({0.5}, 10000, 2024);
  const McEstimate est = cascade_log_partition(proto, HierGaussianSpec{{0.0, 1.0}}, 200);
  CHECK(cascade_log_partition_exact({0.5}, HierGaussianSpec{{0.0, 1.0}}) ==
        doctest::Approx(0.25));
  CHECK(std::abs(est.mean - 0.25) <= 0.02);
  CHECK(std::abs(est.mean - 0.25) <= 3.0 * est.se);
}

TEST_CASE("log partition: zero spec is exactly zero") {
  CascadeTree proto = sample_cascade({0.3, 0.7}, 100, 5);
  const McEstimate est = cascade_log_partition(proto, HierGaussianSpec{{0.0, 0.0, 0.0}}, 50);
  CHECK(est.mean == 0.0);
  CHECK(est.se == 0.0);
}

TEST_CASE("log partition with the theta covariance equals the atomic integral") {
  // zeta = 0.5 d_{0.3} + 0.5 d_{0.8}, SK beta = 1: 0.5 * 0.5 * (theta(.8)-theta(.3))
  const MixtureFunction sk = MixtureFunction::sk(1.0);
  HierGaussianSpec spec{{sk.theta(0.3), sk.theta(0.8)}};
  CascadeTree proto = sample_cascade({0.5}, 2000, 31);
  CHECK(cascade_log_partition_exact({0.5}, spec) == doctest::Approx(0.1375));
  const McEstimate est = cascade_log_partition(proto, spec, 400);
  CHECK(std::abs(est.mean - 0.1375) <= 3.0 * est.se);
}

TEST_CASE("psi via cascade: delta_0 vanishes") {
  const McEstimate est =
      psi_via_cascade(DiscreteMeasure::delta(0.0), BaseMeasure::ising(), 1000, 50, 17);
  CHECK(est.mean == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("psi via cascade matches the PDE value") {
  const BaseMeasure ising = BaseMeasure::ising();
  {
    const DiscreteMeasure mu = DiscreteMeasure::delta(0.25);
    const McEstimate est = psi_via_cascade(mu, ising, 1000, 400, 23);
    CHECK(std::abs(est.mean - psi(mu, ising)) <= 3.0 * est.se);
  }
  {
    const DiscreteMeasure mu({{0.1, 0.4}, {0.5, 0.6}});
    const McEstimate est = psi_via_cascade(mu, ising, 1000, 400, 29);
    CHECK(std::abs(est.mean - psi(mu, ising)) <= 3.0 * est.se);
  }
  {
    const BaseMeasure three = BaseMeasure::uniform({-1.0, 0.0, 1.0});
    const DiscreteMeasure mu({{0.05, 0.5}, {0.35, 0.5}});
    const McEstimate est = psi_via_cascade(mu, three, 1000, 400, 37);
    CHECK(std::abs(est.mean - psi(mu, three)) <= 3.0 * est.se);
  }
}

TEST_CASE("psi via cascade insensitive to the branching truncation") {
  const DiscreteMeasure mu({{0.1, 0.4}, {0.5, 0.6}});
  const BaseMeasure ising = BaseMeasure::ising();
  const McEstimate small = psi_via_cascade(mu, ising, 1000, 200, 41);
  const McEstimate large = psi_via_cascade(mu, ising, 10000, 200, 41);
  const double combined = std::sqrt(small.se * small.se + large.se * large.se);
  CHECK(std::abs(small.mean - large.mean) <= 3.0 * combined);
}

TEST_CASE("identical seeds reproduce trees and estimates") {
  const CascadeTree a = sample_cascade({0.3, 0.7}, 150, 777);
  const CascadeTree b = sample_cascade({0.3, 0.7}, 150, 777);
  CHECK(a.leaf_log_weights == b.leaf_log_weights);
  const DiscreteMeasure mu({{0.1, 0.4}, {0.5, 0.6}});
  const McEstimate e1 = psi_via_cascade(mu, BaseMeasure::ising(), 500, 50, 99);
  const McEstimate e2 = psi_via_cascade(mu, BaseMeasure::ising(), 500, 50, 99);
  CHECK(e1.mean == e2.mean);
  CHECK(e1.se == e2.se);
}
