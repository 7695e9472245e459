#pragma once

#include <cstdint>
#include <vector>

#include "spinfe/base_measure.hpp"
#include "spinfe/discrete_measure.hpp"

namespace spinfe {

// One sampled Ruelle probability cascade, truncated to the top `branching`
// Poisson-Dirichlet points per node.  Leaves are indexed by base-M digits of
// the leaf index (depth-0 digit first).
struct CascadeTree {
  std::vector<double> zetas;   // 0 < zeta_1 < ... < zeta_k < 1
  int branching = 0;           // M
  std::uint64_t seed = 0;
  std::vector<double> leaf_log_weights;  // normalized, size M^k (k=0 -> {0})

  int levels() const { return static_cast<int>(zetas.size()); }
  std::size_t leaves() const { return leaf_log_weights.size(); }

  // Depth of the deepest common ancestor of two leaves.
  int overlap_depth(std::size_t a, std::size_t b) const;
};

// Hierarchical Gaussian field covariance: field values at two leaves have
// covariance gamma_{a^1 ^ a^2}.  levels.size() must equal tree depth + 1 and
// be nondecreasing.
struct HierGaussianSpec {
  std::vector<double> levels;  // gamma_0 <= gamma_1 <= ... <= gamma_k
};

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
  int n = 0;
};

// Top-M points per node of the Poisson process with intensity
// zeta x^{-1-zeta} dx, realized as x_i = Gamma_i^{-1/zeta} with Gamma_i the
// cumulative sums of standard exponentials; leaf weights are path products,
// normalized.  Requires branching >= 100 and strictly increasing zetas in
// (0,1).
CascadeTree sample_cascade(const std::vector<double>& zetas, int branching, std::uint64_t seed);

// One field draw over the tree: independent per-node increments of variance
// gamma_l - gamma_{l-1} summed along root-to-leaf paths.
std::vector<double> sample_field(const CascadeTree& tree, const HierGaussianSpec& spec,
                                 std::uint64_t seed);

// Monte Carlo estimate of E log sum_alpha v_alpha exp(y_alpha), resampling
// both the cascade and the field each replication (parameters and seed taken
// from `proto`).
McEstimate cascade_log_partition(const CascadeTree& proto, const HierGaussianSpec& spec,
                                 int n_samples);

// Closed form of the same quantity: 1/2 sum_l zeta_l (gamma_l - gamma_{l-1}).
double cascade_log_partition_exact(const std::vector<double>& zetas,
                                   const HierGaussianSpec& spec);

// Monte Carlo estimate of psi(mu) at N = 1:
//   E log sum_alpha v_alpha integral exp(sigma z_alpha - mu^{-1}(1) sigma^2 / 2) dP1,
// with z covariance given by the atoms of mu.  Cross-validates the PDE psi.
McEstimate psi_via_cascade(const DiscreteMeasure& mu, const BaseMeasure& base, int branching,
                           int n_samples, std::uint64_t seed);

}  // namespace spinfe
