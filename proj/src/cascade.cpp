#include "spinfe/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinfe/rng.hpp"

namespace spinfe {

namespace {

double log_sum_exp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

}  // namespace

int CascadeTree::overlap_depth(std::size_t a, std::size_t b) const {
  const int k = levels();
  int depth = 0;
  std::size_t stride = leaves();
  for (int l = 0; l < k; ++l) {
    stride /= static_cast<std::size_t>(branching);
    if (a / stride != b / stride) break;
    ++depth;
  }
  return depth;
}

CascadeTree sample_cascade(const std::vector<double>& zetas, int branching, std::uint64_t seed) {
  for (std::size_t i = 0; i < zetas.size(); ++i) {
    const double lo = i == 0 ? 0.0 : zetas[i - 1];
    if (!(zetas[i] > lo && zetas[i] < 1.0))
      throw std::invalid_argument("sample_cascade: need 0 < zeta_1 < ... < zeta_k < 1");
  }
  if (branching < 100) throw std::invalid_argument("sample_cascade: branching must be >= 100");

  CascadeTree tree;
  tree.zetas = zetas;
  tree.branching = branching;
  tree.seed = seed;

  auto rng = make_stream(seed, 0);
  std::exponential_distribution<double> expo(1.0);

  std::vector<double> logw{0.0};
  for (double zeta : zetas) {
    std::vector<double> next(logw.size() * static_cast<std::size_t>(branching));
    for (std::size_t parent = 0; parent < logw.size(); ++parent) {
      double gamma = 0.0;
      for (int i = 0; i < branching; ++i) {
        gamma += expo(rng);
        next[parent * branching + i] = logw[parent] - std::log(gamma) / zeta;
      }
    }
    logw.swap(next);
  }
  const double total = log_sum_exp(logw);
  for (double& w : logw) w -= total;
  tree.leaf_log_weights = std::move(logw);
  return tree;
}

std::vector<double> sample_field(const CascadeTree& tree, const HierGaussianSpec& spec,
                                 std::uint64_t seed) {
  const int k = tree.levels();
  if (static_cast<int>(spec.levels.size()) != k + 1)
    throw std::invalid_argument("sample_field: spec needs depth+1 level values");
  for (std::size_t i = 0; i + 1 < spec.levels.size(); ++i)
    if (spec.levels[i + 1] < spec.levels[i])
      throw std::invalid_argument("sample_field: level values must be nondecreasing");
  if (spec.levels[0] < 0.0)
    throw std::invalid_argument("sample_field: level values must be >= 0");

  auto rng = make_stream(seed, 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> field{std::sqrt(spec.levels[0]) * gauss(rng)};
  for (int l = 1; l <= k; ++l) {
    const double sd = std::sqrt(spec.levels[l] - spec.levels[l - 1]);
    std::vector<double> next(field.size() * static_cast<std::size_t>(tree.branching));
    for (std::size_t parent = 0; parent < field.size(); ++parent)
      for (int i = 0; i < tree.branching; ++i)
        next[parent * tree.branching + i] = field[parent] + sd * gauss(rng);
    field.swap(next);
  }
  return field;
}

McEstimate cascade_log_partition(const CascadeTree& proto, const HierGaussianSpec& spec,
                                 int n_samples) {
  RunningStat stat;
  std::vector<double> terms;
  for (int r = 0; r < n_samples; ++r) {
    const CascadeTree tree =
        sample_cascade(proto.zetas, proto.branching, substream(proto.seed, 2 * r + 1));
    const std::vector<double> y = sample_field(tree, spec, substream(proto.seed, 2 * r + 2));
    terms.resize(tree.leaves());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = tree.leaf_log_weights[i] + y[i];
    stat.add(log_sum_exp(terms));
  }
  return {stat.mean(), stat.standard_error(), static_cast<int>(stat.count())};
}

double cascade_log_partition_exact(const std::vector<double>& zetas,
                                   const HierGaussianSpec& spec) {
  double acc = 0.0;
  for (std::size_t l = 0; l < zetas.size(); ++l)
    acc += 0.5 * zetas[l] * (spec.levels[l + 1] - spec.levels[l]);
  return acc;
}

McEstimate psi_via_cascade(const DiscreteMeasure& mu, const BaseMeasure& base, int branching,
                           int n_samples, std::uint64_t seed) {
  const std::vector<double> zetas = mu.interior_levels();
  HierGaussianSpec spec;
  for (const auto& a : mu.atoms()) spec.levels.push_back(a.location);
  const double half_top = 0.5 * mu.top();

  RunningStat stat;
  std::vector<double> terms;
  for (int r = 0; r < n_samples; ++r) {
    const CascadeTree tree = sample_cascade(zetas, branching, substream(seed, 2 * r + 1));
    const std::vector<double> z = sample_field(tree, spec, substream(seed, 2 * r + 2));
    terms.resize(tree.leaves());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      double m = -std::numeric_limits<double>::infinity();
      for (const auto& p : base.support())
        m = std::max(m, p.value * z[i] - half_top * p.value * p.value);
      double inner = 0.0;
      for (const auto& p : base.support())
        inner += p.prob * std::exp(p.value * z[i] - half_top * p.value * p.value - m);
      terms[i] = tree.leaf_log_weights[i] + m + std::log(inner);
    }
    stat.add(log_sum_exp(terms));
  }
  return {stat.mean(), stat.standard_error(), static_cast<int>(stat.count())};
}

}  // namespace spinfe
