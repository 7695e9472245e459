#include "spinfe/discrete_measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spinfe {

namespace {
constexpr double kCoalesceTol = 1e-12;
constexpr double kWeightTol = 1e-12;
}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("DiscreteMeasure: no atoms");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  for (const Atom& a : atoms) {
    if (!(a.location >= 0.0))
      throw std::invalid_argument("DiscreteMeasure: atom locations must be >= 0");
    if (!(a.weight > 0.0))
      throw std::invalid_argument("DiscreteMeasure: atom weights must be > 0");
  }
  for (const Atom& a : atoms) {
    if (!atoms_.empty() && a.location - atoms_.back().location <= kCoalesceTol)
      atoms_.back().weight += a.weight;
    else
      atoms_.push_back(a);
  }
  double total = 0.0;
  for (const Atom& a : atoms_) total += a.weight;
  if (std::abs(total - 1.0) > kWeightTol)
    throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
  cumulative_.resize(atoms_.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    cum += atoms_[i].weight;
    cumulative_[i] = cum;
  }
  cumulative_.back() = 1.0;
}

DiscreteMeasure DiscreteMeasure::delta(double location) {
  return DiscreteMeasure({{location, 1.0}});
}

double DiscreteMeasure::quantile(double r) const {
  if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("quantile: r must lie in [0,1]");
  if (r <= 0.0) return 0.0;  // every s >= 0 satisfies measure([0,s]) >= 0
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), r);
  return atoms_[static_cast<std::size_t>(it - cumulative_.begin())].location;
}

double DiscreteMeasure::cdf(double s) const {
  const auto it = std::upper_bound(
      atoms_.begin(), atoms_.end(), s,
      [](double value, const Atom& a) { return value < a.location; });
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

std::vector<double> DiscreteMeasure::interior_levels() const {
  std::vector<double> out(cumulative_.begin(), cumulative_.end() - 1);
  return out;
}

std::vector<double> merged_levels(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  std::vector<double> levels;
  levels.reserve(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i) levels.push_back(a.cumulative(i));
  for (std::size_t i = 0; i < b.size(); ++i) levels.push_back(b.cumulative(i));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;  // last entry is exactly 1
}

DiscreteMeasure zeta_mu(const MixtureFunction& xi, const DiscreteMeasure& zeta,
                        const DiscreteMeasure& mu) {
  const std::vector<double> levels = merged_levels(zeta, mu);
  std::vector<DiscreteMeasure::Atom> atoms;
  atoms.reserve(levels.size());
  double prev = 0.0;
  for (double level : levels) {
    // quantiles are constant on (prev, level], so the right endpoint is exact
    atoms.push_back({xi.xi_prime(zeta.quantile(level)) + mu.quantile(level), level - prev});
    prev = level;
  }
  return DiscreteMeasure(std::move(atoms));
}

double transport_cost(const MixtureFunction& xi, const DiscreteMeasure& nu,
                      const DiscreteMeasure& mu, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("transport_cost: t must be > 0");
  const std::vector<double> levels = merged_levels(nu, mu);
  double acc = 0.0;
  double prev = 0.0;
  for (double level : levels) {
    acc += (level - prev) * xi.xi_star((nu.quantile(level) - mu.quantile(level)) / t);
    prev = level;
  }
  return acc;
}

double cdf_l1_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<double> points;
  points.reserve(mu.size() + nu.size());
  for (const auto& a : mu.atoms()) points.push_back(a.location);
  for (const auto& a : nu.atoms()) points.push_back(a.location);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    acc += std::abs(mu.cdf(points[i]) - nu.cdf(points[i])) * (points[i + 1] - points[i]);
  return acc;
}

DiscreteMeasure truncate_support(const DiscreteMeasure& nu, double cap) {
  std::vector<DiscreteMeasure::Atom> atoms;
  double above = 0.0;
  for (const auto& a : nu.atoms()) {
    if (a.location > cap)
      above += a.weight;
    else
      atoms.push_back(a);
  }
  if (above > 0.0) atoms.push_back({cap, above});
  return DiscreteMeasure(std::move(atoms));
}

DiscreteMeasure dominate_truncate(const DiscreteMeasure& nu, const DiscreteMeasure& mu) {
  const std::vector<double> levels = merged_levels(nu, mu);
  std::vector<DiscreteMeasure::Atom> atoms;
  atoms.reserve(levels.size());
  double prev = 0.0;
  for (double level : levels) {
    atoms.push_back({std::max(nu.quantile(level), mu.quantile(level)), level - prev});
    prev = level;
  }
  return DiscreteMeasure(std::move(atoms));
}

}  // namespace spinfe
