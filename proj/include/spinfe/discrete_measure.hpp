#pragma once

#include <cstddef>
#include <vector>

#include "spinfe/mixture.hpp"

namespace spinfe {

// Atomic probability measure on R_+: strictly increasing nonnegative atom
// locations with positive weights summing to one (within 1e-12).  Atom
// locations within 1e-12 of each other are merged on construction.
class DiscreteMeasure {
 public:
  struct Atom {
    double location;
    double weight;
    bool operator==(const Atom&) const = default;
  };

  explicit DiscreteMeasure(std::vector<Atom> atoms);
  static DiscreteMeasure delta(double location);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  // Left-continuous generalized inverse of the CDF,
  //   quantile(r) = inf{ s >= 0 : measure([0,s]) >= r },
  // so quantile(0) = 0 for every measure.  Requires r in [0,1].
  double quantile(double r) const;

  // Right-continuous CDF, measure([0,s]).
  double cdf(double s) const;

  // Top of the support, quantile(1).
  double top() const { return atoms_.back().location; }

  // Interior cumulative levels zeta_1 < ... < zeta_k (0 and 1 excluded);
  // empty for a single atom.
  std::vector<double> interior_levels() const;

  // Cumulative weight through atom index i.
  double cumulative(std::size_t i) const { return cumulative_[i]; }

  bool operator==(const DiscreteMeasure&) const = default;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;  // same length as atoms_, last entry exactly 1
};

// Merged cumulative breakpoints of two measures, ascending, final entry 1.
// The quantile of either measure is constant on each interval between
// consecutive breakpoints.
std::vector<double> merged_levels(const DiscreteMeasure& a, const DiscreteMeasure& b);

// Measure with quantile xi'(zeta^{-1}(x)) + mu^{-1}(x): the change of
// variables linking the classical and Hopf-Lax forms of the free energy.
DiscreteMeasure zeta_mu(const MixtureFunction& xi, const DiscreteMeasure& zeta,
                        const DiscreteMeasure& mu);

// E xi*((X_nu - X_mu)/t) under the quantile coupling X_rho = rho^{-1}(U),
// exact on the merged level grid.  Requires t > 0.
double transport_cost(const MixtureFunction& xi, const DiscreteMeasure& nu,
                      const DiscreteMeasure& mu, double t);

// integral of |mu(s) - nu(s)| ds, exact; equals E|X_mu - X_nu| under the
// quantile coupling.
double cdf_l1_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// All atoms above cap merged into a single atom at cap, weights preserved.
DiscreteMeasure truncate_support(const DiscreteMeasure& nu, double cap);

// Measure with CDF min(nu(s), mu(s)), i.e. quantile max(X_nu, X_mu) on the
// merged level grid.
DiscreteMeasure dominate_truncate(const DiscreteMeasure& nu, const DiscreteMeasure& mu);

}  // namespace spinfe
