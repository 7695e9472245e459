#pragma once

#include <limits>

#include "spinfe/base_measure.hpp"
#include "spinfe/discrete_measure.hpp"

namespace spinfe {

struct PdeConfig {
  int quad_order = 40;      // Gauss-Hermite nodes per level
  double x_step = 0.02;     // uniform x-grid spacing
  double x_halfwidth = 0.0; // 0 = derive from the time span and D
  double max_err = std::numeric_limits<double>::infinity();
  enum class Interp { cubic };
  Interp interpolation = Interp::cubic;
};

struct ParisiValue {
  double value;
  double err_estimate;  // |value - value at quad_order/2|
};

// Terminal condition of the Parisi PDE:
//   log integral exp(sigma x + lambda sigma^2) dP1(sigma),
// evaluated by a stabilized log-sum-exp over the finite support.
double terminal_condition(const BaseMeasure& base, double lambda, double x);

// Phi_{nu,lambda}(0,0) for the backward equation
//   dt Phi = -1/2 (dxx Phi + nu(t) (dx Phi)^2)  on [0, nu^{-1}(1)]
// with the terminal condition above.  nu(t) is piecewise constant, so each
// level is one exact Cole-Hopf step
//   Phi(t-,x) = zeta^{-1} log E exp(zeta Phi(t+, x + sqrt(dt) G)),
// with the plain heat step when zeta = 0.  Expectations use Gauss-Hermite
// quadrature on a uniform x-grid with cubic interpolation in between and
// linear extrapolation beyond the edges; the deepest level evaluates the
// terminal condition exactly.  err_estimate is the change under halving the
// quadrature order.
ParisiValue parisi_value(const DiscreteMeasure& nu, double lambda, const BaseMeasure& base,
                         const PdeConfig& cfg = {});

// The same level recursion evaluated by nested quadrature over the tree of
// Gaussian increments, with no spatial grid.  Cost grows like order^levels,
// so nu is restricted to at most 3 atoms.  Serves as the grid solver's
// independent check.  extension_a >= nu^{-1}(1) appends the coefficient-1
// level of the extended equation; negative means no extension.
double parisi_value_recursive(const DiscreteMeasure& nu, double lambda, const BaseMeasure& base,
                              int order = 48, double extension_a = -1.0);

// P^a(nu, lambda): solve on [0,a] with nu(t) = 1 on [nu^{-1}(1), a].
// Requires a >= nu^{-1}(1).
double parisi_value_extended(const DiscreteMeasure& nu, double lambda, double a,
                             const BaseMeasure& base, const PdeConfig& cfg = {});
ParisiValue parisi_value_extended_full(const DiscreteMeasure& nu, double lambda, double a,
                                       const BaseMeasure& base, const PdeConfig& cfg = {});

// Psi(mu,h) = P(mu, h - mu^{-1}(1)/2) and psi(mu) = Psi(mu,0).
double psi_capital(const DiscreteMeasure& mu, double h, const BaseMeasure& base,
                   const PdeConfig& cfg = {});
double psi(const DiscreteMeasure& mu, const BaseMeasure& base, const PdeConfig& cfg = {});

}  // namespace spinfe
