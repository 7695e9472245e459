#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "spinfe/base_measure.hpp"
#include "spinfe/discrete_measure.hpp"
#include "spinfe/mixture.hpp"
#include "spinfe/parisi_pde.hpp"

namespace spinfe {

struct OptimizerConfig {
  int n_atoms = 2;        // atoms in candidate measures
  int multistarts = 8;    // near-zero, mu-copy, spread, and random starts
  int nm_max_iter = 400;
  double nm_tol = 1e-9;
  double golden_tol = 1e-8;
  int u_grid = 33;        // outer grid on [d, D], refined twice around the best
  bool project_dominating = false;  // restrict candidates to nu dominating mu
  PdeConfig pde;
  std::uint64_t seed = 12345;  // random multistart draws
};

struct VariationalResult {
  double value = 0.0;
  DiscreteMeasure argmin = DiscreteMeasure::delta(0.0);
  double arg_scalar = 0.0;  // u* or h'* where applicable, else NaN
  int restarts = 0;
  int evaluations = 0;
  bool converged = false;
  bool bracket_edge = false;  // scalar maximizer landed on its bracket edge
};

// Hopf-Lax value
//   inf_nu [ psi(nu) + (t/2) E xi*((X_nu - X_mu)/t) ]
// over k-atom candidate measures (softmax weights, cumulative-softplus
// locations), Nelder-Mead with multistart.  Requires t > 0.
VariationalResult hopf_lax_value(const MixtureFunction& xi, const DiscreteMeasure& mu, double t,
                                 const BaseMeasure& base, const OptimizerConfig& cfg = {});

// Classical form at t = 1:
//   sup_u inf_{zeta on [0,u], lambda} [ -lambda u
//     + P(zeta_mu, lambda + (xi'(u) - xi'(zeta^{-1}(1)))/2)
//     - 1/2 int_0^u zeta dtheta - xi(u)/2 - mu^{-1}(1) u / 2 ].
VariationalResult classical_parisi_value(const MixtureFunction& xi, const DiscreteMeasure& mu,
                                         const BaseMeasure& base,
                                         const OptimizerConfig& cfg = {});

// Gamma_u(nu) = inf_lambda ( -lambda u + Psi(nu, lambda) ).
double gamma_u(const MixtureFunction& xi, const DiscreteMeasure& nu, double u,
               const BaseMeasure& base, const OptimizerConfig& cfg = {});

// Two-parameter limit value
//   sup_h' inf_nu [ Psi(nu,h') + (t/2) E xi*((X_nu-X_mu)/t) - (s/2) xi*(2(h'-h)/s) ].
// Requires s > 0 and t > 0.
VariationalResult theorem2_value(const MixtureFunction& xi, const DiscreteMeasure& mu, double s,
                                 double t, double h, const BaseMeasure& base,
                                 const OptimizerConfig& cfg = {});

struct FGrid {
  std::vector<double> s_values;
  std::vector<double> h_values;
  std::vector<std::vector<double>> f;  // f[i][j] at (s_values[i], h_values[j])
};

// f(s,h) on a grid, sharing one tabulated inner infimum across all points.
FGrid theorem2_grid(const MixtureFunction& xi, const DiscreteMeasure& mu, double t,
                    const BaseMeasure& base, const OptimizerConfig& cfg,
                    const std::vector<double>& s_values, const std::vector<double>& h_values);

struct HjCheckResult {
  std::vector<std::vector<double>> residual;  // NaN on the border
  std::vector<std::pair<int, int>> flagged;   // interior points beyond tolerance
  double max_abs_interior = 0.0;
  double flag_tol = 0.0;
};

// Central-difference residual of 2 ds f - xi(dh f) at interior grid points.
// flag_tol <= 0 selects 5 * max(grid step).
HjCheckResult hj_check(const FGrid& grid, const MixtureFunction& xi, double flag_tol = -1.0);

}  // namespace spinfe
