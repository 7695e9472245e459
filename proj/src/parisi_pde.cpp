#include "spinfe/parisi_pde.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "spinfe/errors.hpp"
#include "spinfe/gauss_hermite.hpp"
#include "spinfe/interp.hpp"

namespace spinfe {

double terminal_condition(const BaseMeasure& base, double lambda, double x) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& p : base.support())
    m = std::max(m, p.value * x + lambda * p.value * p.value);
  double acc = 0.0;
  for (const auto& p : base.support())
    acc += p.prob * std::exp(p.value * x + lambda * p.value * p.value - m);
  return m + std::log(acc);
}

namespace {

struct Level {
  double dt;
  double zeta;  // CDF value on the interval, constant
};

// Backward level list for the coefficient nu(t) on [0, nu^{-1}(1)], last
// (deepest) interval first; zero-length intervals dropped.
std::vector<Level> backward_levels(const DiscreteMeasure& nu, double extension_a) {
  std::vector<Level> levels;
  const auto& atoms = nu.atoms();
  if (extension_a > nu.top()) levels.push_back({extension_a - nu.top(), 1.0});
  for (std::size_t i = atoms.size(); i-- > 0;) {
    const double lo = i == 0 ? 0.0 : atoms[i - 1].location;
    const double dt = atoms[i].location - lo;
    if (dt > 0.0) levels.push_back({dt, i == 0 ? 0.0 : nu.cumulative(i - 1)});
  }
  return levels;
}

// One backward step over an interval of length dt with constant coefficient
// zeta, evaluated at x: Cole-Hopf for zeta > 0, plain averaging for zeta = 0.
template <class Upper>
double step_at(const GaussHermite& gh, double dt, double zeta, const Upper& upper, double x) {
  const double sq = std::sqrt(dt);
  if (zeta == 0.0) {
    double acc = 0.0;
    for (std::size_t j = 0; j < gh.gauss_points().size(); ++j)
      acc += gh.prob_weights()[j] * upper(x + sq * gh.gauss_points()[j]);
    return acc;
  }
  double m = -std::numeric_limits<double>::infinity();
  const std::size_t n = gh.gauss_points().size();
  std::vector<double> vals(n);
  for (std::size_t j = 0; j < n; ++j) {
    vals[j] = zeta * upper(x + sq * gh.gauss_points()[j]);
    m = std::max(m, vals[j]);
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += gh.prob_weights()[j] * std::exp(vals[j] - m);
  return (m + std::log(acc)) / zeta;
}

double solve_grid(const std::vector<Level>& levels, const BaseMeasure& base, double lambda,
                  double span, int quad_order, const PdeConfig& cfg) {
  if (levels.empty()) return terminal_condition(base, lambda, 0.0);

  const double auto_half = 4.0 * std::sqrt(span * base.D()) + 4.0;
  double half = cfg.x_halfwidth;
  if (half == 0.0)
    half = auto_half;
  else if (half < auto_half)
    throw std::invalid_argument("PdeConfig: x_halfwidth below the required span");
  const int n_side = static_cast<int>(std::ceil(half / cfg.x_step));
  const int n = 2 * n_side + 1;
  const double x0 = -cfg.x_step * static_cast<double>(n_side);

  const GaussHermite gh(quad_order);
  const auto term = [&](double x) { return terminal_condition(base, lambda, x); };

  // the solution has slope bounded by sqrt(D), so the linear extrapolation
  // tails of the interpolant stay accurate
  std::vector<double> values(n);
  UniformCubicGrid grid;
  bool have_grid = false;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const Level& lv = levels[li];
    const bool last = li + 1 == levels.size();
    const auto eval = [&](double x) {
      return have_grid ? step_at(gh, lv.dt, lv.zeta, grid, x)
                       : step_at(gh, lv.dt, lv.zeta, term, x);
    };
    if (last) return eval(0.0);
    for (int i = 0; i < n; ++i) values[i] = eval(x0 + cfg.x_step * static_cast<double>(i));
    grid = UniformCubicGrid(x0, cfg.x_step, values);
    have_grid = true;
  }
  return grid(0.0);  // unreachable
}

}  // namespace

ParisiValue parisi_value(const DiscreteMeasure& nu, double lambda, const BaseMeasure& base,
                         const PdeConfig& cfg) {
  return parisi_value_extended_full(nu, lambda, nu.top(), base, cfg);
}

ParisiValue parisi_value_extended_full(const DiscreteMeasure& nu, double lambda, double a,
                                       const BaseMeasure& base, const PdeConfig& cfg) {
  if (cfg.quad_order < 8) throw std::invalid_argument("PdeConfig: quad_order must be >= 8");
  if (!(cfg.x_step > 0.0)) throw std::invalid_argument("PdeConfig: x_step must be > 0");
  if (a < nu.top() - 1e-14)
    throw std::invalid_argument("parisi_value_extended: a must be >= nu^{-1}(1)");
  const std::vector<Level> levels = backward_levels(nu, a);
  const double span = std::max(a, nu.top());
  const double full = solve_grid(levels, base, lambda, span, cfg.quad_order, cfg);
  const double coarse = solve_grid(levels, base, lambda, span, cfg.quad_order / 2, cfg);
  const double err = std::abs(full - coarse);
  if (err > cfg.max_err)
    throw NumericalError("parisi_value: quadrature error estimate exceeds the allowed bound");
  return {full, err};
}

double parisi_value_extended(const DiscreteMeasure& nu, double lambda, double a,
                             const BaseMeasure& base, const PdeConfig& cfg) {
  return parisi_value_extended_full(nu, lambda, a, base, cfg).value;
}

double parisi_value_recursive(const DiscreteMeasure& nu, double lambda, const BaseMeasure& base,
                              int order, double extension_a) {
  if (nu.size() > 3)
    throw std::invalid_argument("parisi_value_recursive: at most 3 atoms supported");
  const std::vector<Level> levels = backward_levels(nu, extension_a);
  const GaussHermite gh(order);
  // nested evaluation, level index 0 = earliest time
  std::function<double(std::size_t, double)> eval = [&](std::size_t i, double x) -> double {
    if (i == levels.size()) return terminal_condition(base, lambda, x);
    const std::size_t rev = levels.size() - 1 - i;  // levels stored deepest-first
    const auto upper = [&](double y) { return eval(i + 1, y); };
    return step_at(gh, levels[rev].dt, levels[rev].zeta, upper, x);
  };
  return eval(0, 0.0);
}

double psi_capital(const DiscreteMeasure& mu, double h, const BaseMeasure& base,
                   const PdeConfig& cfg) {
  return parisi_value(mu, h - 0.5 * mu.top(), base, cfg).value;
}

double psi(const DiscreteMeasure& mu, const BaseMeasure& base, const PdeConfig& cfg) {
  return psi_capital(mu, 0.0, base, cfg);
}

}  // namespace spinfe
