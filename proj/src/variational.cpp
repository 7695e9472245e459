#include "spinfe/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "spinfe/interp.hpp"
#include "spinfe/optim.hpp"
#include "spinfe/rng.hpp"

namespace spinfe {

namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double inv_softplus(double y) {
  // inverse of softplus for y > 0
  return y > 30.0 ? y : std::log(std::expm1(std::max(y, 1e-12)));
}

// k-atom measure from 2k unconstrained reals: cumulative softplus gives
// strictly increasing locations, softmax gives the weights.  Coinciding
// locations coalesce inside DiscreteMeasure.
DiscreteMeasure measure_from_params(const std::vector<double>& p, int k) {
  std::vector<DiscreteMeasure::Atom> atoms(k);
  double q = 0.0;
  for (int j = 0; j < k; ++j) {
    q += softplus(p[j]);
    atoms[j].location = q;
  }
  double wmax = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < k; ++j) wmax = std::max(wmax, p[k + j]);
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    atoms[j].weight = std::exp(p[k + j] - wmax);
    total += atoms[j].weight;
  }
  for (int j = 0; j < k; ++j) atoms[j].weight /= total;
  return DiscreteMeasure(std::move(atoms));
}

std::vector<double> params_from_measure(const DiscreteMeasure& m, int k) {
  std::vector<double> p(2 * k);
  double prev = 0.0;
  for (int j = 0; j < k; ++j) {
    const double q = m.quantile((j + 0.5) / k);
    p[j] = inv_softplus(std::max(q - prev, 1e-8));
    prev = std::max(q, prev + 1e-8);
    p[k + j] = 0.0;  // equal weights
  }
  return p;
}

// zeta on [0,u] from 2k+1 unconstrained reals: locations u * cumulative
// softmax fractions (k of k+1 slots), weights softmax.
DiscreteMeasure zeta_from_params(const std::vector<double>& p, int k, double u) {
  std::vector<double> e(k + 1);
  double esum = 0.0;
  for (int j = 0; j <= k; ++j) {
    e[j] = std::exp(std::min(p[j], 40.0));
    esum += e[j];
  }
  std::vector<DiscreteMeasure::Atom> atoms(k);
  double cum = 0.0;
  for (int j = 0; j < k; ++j) {
    cum += e[j];
    atoms[j].location = u * cum / esum;
  }
  double wmax = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < k; ++j) wmax = std::max(wmax, p[k + 1 + j]);
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    atoms[j].weight = std::exp(p[k + 1 + j] - wmax);
    total += atoms[j].weight;
  }
  for (int j = 0; j < k; ++j) atoms[j].weight /= total;
  return DiscreteMeasure(std::move(atoms));
}

// exact atomic integral int_0^u zeta(s) dtheta(s) for zeta supported on [0,u]
double int_zeta_dtheta(const MixtureFunction& xi, const DiscreteMeasure& zeta, double u) {
  const auto& atoms = zeta.atoms();
  double acc = 0.0;
  for (std::size_t l = 0; l + 1 < atoms.size(); ++l)
    acc += zeta.cumulative(l) * (xi.theta(atoms[l + 1].location) - xi.theta(atoms[l].location));
  acc += xi.theta(u) - xi.theta(atoms.back().location);
  return acc;
}

struct InnerMin {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> params;
  DiscreteMeasure measure = DiscreteMeasure::delta(0.0);
  int evaluations = 0;
  bool converged = false;
};

// Multistart simplex minimization of `objective` over candidate-measure
// parameters.  Starts: optional warm point, near-delta_0, mu-copy, spread
// grid, and seeded random points up to n_starts.
template <class Objective>
InnerMin multistart_min(Objective&& objective, const DiscreteMeasure& mu,
                        const OptimizerConfig& cfg, int dim, int n_starts,
                        const std::vector<double>* warm) {
  std::vector<std::vector<double>> starts;
  if (warm && static_cast<int>(warm->size()) == dim) starts.push_back(*warm);
  starts.push_back(std::vector<double>(dim, -8.0));  // all atoms near zero
  {
    std::vector<double> x(dim, 0.0);
    const int k = cfg.n_atoms;
    if (dim == 2 * k) {
      x = params_from_measure(mu, k);
      starts.push_back(x);
    }
    std::vector<double> spread(dim, 0.0);
    for (int j = 0; j < std::min(k, dim); ++j)
      spread[j] = inv_softplus(std::max(0.25 * (mu.top() + 1.0), 0.05));
    starts.push_back(spread);
  }
  auto rng = make_stream(cfg.seed, 77);
  std::normal_distribution<double> gauss(0.0, 1.5);
  while (static_cast<int>(starts.size()) < n_starts) {
    std::vector<double> x(dim);
    for (double& v : x) v = gauss(rng);
    starts.push_back(x);
  }
  if (static_cast<int>(starts.size()) > n_starts)
    starts.resize(std::max(n_starts, 1));

  InnerMin best;
  for (const auto& s0 : starts) {
    NelderMeadResult r = nelder_mead(objective, s0, 0.5, cfg.nm_max_iter, cfg.nm_tol);
    best.evaluations += r.evaluations;
    if (r.value < best.value) {
      best.value = r.value;
      best.params = r.x;
      best.converged = r.converged;
    }
  }
  return best;
}

// Shared inner infimum of Theorem 1.1 / 1.2 at tilt h':
//   inf_nu [ Psi(nu, h') + (t/2) E xi*((X_nu - X_mu)/t) ].
class PsiHat {
 public:
  PsiHat(const MixtureFunction& xi, const DiscreteMeasure& mu, double t, const BaseMeasure& base,
         const OptimizerConfig& cfg)
      : xi_(xi), mu_(mu), t_(t), base_(base), cfg_(cfg) {}

  InnerMin eval(double hprime) {
    const auto hit = cache_.find(hprime);
    if (hit != cache_.end()) return hit->second;
    const std::vector<double>* warm = nullptr;
    if (!cache_.empty()) {
      auto near = cache_.lower_bound(hprime);
      if (near == cache_.end()) --near;
      warm = &near->second.params;
    }
    const int n_starts = warm ? 3 : cfg_.multistarts;
    auto objective = [&](const std::vector<double>& p) {
      DiscreteMeasure nu = measure_from_params(p, cfg_.n_atoms);
      if (cfg_.project_dominating) nu = dominate_truncate(nu, mu_);
      return psi_capital(nu, hprime, base_, cfg_.pde) +
             0.5 * t_ * transport_cost(xi_, nu, mu_, t_);
    };
    InnerMin r = multistart_min(objective, mu_, cfg_, 2 * cfg_.n_atoms, n_starts, warm);
    DiscreteMeasure nu = measure_from_params(r.params, cfg_.n_atoms);
    if (cfg_.project_dominating) nu = dominate_truncate(nu, mu_);
    r.measure = nu;
    cache_.emplace(hprime, r);
    return r;
  }

  int total_evaluations() const {
    int acc = 0;
    for (const auto& [k, v] : cache_) acc += v.evaluations;
    return acc;
  }

 private:
  const MixtureFunction& xi_;
  const DiscreteMeasure& mu_;
  double t_;
  const BaseMeasure& base_;
  OptimizerConfig cfg_;
  std::map<double, InnerMin> cache_;
};

}  // namespace

VariationalResult hopf_lax_value(const MixtureFunction& xi, const DiscreteMeasure& mu, double t,
                                 const BaseMeasure& base, const OptimizerConfig& cfg) {
  if (!(t > 0.0)) throw std::invalid_argument("hopf_lax_value: t must be > 0");
  PsiHat inner(xi, mu, t, base, cfg);
  const InnerMin r = inner.eval(0.0);
  VariationalResult out;
  out.value = r.value;
  out.argmin = r.measure;
  out.arg_scalar = std::numeric_limits<double>::quiet_NaN();
  out.restarts = cfg.multistarts;
  out.evaluations = r.evaluations;
  out.converged = r.converged;
  return out;
}

VariationalResult classical_parisi_value(const MixtureFunction& xi, const DiscreteMeasure& mu,
                                         const BaseMeasure& base, const OptimizerConfig& cfg) {
  const double d = base.d(), big_d = base.D();
  const int k = cfg.n_atoms;
  const int dim = 2 * k + 1;
  const double mu_top_u_coeff = 0.5 * mu.top();

  int total_evals = 0;
  bool all_converged = true;

  // inner infimum over (zeta, lambda) at fixed u
  auto inner_for_u = [&](double u, const std::vector<double>* warm) {
    auto objective = [&](const std::vector<double>& p) {
      const DiscreteMeasure zeta = zeta_from_params(p, k, std::max(u, 0.0));
      const DiscreteMeasure zm = zeta_mu(xi, zeta, mu);
      const double shift = 0.5 * (xi.xi_prime(u) - xi.xi_prime(zeta.top()));
      auto g = [&](double lam) {
        return -lam * u + parisi_value(zm, lam + shift, base, cfg.pde).value;
      };
      const double lam = convex_line_min(g, cfg.golden_tol);
      return g(lam) - 0.5 * int_zeta_dtheta(xi, zeta, u) - 0.5 * xi.xi(u) - mu_top_u_coeff * u;
    };
    InnerMin r = multistart_min(objective, mu, cfg, dim,
                                warm ? 3 : std::min(cfg.multistarts, 5), warm);
    total_evals += r.evaluations;
    all_converged = all_converged && r.converged;
    r.measure = zeta_from_params(r.params, k, std::max(u, 0.0));
    return r;
  };

  double best_u = d;
  InnerMin best;
  if (big_d - d < 1e-12) {
    best = inner_for_u(d, nullptr);
  } else {
    std::vector<double> warm;
    bool have_warm = false;
    double spacing = (big_d - d) / (cfg.u_grid - 1);
    best.value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.u_grid; ++i) {
      const double u = d + spacing * i;
      InnerMin r = inner_for_u(u, have_warm ? &warm : nullptr);
      warm = r.params;
      have_warm = true;
      if (r.value > best.value) {  // outer problem is a supremum
        best = r;
        best_u = u;
      }
    }
    for (int refine = 0; refine < 2; ++refine) {
      spacing /= 4.0;
      const double center = best_u;
      for (int i = -4; i <= 4; ++i) {
        const double u = std::clamp(center + spacing * i, d, big_d);
        InnerMin r = inner_for_u(u, &best.params);
        if (r.value > best.value) {
          best = r;
          best_u = u;
        }
      }
    }
  }

  VariationalResult out;
  out.value = best.value;
  out.argmin = best.measure;
  out.arg_scalar = best_u;
  out.restarts = cfg.multistarts;
  out.evaluations = total_evals;
  out.converged = all_converged;
  return out;
}

double gamma_u(const MixtureFunction& xi, const DiscreteMeasure& nu, double u,
               const BaseMeasure& base, const OptimizerConfig& cfg) {
  (void)xi;
  auto g = [&](double lam) { return -lam * u + psi_capital(nu, lam, base, cfg.pde); };
  return g(convex_line_min(g, cfg.golden_tol));
}

namespace {

// sup over h' of hat(h') - (s/2) xi*(2(h'-h)/s) on [h, h + s xi'(D)/2 + 1]:
// coarse scan, then golden section around the best cell.
template <class Hat>
std::pair<double, double> outer_sup(Hat&& hat, const MixtureFunction& xi, double s, double h,
                                    double big_d, double golden_tol, bool* edge) {
  const double hi = h + 0.5 * s * xi.xi_prime(big_d) + 1.0;
  auto m = [&](double hp) { return hat(hp) - 0.5 * s * xi.xi_star(2.0 * (hp - h) / s); };
  const int n_scan = 13;
  double best_hp = h, best_val = -std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < n_scan; ++i) {
    const double hp = h + (hi - h) * i / (n_scan - 1);
    const double v = m(hp);
    if (v > best_val) {
      best_val = v;
      best_hp = hp;
      best_i = i;
    }
  }
  const double cell = (hi - h) / (n_scan - 1);
  const double lo_b = std::max(h, best_hp - cell), hi_b = std::min(hi, best_hp + cell);
  const double hp_star = golden_section_min([&](double hp) { return -m(hp); }, lo_b, hi_b,
                                            golden_tol);
  if (edge) *edge = hp_star - h < 2.0 * golden_tol || hi - hp_star < 2.0 * golden_tol;
  if (best_i == 0 || best_i == n_scan - 1) {
    // scan maximum on the boundary counts as an edge hit too
    if (edge && m(best_hp) > m(hp_star)) *edge = true;
  }
  return {std::max(m(hp_star), best_val), m(hp_star) >= best_val ? hp_star : best_hp};
}

}  // namespace

VariationalResult theorem2_value(const MixtureFunction& xi, const DiscreteMeasure& mu, double s,
                                 double t, double h, const BaseMeasure& base,
                                 const OptimizerConfig& cfg) {
  if (!(s > 0.0 && t > 0.0))
    throw std::invalid_argument("theorem2_value: s and t must be > 0");
  PsiHat inner(xi, mu, t, base, cfg);
  bool edge = false;
  const auto [value, hp_star] = outer_sup([&](double hp) { return inner.eval(hp).value; }, xi, s,
                                          h, base.D(), cfg.golden_tol, &edge);
  const InnerMin at_best = inner.eval(hp_star);
  VariationalResult out;
  out.value = value;
  out.argmin = at_best.measure;
  out.arg_scalar = hp_star;
  out.restarts = cfg.multistarts;
  out.evaluations = inner.total_evaluations();
  out.converged = at_best.converged && !edge;
  out.bracket_edge = edge;
  return out;
}

FGrid theorem2_grid(const MixtureFunction& xi, const DiscreteMeasure& mu, double t,
                    const BaseMeasure& base, const OptimizerConfig& cfg,
                    const std::vector<double>& s_values, const std::vector<double>& h_values) {
  if (s_values.empty() || h_values.empty())
    throw std::invalid_argument("theorem2_grid: empty grid");
  for (double s : s_values)
    if (!(s > 0.0)) throw std::invalid_argument("theorem2_grid: s values must be > 0");

  const double h_min = *std::min_element(h_values.begin(), h_values.end());
  const double h_max = *std::max_element(h_values.begin(), h_values.end());
  const double s_max = *std::max_element(s_values.begin(), s_values.end());
  const double hp_lo = h_min, hp_hi = h_max + 0.5 * s_max * xi.xi_prime(base.D()) + 1.0;

  // tabulate the inner infimum once; the per-point supremum then runs on the
  // cubic interpolant of the table
  const int n_tab = 41;
  const double step = (hp_hi - hp_lo) / (n_tab - 1);
  PsiHat inner(xi, mu, t, base, cfg);
  std::vector<double> table(n_tab);
  for (int i = 0; i < n_tab; ++i) table[i] = inner.eval(hp_lo + step * i).value;
  const UniformCubicGrid hat(hp_lo, step, table);

  FGrid grid;
  grid.s_values = s_values;
  grid.h_values = h_values;
  grid.f.assign(s_values.size(), std::vector<double>(h_values.size(), 0.0));
  for (std::size_t i = 0; i < s_values.size(); ++i)
    for (std::size_t j = 0; j < h_values.size(); ++j)
      grid.f[i][j] = outer_sup(hat, xi, s_values[i], h_values[j], base.D(), cfg.golden_tol,
                               nullptr)
                         .first;
  return grid;
}

HjCheckResult hj_check(const FGrid& grid, const MixtureFunction& xi, double flag_tol) {
  const std::size_t ns = grid.s_values.size(), nh = grid.h_values.size();
  if (ns < 3 || nh < 3) throw std::invalid_argument("hj_check: need at least a 3x3 grid");
  const double ds = grid.s_values[1] - grid.s_values[0];
  const double dh = grid.h_values[1] - grid.h_values[0];
  HjCheckResult out;
  out.flag_tol = flag_tol > 0.0 ? flag_tol : 5.0 * std::max(ds, dh);
  out.residual.assign(ns, std::vector<double>(nh, std::numeric_limits<double>::quiet_NaN()));
  for (std::size_t i = 1; i + 1 < ns; ++i) {
    for (std::size_t j = 1; j + 1 < nh; ++j) {
      const double fs = (grid.f[i + 1][j] - grid.f[i - 1][j]) / (2.0 * ds);
      const double fh = (grid.f[i][j + 1] - grid.f[i][j - 1]) / (2.0 * dh);
      const double r = 2.0 * fs - xi.xi(fh);
      out.residual[i][j] = r;
      out.max_abs_interior = std::max(out.max_abs_interior, std::abs(r));
      if (std::abs(r) > out.flag_tol) out.flagged.emplace_back(static_cast<int>(i),
                                                               static_cast<int>(j));
    }
  }
  return out;
}

}  // namespace spinfe
