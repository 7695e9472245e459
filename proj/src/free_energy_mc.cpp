#include "spinfe/free_energy_mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinfe/errors.hpp"
#include "spinfe/rng.hpp"

namespace spinfe {

namespace {

constexpr long kMaxConfigs = 200000;
constexpr long kMaxPairStates = 5000000;  // (config, leaf) states for exact weights

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

enum class ExponentKind { F, Fsth, PEps };

// Per-configuration exponent without the disorder term:
//   log P_N(sigma) - N(t - s) xi(m)/2 - mu^{-1}(1)|sigma|^2/2 + h|sigma|^2
// with (s,h) = (0,0) for plain F and all corrections dropped for p_N^eps.
Eigen::VectorXd base_exponent(const ModelInstance& model, ExponentKind kind) {
  const ModelParams& p = model.params();
  const double s_eff = kind == ExponentKind::Fsth ? p.s : 0.0;
  const double h_eff = kind == ExponentKind::Fsth ? p.h : 0.0;
  const int n_cfg = model.n_configs();
  Eigen::VectorXd a(n_cfg);
  for (int i = 0; i < n_cfg; ++i) {
    const double nsq = model.norm_sq()[i];
    double v = model.log_reference()[i];
    if (kind != ExponentKind::PEps) {
      v -= 0.5 * p.n * (p.t - s_eff) * p.mixture.xi(nsq / p.n);
      v -= 0.5 * p.mu.top() * nsq;
      v += h_eff * nsq;
    }
    a[i] = v;
  }
  return a;
}

// z-field matrix, one independent hierarchical field per site (leaves x N).
Eigen::MatrixXd sample_z_fields(const CascadeTree& tree, const DiscreteMeasure& mu, int n_sites,
                                std::uint64_t seed, std::uint64_t counter) {
  HierGaussianSpec spec;
  for (const auto& a : mu.atoms()) spec.levels.push_back(a.location);
  Eigen::MatrixXd z(tree.leaves(), n_sites);
  for (int i = 0; i < n_sites; ++i) {
    const std::vector<double> f = sample_field(tree, spec, substream(seed, counter + i));
    for (std::size_t l = 0; l < f.size(); ++l) z(static_cast<Eigen::Index>(l), i) = f[l];
  }
  return z;
}

// (1/N) log of the double sum over (sigma, alpha) given one disorder draw.
double double_sum_value(const ModelInstance& model, const Eigen::VectorXd& a_base,
                        const std::vector<int>& rows, const Eigen::VectorXd& disorder,
                        const CascadeTree& tree, const Eigen::MatrixXd& z) {
  const ModelParams& p = model.params();
  const double sqrt_t = std::sqrt(p.t);
  const Eigen::Index n_rows = static_cast<Eigen::Index>(rows.size());

  Eigen::VectorXd a(n_rows);
  Eigen::MatrixXd s(n_rows, p.n);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    a[i] = a_base[rows[i]] + sqrt_t * disorder[rows[i]];
    s.row(i) = model.spins().row(rows[i]);
  }

  const Eigen::Index n_leaves = static_cast<Eigen::Index>(tree.leaves());
  Eigen::VectorXd leaf_vals(n_leaves);
  constexpr Eigen::Index kBlock = 256;
  for (Eigen::Index start = 0; start < n_leaves; start += kBlock) {
    const Eigen::Index width = std::min(kBlock, n_leaves - start);
    const Eigen::MatrixXd e = s * z.middleRows(start, width).transpose();
    for (Eigen::Index j = 0; j < width; ++j)
      leaf_vals[start + j] = tree.leaf_log_weights[start + j] + log_sum_exp(a + e.col(j));
  }
  return log_sum_exp(leaf_vals) / p.n;
}

FreeEnergyEstimate estimate_generic(const ModelInstance& model, ExponentKind kind,
                                    const std::vector<int>& rows, int n_replications,
                                    int branching, std::uint64_t seed) {
  const ModelParams& p = model.params();
  const Eigen::VectorXd a_base = base_exponent(model, kind);
  const std::vector<double> zetas = p.mu.interior_levels();

  RunningStat stat;
  for (int r = 0; r < n_replications; ++r) {
    const std::uint64_t c = static_cast<std::uint64_t>(r) * (p.n + 2);
    const Eigen::VectorXd disorder = model.sample_disorder(seed, c);
    const CascadeTree tree = sample_cascade(zetas, branching, substream(seed, c + 1));
    const Eigen::MatrixXd z = sample_z_fields(tree, p.mu, p.n, seed, c + 2);
    // antithetic disorder pair inside one replication
    const double v_plus = double_sum_value(model, a_base, rows, disorder, tree, z);
    const double v_minus = double_sum_value(model, a_base, rows, -disorder, tree, z);
    stat.add(0.5 * (v_plus + v_minus));
  }
  return {stat.mean(), stat.standard_error(), static_cast<int>(stat.count()), p.n, p};
}

std::vector<int> all_rows(const ModelInstance& model) {
  std::vector<int> rows(model.n_configs());
  for (int i = 0; i < model.n_configs(); ++i) rows[i] = i;
  return rows;
}

}  // namespace

ModelInstance::ModelInstance(ModelParams params) : params_(std::move(params)) {
  const int n = params_.n;
  if (n < 1) throw std::invalid_argument("ModelInstance: N must be >= 1");
  const auto& support = params_.base.support();
  const long b = static_cast<long>(support.size());
  long n_cfg = 1;
  for (int i = 0; i < n; ++i) {
    n_cfg *= b;
    if (n_cfg > kMaxConfigs)
      throw std::invalid_argument("ModelInstance: configuration set exceeds the enumeration cap");
  }

  spins_.resize(n_cfg, n);
  log_pn_.resize(n_cfg);
  norm_sq_.resize(n_cfg);
  std::vector<int> digits(n, 0);
  for (long c = 0; c < n_cfg; ++c) {
    double logp = 0.0, nsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto& pt = support[digits[i]];
      spins_(c, i) = pt.value;
      logp += std::log(pt.prob);
      nsq += pt.value * pt.value;
    }
    log_pn_[c] = logp;
    norm_sq_[c] = nsq;
    for (int i = n - 1; i >= 0; --i) {
      if (++digits[i] < static_cast<int>(b)) break;
      digits[i] = 0;
    }
  }

  auto build_cov = [&](double jitter) {
    Eigen::MatrixXd cov = (spins_ * spins_.transpose()) / static_cast<double>(n);
    for (long i = 0; i < n_cfg; ++i)
      for (long j = 0; j < n_cfg; ++j) cov(i, j) = n * params_.mixture.xi(cov(i, j));
    cov.diagonal().array() += jitter;
    return cov;
  };
  chol_ = build_cov(0.0);
  {
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(chol_);
    if (llt.info() != Eigen::Success) {
      chol_ = build_cov(1e-10);
      Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> retry(chol_);
      if (retry.info() != Eigen::Success)
        throw NumericalError("ModelInstance: covariance Cholesky failed beyond jitter");
    }
  }
}

Eigen::VectorXd ModelInstance::sample_disorder(std::uint64_t seed, std::uint64_t counter) const {
  auto rng = make_stream(seed, counter);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd g(n_configs());
  for (int i = 0; i < n_configs(); ++i) g[i] = gauss(rng);
  return chol_.triangularView<Eigen::Lower>() * g;
}

FreeEnergyEstimate estimate_F(const ModelInstance& model, int n_replications, int branching,
                              std::uint64_t seed) {
  return estimate_generic(model, ExponentKind::F, all_rows(model), n_replications, branching,
                          seed);
}

FreeEnergyEstimate estimate_F_sth(const ModelInstance& model, int n_replications, int branching,
                                  std::uint64_t seed) {
  return estimate_generic(model, ExponentKind::Fsth, all_rows(model), n_replications, branching,
                          seed);
}

FreeEnergyEstimate estimate_p_eps(const ModelInstance& model, double u, double eps,
                                  int n_replications, int branching, std::uint64_t seed) {
  std::vector<int> rows;
  for (int i = 0; i < model.n_configs(); ++i) {
    const double m = model.norm_sq()[i] / model.params().n;
    if (m > u - eps && m < u + eps) rows.push_back(i);
  }
  if (rows.empty())
    throw std::invalid_argument("estimate_p_eps: no configuration lies in the band");
  return estimate_generic(model, ExponentKind::PEps, rows, n_replications, branching, seed);
}

HjResidualReport hj_residual(const ModelInstance& model, int n_replications, int branching,
                             std::uint64_t seed, int n_pairs) {
  const ModelParams& p = model.params();
  const int n_cfg = model.n_configs();
  const Eigen::VectorXd a_base = base_exponent(model, ExponentKind::F);
  const std::vector<double> zetas = p.mu.interior_levels();
  const std::size_t n_levels = p.mu.size();
  const double sqrt_t = std::sqrt(p.t);

  HjResidualReport report;
  for (const auto& atom : p.mu.atoms()) report.level_probs.push_back(atom.weight);
  report.level_overlap_means.assign(n_levels, 0.0);

  const bool exact = n_levels == 1 && n_cfg <= 2048;
  report.exact_pairs = exact;

  RunningStat stat_residual, stat_xi;
  std::vector<RunningStat> stat_level(n_levels);

  Eigen::MatrixXd overlap, xi_overlap;
  if (exact) {
    overlap = (model.spins() * model.spins().transpose()) / static_cast<double>(p.n);
    xi_overlap = overlap.unaryExpr([&](double r) { return p.mixture.xi(r); });
  }

  for (int r = 0; r < n_replications; ++r) {
    const std::uint64_t c = static_cast<std::uint64_t>(r) * (p.n + 4);
    const Eigen::VectorXd disorder = model.sample_disorder(seed, c);
    const CascadeTree tree = sample_cascade(zetas, branching, substream(seed, c + 1));
    const Eigen::MatrixXd z = sample_z_fields(tree, p.mu, p.n, seed, c + 2);
    const std::uint64_t pair_counter = c + 2 + static_cast<std::uint64_t>(p.n);

    if (exact) {
      Eigen::VectorXd logw = a_base + sqrt_t * disorder + model.spins() * z.row(0).transpose();
      logw.array() -= log_sum_exp(logw);
      const Eigen::VectorXd w = logw.array().exp();
      const double xi_mean = w.dot(xi_overlap * w);
      const double r_mean = w.dot(overlap * w);
      stat_xi.add(xi_mean);
      stat_level[0].add(r_mean);
      stat_residual.add(xi_mean - p.mixture.xi(r_mean));
      continue;
    }

    const long n_states = static_cast<long>(n_cfg) * static_cast<long>(tree.leaves());
    if (n_states > kMaxPairStates)
      throw std::invalid_argument("hj_residual: state space too large for pair sampling");
    // full Gibbs weights over (sigma, alpha), then iid pair draws from them
    Eigen::VectorXd logw(n_states);
    const Eigen::MatrixXd field = model.spins() * z.transpose();  // n_cfg x leaves
    for (long l = 0; l < static_cast<long>(tree.leaves()); ++l)
      logw.segment(l * n_cfg, n_cfg) =
          a_base + sqrt_t * disorder + field.col(l) +
          Eigen::VectorXd::Constant(n_cfg, tree.leaf_log_weights[l]);
    logw.array() -= log_sum_exp(logw);
    std::vector<double> cum(n_states);
    double acc = 0.0;
    for (long i = 0; i < n_states; ++i) {
      acc += std::exp(logw[i]);
      cum[i] = acc;
    }
    auto rng = make_stream(seed, pair_counter);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto draw = [&]() {
      const double u = unif(rng) * acc;
      return static_cast<long>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    };
    double xi_sum = 0.0;
    std::vector<double> level_sum(n_levels, 0.0);
    for (int q = 0; q < n_pairs; ++q) {
      const long i1 = draw(), i2 = draw();
      const long c1 = i1 % n_cfg, c2 = i2 % n_cfg;
      const std::size_t l1 = static_cast<std::size_t>(i1 / n_cfg),
                        l2 = static_cast<std::size_t>(i2 / n_cfg);
      const double olap = model.spins().row(c1).dot(model.spins().row(c2)) / p.n;
      xi_sum += p.mixture.xi(olap);
      level_sum[static_cast<std::size_t>(tree.overlap_depth(l1, l2))] += olap;
    }
    const double xi_mean = xi_sum / n_pairs;
    double residual = xi_mean;
    for (std::size_t l = 0; l < n_levels; ++l) {
      const double m_l = level_sum[l] / n_pairs;
      stat_level[l].add(m_l);
      residual -= report.level_probs[l] * p.mixture.xi(m_l / report.level_probs[l]);
    }
    stat_xi.add(xi_mean);
    stat_residual.add(residual);
  }

  report.residual = stat_residual.mean();
  report.residual_se = stat_residual.standard_error();
  report.xi_overlap_mean = stat_xi.mean();
  report.xi_overlap_se = stat_xi.standard_error();
  for (std::size_t l = 0; l < n_levels; ++l)
    report.level_overlap_means[l] = stat_level[l].mean();
  report.n_replications = static_cast<int>(stat_residual.count());
  return report;
}

DerivativeReport h_derivative_checks(const ModelInstance& model, double dh, std::uint64_t seed) {
  const ModelParams& p = model.params();
  const int n_cfg = model.n_configs();
  const Eigen::VectorXd disorder = model.sample_disorder(seed, 0);
  const std::vector<double> zetas = p.mu.interior_levels();
  const CascadeTree tree = sample_cascade(zetas, 100, substream(seed, 1));
  const Eigen::MatrixXd z = sample_z_fields(tree, p.mu, p.n, seed, 2);

  const long n_states = static_cast<long>(n_cfg) * static_cast<long>(tree.leaves());
  if (n_states > kMaxPairStates)
    throw std::invalid_argument("h_derivative_checks: state space too large");

  const double sqrt_t = std::sqrt(p.t);
  const Eigen::MatrixXd field = model.spins() * z.transpose();

  // log weights over (sigma, alpha) at displaced (s', h'), one fixed draw
  auto log_weights = [&](double s_val, double h_val) {
    Eigen::VectorXd logw(n_states);
    for (long l = 0; l < static_cast<long>(tree.leaves()); ++l) {
      for (int i = 0; i < n_cfg; ++i) {
        const double nsq = model.norm_sq()[i];
        logw[l * n_cfg + i] = model.log_reference()[i] + sqrt_t * disorder[i] + field(i, l) -
                              0.5 * p.n * (p.t - s_val) * p.mixture.xi(nsq / p.n) -
                              0.5 * p.mu.top() * nsq + h_val * nsq +
                              tree.leaf_log_weights[static_cast<std::size_t>(l)];
      }
    }
    return logw;
  };
  auto fe = [&](double s_val, double h_val) {
    return log_sum_exp(log_weights(s_val, h_val)) / p.n;
  };

  DerivativeReport rep{};
  const double f0 = fe(p.s, p.h);
  const double f_hp = fe(p.s, p.h + dh), f_hm = fe(p.s, p.h - dh);
  const double f_sp = fe(p.s + dh, p.h), f_sm = fe(p.s - dh, p.h);
  rep.fd_dh = (f_hp - f_hm) / (2.0 * dh);
  rep.fd_dh2 = (f_hp - 2.0 * f0 + f_hm) / (dh * dh);
  rep.fd_ds = (f_sp - f_sm) / (2.0 * dh);

  Eigen::VectorXd logw = log_weights(p.s, p.h);
  logw.array() -= log_sum_exp(logw);
  double m1 = 0.0, m2 = 0.0, xi_m = 0.0;
  for (long i = 0; i < n_states; ++i) {
    const double w = std::exp(logw[i]);
    const double m = model.norm_sq()[i % n_cfg] / p.n;
    m1 += w * m;
    m2 += w * m * m;
    xi_m += w * p.mixture.xi(m);
  }
  rep.gibbs_dh = m1;
  rep.gibbs_dh2 = p.n * (m2 - m1 * m1);
  rep.gibbs_ds = 0.5 * xi_m;
  rep.hj_gap = std::abs(2.0 * rep.gibbs_ds - p.mixture.xi(rep.gibbs_dh));
  rep.hj_bound = p.mixture.xi_prime(p.base.D()) * std::sqrt(rep.gibbs_dh2 / p.n);
  return rep;
}

}  // namespace spinfe
