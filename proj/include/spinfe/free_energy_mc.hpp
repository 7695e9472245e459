#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "spinfe/base_measure.hpp"
#include "spinfe/cascade.hpp"
#include "spinfe/discrete_measure.hpp"
#include "spinfe/mixture.hpp"

namespace spinfe {

struct ModelParams {
  int n;                     // number of sites N
  MixtureFunction mixture;
  BaseMeasure base;
  DiscreteMeasure mu;
  double t = 1.0;
  double s = 0.0;
  double h = 0.0;
};

// Exact enumeration of the configuration set support(P1)^N together with the
// Cholesky factor of the disorder covariance N xi(sigma.tau/N) over it, so
// the only stochastic error in the estimators is the disorder and cascade
// average.  Enumeration is limited to 2e5 configurations.
class ModelInstance {
 public:
  explicit ModelInstance(ModelParams params);

  const ModelParams& params() const { return params_; }
  int n_configs() const { return static_cast<int>(spins_.rows()); }
  const Eigen::MatrixXd& spins() const { return spins_; }
  const std::vector<double>& log_reference() const { return log_pn_; }
  const std::vector<double>& norm_sq() const { return norm_sq_; }

  // One disorder draw H over the enumerated configurations.
  Eigen::VectorXd sample_disorder(std::uint64_t seed, std::uint64_t counter) const;

 private:
  ModelParams params_;
  Eigen::MatrixXd spins_;  // n_configs x N
  Eigen::MatrixXd chol_;   // lower triangle holds L with L L^T = covariance
  std::vector<double> log_pn_, norm_sq_;
};

struct FreeEnergyEstimate {
  double mean;
  double se;
  int n_replications;
  int n_sites;
  ModelParams params;  // echo
};

// F_N(t,mu): disorder/cascade Monte Carlo of the enriched free energy.
// Each replication pairs a disorder draw with its negation (antithetic), so
// the reported stderr reflects independent replications.
FreeEnergyEstimate estimate_F(const ModelInstance& model, int n_replications, int branching,
                              std::uint64_t seed);

// F_N(s,t,mu,h): the two-parameter extension with exponent term
// -N(t-s) xi(|sigma|^2/N)/2 + h |sigma|^2.
FreeEnergyEstimate estimate_F_sth(const ModelInstance& model, int n_replications, int branching,
                                  std::uint64_t seed);

// p_N^eps(u): the estimator without the xi and mu-top correction terms,
// restricted to configurations with |sigma|^2/N in (u-eps, u+eps).
FreeEnergyEstimate estimate_p_eps(const ModelInstance& model, double u, double eps,
                                  int n_replications, int branching, std::uint64_t seed);

struct HjResidualReport {
  double residual = 0.0;  // E<xi(R12)> - sum_l p_l xi(E<R12 1_l>/p_l)
  double residual_se = 0.0;
  double xi_overlap_mean = 0.0;  // E<xi(R12)>
  double xi_overlap_se = 0.0;
  std::vector<double> level_probs;          // p_l, exact from mu
  std::vector<double> level_overlap_means;  // E<R12 1{wedge=l}>
  int n_replications = 0;
  bool exact_pairs = false;  // replica pairs summed exactly instead of sampled
};

// Right side of the Hamilton-Jacobi error identity, estimated from Gibbs
// expectations of replica pairs at parameters (t, mu).
HjResidualReport hj_residual(const ModelInstance& model, int n_replications, int branching,
                             std::uint64_t seed, int n_pairs = 4000);

struct DerivativeReport {
  double fd_dh, gibbs_dh;    // dF/dh: finite difference vs <|sigma|^2/N>
  double fd_dh2, gibbs_dh2;  // d2F/dh2 vs N Var(|sigma|^2/N)
  double fd_ds, gibbs_ds;    // dF/ds vs <xi(|sigma|^2/N)>/2
  double hj_gap;             // |2 dF/ds - xi(dF/dh)|
  double hj_bound;           // xi'(D) sqrt(d2F/dh2 / N)
};

// Derivative identities on a single fixed disorder and cascade draw.
DerivativeReport h_derivative_checks(const ModelInstance& model, double dh, std::uint64_t seed);

}  // namespace spinfe
