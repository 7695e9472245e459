#pragma once

#include <vector>

namespace spinfe {

// Nodes and weights of the n-point Gauss-Hermite rule for the weight
// exp(-x^2):  integral f(x) exp(-x^2) dx ~= sum_i w_i f(x_i).
// Nodes are ascending.  Expectations against a standard Gaussian are
// E f(G) = sum_i (w_i / sqrt(pi)) f(sqrt(2) x_i).
class GaussHermite {
 public:
  explicit GaussHermite(int order);

  int order() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  // Abscissas sqrt(2) x_i and probabilist weights w_i / sqrt(pi), so that
  // E f(G) ~= sum_i pw_i f(gx_i).
  const std::vector<double>& gauss_points() const { return gauss_points_; }
  const std::vector<double>& prob_weights() const { return prob_weights_; }

  template <class F>
  double expect(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < gauss_points_.size(); ++i)
      acc += prob_weights_[i] * f(gauss_points_[i]);
    return acc;
  }

 private:
  std::vector<double> nodes_, weights_;
  std::vector<double> gauss_points_, prob_weights_;
};

}  // namespace spinfe
