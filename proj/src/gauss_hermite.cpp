#include "spinfe/gauss_hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spinfe/errors.hpp"

namespace spinfe {

// Newton iteration on the orthonormal Hermite recurrence; the classic
// construction with asymptotic initial guesses for the roots.
GaussHermite::GaussHermite(int order) {
  if (order < 1) throw std::invalid_argument("GaussHermite: order must be >= 1");
  const int n = order;
  nodes_.assign(n, 0.0);
  weights_.assign(n, 0.0);

  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  std::vector<double> roots;  // descending, largest first
  roots.reserve(m);
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * roots[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * roots[1];
    } else {
      z = 2.0 * z - roots[i - 2];
    }
    double pp = 0.0;
    bool ok = false;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) {
        ok = true;
        break;
      }
    }
    if (!ok) throw NumericalError("GaussHermite: root iteration did not converge");
    roots.push_back(z);
    nodes_[n - 1 - i] = z;
    nodes_[i] = -z;
    weights_[n - 1 - i] = 2.0 / (pp * pp);
    weights_[i] = weights_[n - 1 - i];
  }

  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  gauss_points_.resize(n);
  prob_weights_.resize(n);
  for (int i = 0; i < n; ++i) {
    gauss_points_[i] = std::numbers::sqrt2 * nodes_[i];
    prob_weights_[i] = weights_[i] * inv_sqrt_pi;
  }
}

}  // namespace spinfe
