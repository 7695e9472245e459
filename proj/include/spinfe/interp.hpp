#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace spinfe {

// Function values on a uniform grid with 4-point cubic interpolation inside
// and linear extrapolation beyond the edges.
class UniformCubicGrid {
 public:
  UniformCubicGrid() = default;
  UniformCubicGrid(double x0, double step, std::vector<double> values)
      : x0_(x0), step_(step), values_(std::move(values)) {}

  double operator()(double x) const {
    const std::size_t n = values_.size();
    if (x <= x0_ + step_) {
      const double slope = (values_[1] - values_[0]) / step_;
      return values_[0] + slope * (x - x0_);
    }
    if (x >= x0_ + step_ * static_cast<double>(n - 2)) {
      const double slope = (values_[n - 1] - values_[n - 2]) / step_;
      return values_[n - 1] + slope * (x - (x0_ + step_ * static_cast<double>(n - 1)));
    }
    std::size_t k = static_cast<std::size_t>((x - x0_) / step_);
    k = std::min(std::max<std::size_t>(k, 1), n - 3);
    const double u = (x - (x0_ + step_ * static_cast<double>(k))) / step_;
    const double f0 = values_[k - 1], f1 = values_[k], f2 = values_[k + 1], f3 = values_[k + 2];
    return f1 + 0.5 * u * (f2 - f0 + u * (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3 +
                                          u * (3.0 * (f1 - f2) + f3 - f0)));
  }

 private:
  double x0_ = 0.0, step_ = 1.0;
  std::vector<double> values_{0.0, 0.0};
};

}  // namespace spinfe
