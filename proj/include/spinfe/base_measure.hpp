#pragma once

#include <vector>

namespace spinfe {

// Finitely supported single-spin law P1.  d and D are the smallest and
// largest points of the support of sigma^2.
class BaseMeasure {
 public:
  struct Point {
    double value;
    double prob;
  };

  explicit BaseMeasure(std::vector<Point> points);

  static BaseMeasure ising();                                 // {-1,+1}, equal weights
  static BaseMeasure uniform(const std::vector<double>& values);

  const std::vector<Point>& support() const { return points_; }
  double d() const { return d_; }
  double D() const { return big_d_; }

  // Reweighted by exp(h sigma^2) and renormalized.
  BaseMeasure tilted(double h) const;

  // log of the normalization integral exp(h sigma^2) dP1.
  double log_tilt_mass(double h) const;

 private:
  std::vector<Point> points_;  // ascending values
  double d_ = 0.0, big_d_ = 0.0;
};

}  // namespace spinfe
