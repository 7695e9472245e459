#include "spinfe/base_measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spinfe {

BaseMeasure::BaseMeasure(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("BaseMeasure: empty support");
  std::sort(points_.begin(), points_.end(),
            [](const Point& a, const Point& b) { return a.value < b.value; });
  double total = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].prob > 0.0))
      throw std::invalid_argument("BaseMeasure: probabilities must be > 0");
    if (i > 0 && !(points_[i].value > points_[i - 1].value))
      throw std::invalid_argument("BaseMeasure: support points must be distinct");
    total += points_[i].prob;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("BaseMeasure: probabilities must sum to 1");
  d_ = big_d_ = points_[0].value * points_[0].value;
  for (const Point& p : points_) {
    const double sq = p.value * p.value;
    d_ = std::min(d_, sq);
    big_d_ = std::max(big_d_, sq);
  }
}

BaseMeasure BaseMeasure::ising() { return BaseMeasure({{-1.0, 0.5}, {1.0, 0.5}}); }

BaseMeasure BaseMeasure::uniform(const std::vector<double>& values) {
  std::vector<Point> pts;
  pts.reserve(values.size());
  const double p = 1.0 / static_cast<double>(values.size());
  for (double v : values) pts.push_back({v, p});
  return BaseMeasure(std::move(pts));
}

BaseMeasure BaseMeasure::tilted(double h) const {
  std::vector<Point> pts = points_;
  double total = 0.0;
  for (Point& p : pts) {
    p.prob *= std::exp(h * p.value * p.value);
    total += p.prob;
  }
  for (Point& p : pts) p.prob /= total;
  return BaseMeasure(std::move(pts));
}

double BaseMeasure::log_tilt_mass(double h) const {
  double total = 0.0;
  for (const Point& p : points_) total += p.prob * std::exp(h * p.value * p.value);
  return std::log(total);
}

}  // namespace spinfe
