#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace spinfe {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Standard downhill simplex (reflection 1, expansion 2, contractions 0.5,
// shrink 0.5) started from x0 with per-coordinate initial step.
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, double step, int max_iter,
                             double f_tol) {
  const std::size_t n = x0.size();
  struct Vertex {
    std::vector<double> x;
    double fx;
  };
  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };
  simplex.push_back({x0, eval(x0)});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = x0;
    x[i] += step;
    simplex.push_back({x, eval(x)});
  }
  auto by_value = [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; };
  std::sort(simplex.begin(), simplex.end(), by_value);

  bool converged = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (simplex.back().fx - simplex.front().fx <=
        f_tol * (1.0 + std::abs(simplex.front().fx))) {
      converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i] / n;
    auto blend = [&](double c) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i)
        x[i] = centroid[i] + c * (centroid[i] - simplex.back().x[i]);
      return x;
    };
    const std::vector<double> xr = blend(1.0);
    const double fr = eval(xr);
    if (fr < simplex.front().fx) {
      const std::vector<double> xe = blend(2.0);
      const double fe = eval(xe);
      simplex.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < simplex[n - 1].fx) {
      simplex.back() = {xr, fr};
    } else {
      const bool outside = fr < simplex.back().fx;
      const std::vector<double> xc = blend(outside ? 0.5 : -0.5);
      const double fc = eval(xc);
      if (fc < std::min(fr, simplex.back().fx)) {
        simplex.back() = {xc, fc};
      } else {
        for (std::size_t v = 1; v <= n; ++v) {
          for (std::size_t i = 0; i < n; ++i)
            simplex[v].x[i] = 0.5 * (simplex[v].x[i] + simplex[0].x[i]);
          simplex[v].fx = eval(simplex[v].x);
        }
      }
    }
    std::sort(simplex.begin(), simplex.end(), by_value);
  }
  return {simplex.front().x, simplex.front().fx, evals, converged};
}

// Golden-section minimum of a unimodal function on [lo, hi].
template <class F>
double golden_section_min(F&& f, double lo, double hi, double tol) {
  constexpr double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Minimum of a convex function over the whole line: bracket the minimizer by
// doubling steps from 0, then golden section.  Flat functions (seen in the
// constant-|sigma|^2 case) return 0 immediately.
template <class F>
double convex_line_min(F&& f, double tol, double max_half_width = 64.0) {
  const double f0 = f(0.0);
  double lo = -1.0, hi = 1.0;
  double flo = f(lo), fhi = f(hi);
  const double scale = 1e-11 * (1.0 + std::abs(f0));
  if (std::abs(flo - f0) <= scale && std::abs(fhi - f0) <= scale) return 0.0;
  while (flo < f0 && lo > -max_half_width) {
    lo *= 2.0;
    flo = f(lo);
  }
  while (fhi < f0 && hi < max_half_width) {
    hi *= 2.0;
    fhi = f(hi);
  }
  return golden_section_min(f, lo, hi, tol);
}

}  // namespace spinfe
