#include "spinfe/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinfe/errors.hpp"

namespace spinfe {

namespace {

double ipow(double x, int p) {
  double acc = 1.0;
  while (p > 0) {
    if (p & 1) acc *= x;
    x *= x;
    p >>= 1;
  }
  return acc;
}

}  // namespace

MixtureFunction::MixtureFunction(std::vector<Term> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw std::invalid_argument("MixtureFunction: no terms");
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.p < b.p; });
  std::vector<Term> merged;
  for (const Term& t : terms_) {
    if (t.p < 2) throw std::invalid_argument("MixtureFunction: exponents must be >= 2");
    if (t.beta_sq < 0.0) throw std::invalid_argument("MixtureFunction: coefficients must be >= 0");
    if (!merged.empty() && merged.back().p == t.p)
      merged.back().beta_sq += t.beta_sq;
    else
      merged.push_back(t);
  }
  terms_ = std::move(merged);
  bool any = false;
  for (const Term& t : terms_) any = any || t.beta_sq > 0.0;
  if (!any) throw std::invalid_argument("MixtureFunction: all coefficients are zero");
}

MixtureFunction MixtureFunction::sk(double beta_sq) { return pure(2, beta_sq); }

MixtureFunction MixtureFunction::pure(int p, double beta_sq) {
  return MixtureFunction({{p, beta_sq}});
}

// Horner over the sparse exponent set, highest power first.
double MixtureFunction::xi(double r) const {
  double acc = 0.0;
  int prev_p = 0;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (prev_p != 0) acc *= ipow(r, prev_p - it->p);
    acc += it->beta_sq;
    prev_p = it->p;
  }
  return acc * ipow(r, prev_p);
}

double MixtureFunction::xi_prime(double r) const {
  double acc = 0.0;
  int prev_p = 0;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (prev_p != 0) acc *= ipow(r, prev_p - it->p);
    acc += static_cast<double>(it->p) * it->beta_sq;
    prev_p = it->p;
  }
  return acc * ipow(r, prev_p - 1);
}

double MixtureFunction::xi_second(double r) const {
  double acc = 0.0;
  int prev_p = 0;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (prev_p != 0) acc *= ipow(r, prev_p - it->p);
    acc += static_cast<double>(it->p) * (it->p - 1.0) * it->beta_sq;
    prev_p = it->p;
  }
  return acc * ipow(r, prev_p - 2);
}

double MixtureFunction::theta(double r) const {
  if (r < 0.0) throw std::domain_error("theta: r must be >= 0");
  return r * xi_prime(r) - xi(r);
}

double MixtureFunction::xi_star(double s) const {
  if (s <= 0.0) return 0.0;
  const double r = invert_xi_prime(s);
  return r * s - xi(r);
}

double MixtureFunction::xi_star_prime(double s) const {
  if (s < 0.0) throw std::domain_error("xi_star_prime: s must be >= 0");
  if (s == 0.0) return 0.0;
  return invert_xi_prime(s);
}

// Root of xi'(r) = s for s > 0.  xi' is strictly increasing on R_+, so a
// geometric search brackets the root and Newton with bisection fallback
// cannot escape it.
double MixtureFunction::invert_xi_prime(double s) const {
  double hi = 1.0;
  int grow = 0;
  while (xi_prime(hi) < s) {
    hi *= 2.0;
    if (++grow > 1100) throw NumericalError("xi_star: bracket growth failed");
  }
  double lo = 0.0;
  double r = hi;
  const double tol = 1e-12 * std::max(1.0, s);
  for (int it = 0; it < 100; ++it) {
    const double f = xi_prime(r) - s;
    if (std::abs(f) <= tol) return r;
    if (f > 0.0)
      hi = r;
    else
      lo = r;
    const double d = xi_second(r);
    double next = d > 0.0 ? r - f / d : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    r = next;
  }
  throw NumericalError("xi_star: Newton did not converge");
}

}  // namespace spinfe
