#pragma once

#include <vector>

namespace spinfe {

// Mixture function xi(r) = sum_p beta_p^2 r^p over a finite set of integer
// exponents p >= 2, with beta_p^2 >= 0 and at least one positive term.
// Supplies the derivatives, theta(r) = r xi'(r) - xi(r), and the restricted
// Legendre transform xi*(s) = sup_{r>=0} (rs - xi(r)), which vanishes on
// s <= 0 and satisfies xi*(xi'(r)) = theta(r).
class MixtureFunction {
 public:
  struct Term {
    int p;
    double beta_sq;
  };

  explicit MixtureFunction(std::vector<Term> terms);

  // Pure p-spin helpers.
  static MixtureFunction sk(double beta_sq = 1.0);  // beta^2 r^2
  static MixtureFunction pure(int p, double beta_sq);

  const std::vector<Term>& terms() const { return terms_; }

  double xi(double r) const;
  double xi_prime(double r) const;
  double xi_second(double r) const;

  // theta(r) = r xi'(r) - xi(r); requires r >= 0.
  double theta(double r) const;

  // xi*(s); exact zero for s <= 0, otherwise solved through the unique root
  // of xi'(r) = s (safeguarded Newton).
  double xi_star(double s) const;

  // d/ds xi*(s) = (xi')^{-1}(s) for s >= 0.
  double xi_star_prime(double s) const;

 private:
  double invert_xi_prime(double s) const;

  std::vector<Term> terms_;  // ascending p, duplicate exponents merged
};

}  // namespace spinfe
