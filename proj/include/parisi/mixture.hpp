#pragma once

#include <stdexcept>
#include <vector>

namespace parisi {

class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

struct Term {
  double coef;
  int exponent;
};

// xi(x) = lambda x^p + (1 - lambda) x^s
class Mixture {
public:
  Mixture(int p, int s, double lambda);

  int p() const { return p_; }
  int s() const { return s_; }
  double lambda() const { return lambda_; }
  bool is_pure() const { return terms_.size() == 1; }
  // Exponent of the surviving term of a pure model, 0 for a genuine mixture.
  int effective_exponent() const { return is_pure() ? terms_[0].exponent : 0; }
  const std::vector<Term>& terms() const { return terms_; }

  double xi(double x) const { return deriv(x, 0); }
  double deriv(double x, int order) const;

  // Exact divided differences at 1, free of cancellation as x -> 1.
  // (xi'(1) - xi'(x)) / (1 - x)
  double slope_gap(double x) const;
  // (1 - xi(x) - xi'(x)(1 - x)) / (1 - x)^2
  double value_gap(double x) const;
  // (xi'(1) - xi'(x) - xi''(x)(1 - x)) / (1 - x)^2
  double curvature_gap(double x) const;
  // (xi'(1) x - xi'(x)) / (x (1 - x))
  double secant_gap(double x) const;

  double d1_at_one() const { return d1_one_; }
  double d2_at_one() const { return d2_one_; }

private:
  int p_;
  int s_;
  double lambda_;
  std::vector<Term> terms_;
  double d1_one_ = 0.0;
  double d2_one_ = 0.0;
};

Mixture make_mixture(int p, int s, double lambda);
double xi_deriv(const Mixture& m, double x, int order);

double ipow(double x, int n);

}  // namespace parisi
