#include "parisi/mixture.hpp"

#include <cmath>
#include <string>

namespace parisi {

double ipow(double x, int n) {
  double result = 1.0;
  double base = x;
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

namespace {

double falling(int e, int order) {
  double f = 1.0;
  for (int i = 0; i < order; ++i) f *= static_cast<double>(e - i);
  return f;
}

// sum_{j=0}^{n-1} w(j) x^j by Horner, with w(j) = 1 or j + 1.
double geometric(double x, int n) {
  double acc = 0.0;
  for (int j = n - 1; j >= 0; --j) acc = acc * x + 1.0;
  return acc;
}

double weighted_geometric(double x, int n) {
  double acc = 0.0;
  for (int j = n - 1; j >= 0; --j) acc = acc * x + static_cast<double>(j + 1);
  return acc;
}

}  // namespace

Mixture::Mixture(int p, int s, double lambda) : p_(p), s_(s), lambda_(lambda) {
  if (p < 2) throw DomainError("exponent p must be at least 2, got " + std::to_string(p));
  if (s < p) throw DomainError("exponent s must be at least p");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0,1]");
  if (p == s) {
    terms_.push_back({1.0, p});
  } else if (lambda == 1.0) {
    terms_.push_back({1.0, p});
  } else if (lambda == 0.0) {
    terms_.push_back({1.0, s});
  } else {
    terms_.push_back({lambda, p});
    terms_.push_back({1.0 - lambda, s});
  }
  d1_one_ = deriv(1.0, 1);
  d2_one_ = deriv(1.0, 2);
}

double Mixture::deriv(double x, int order) const {
  if (order < 0 || order > 4) throw DomainError("derivative order must be in 0..4");
  if (!(x >= 0.0)) throw DomainError("xi is evaluated on x >= 0 only");
  double total = 0.0;
  for (const Term& t : terms_) {
    if (order > t.exponent) continue;
    total += t.coef * falling(t.exponent, order) * ipow(x, t.exponent - order);
  }
  return total;
}

double Mixture::slope_gap(double x) const {
  double total = 0.0;
  for (const Term& t : terms_) total += t.coef * t.exponent * geometric(x, t.exponent - 1);
  return total;
}

double Mixture::value_gap(double x) const {
  double total = 0.0;
  for (const Term& t : terms_) total += t.coef * weighted_geometric(x, t.exponent - 1);
  return total;
}

double Mixture::curvature_gap(double x) const {
  double total = 0.0;
  for (const Term& t : terms_) {
    if (t.exponent < 3) continue;
    total += t.coef * t.exponent * weighted_geometric(x, t.exponent - 2);
  }
  return total;
}

double Mixture::secant_gap(double x) const {
  double total = 0.0;
  for (const Term& t : terms_) {
    if (t.exponent < 3) continue;
    total += t.coef * t.exponent * geometric(x, t.exponent - 2);
  }
  return total;
}

Mixture make_mixture(int p, int s, double lambda) { return Mixture(p, s, lambda); }

double xi_deriv(const Mixture& m, double x, int order) { return m.deriv(x, order); }

}  // namespace parisi
