#pragma once

#include <optional>
#include <utility>

#include "parisi/mixture.hpp"

namespace parisi {

// c(z) = (1+z) z^-2 log(1+z) - 1/z, with c(0) = 1/2.
double c_log(double z);
// Unique z >= 0 with c(z) = target, target in (0, 1/2].
double c_log_inverse(double target);
double solve_z(const Mixture& m);

double zeta(const Mixture& m, double x);
double zeta(const Mixture& m, double z, double x);

struct ZetaMax {
  double value;
  double x;
};
// Coarse 1024 grid, then golden refinement around the three largest local maxima.
ZetaMax max_zeta(const Mixture& m, double z);

double psi(const Mixture& m);
double psi(int p, int s, double lambda);

struct QuadraticRoots {
  double a = 0.0, b = 0.0, c = 0.0;
  std::optional<std::pair<double, double>> roots;
  double discriminant() const { return b * b - 4.0 * a * c; }
  double operator()(double x) const { return (a * x + b) * x + c; }
};

// Q(lambda), the curvature of t at x = 1.
QuadraticRoots lambda_stars(int p, int s);
double lambda_stars_shortcut(int p, int s);
// S(lambda), whose zeros are those of 2 xi''(1) xi''''(1) - 3 xi'''(1)^2.
QuadraticRoots s_roots(int p, int s);
std::optional<std::pair<double, double>> s_roots_closed_form(int p, int s);

struct H1 {
  double h11, h21;
};
struct H2 {
  double h12, h22;
};
struct Aux {
  double t, m_cubic, t12;
};
struct F12 {
  double f1, f2;
};

// Lower and upper admissible z2 at q: xi'(1)q/xi'(q) - 1 and
// (xi'(1) - xi'(q)) / (xi''(q)(1 - q)) - 1.
struct Window {
  double lower, upper;
};
Window window(const Mixture& m, double x);

H1 eval_h1(const Mixture& m, double x);
H2 eval_h2(const Mixture& m, double x);
Aux eval_aux(const Mixture& m, double x);
F12 f12(const Mixture& m, double q, double z2);

namespace detail {
double c_value(double z);
// f1 / q^2 and f2 / (1 - q)^2; same signs, no loss of digits near the ends.
double f1_scaled(const Mixture& m, double q, double z2);
double f2_scaled(const Mixture& m, double q, double z2);
double h11(const Mixture& m, double x);
double h12(const Mixture& m, double x);
double h21_scaled(const Mixture& m, double x);
double h22_scaled(const Mixture& m, double x);
// As above, but 0 when the value is within cancellation noise; for sign scans.
double h21_guarded(const Mixture& m, double x);
double h22_guarded(const Mixture& m, double x);
// t(x) / (1 - x)
double t_reduced(const Mixture& m, double x);
// (qbar1, qbar2): roots of t in (0,1), qbar2 = 1 when only one exists.
std::optional<std::pair<double, double>> decreasing_interval(const Mixture& m);
// z2 solving f2(q, z2) = 0, when it exists.
std::optional<double> f2_root(const Mixture& m, double q);
}  // namespace detail

struct Landmarks {
  std::optional<double> qbar1, qbar2, q11, q12, q21, q22;
};

inline constexpr int kLandmarkGrid = 4096;
Landmarks landmarks(const Mixture& m);

}  // namespace parisi
