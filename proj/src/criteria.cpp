#include "parisi/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "parisi/numeric.hpp"

namespace parisi {

namespace detail {

double c_value(double z) {
  if (!(z > -1.0)) throw DomainError("c(z) requires z > -1");
  if (std::abs(z) < 0.25) {
    // sum_n (-z)^n / ((n+1)(n+2))
    double term = 1.0, sum = 0.0;
    for (int n = 0; n < 60; ++n) {
      double add = term / ((n + 1.0) * (n + 2.0));
      sum += add;
      if (std::abs(add) < 1e-20) break;
      term *= -z;
    }
    return sum;
  }
  return (1.0 + z) * std::log1p(z) / (z * z) - 1.0 / z;
}

}  // namespace detail

double c_log(double z) {
  if (z < 0.0) throw DomainError("c(z) requires z >= 0");
  return detail::c_value(z);
}

namespace {

double c_inverse_any(double target) {
  if (!(target > 0.0 && target < 1.0)) throw DomainError("c(z) takes values in (0,1) only");
  if (target == 0.5) return 0.0;
  auto f = [target](double z) { return detail::c_value(z) - target; };
  double lo, hi;
  if (target < 0.5) {
    lo = 0.0;
    hi = 1.0;
    while (f(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
    }
  } else {
    lo = -1.0 + 1e-300;
    hi = 0.0;
    double d = 0.5;
    while (f(-1.0 + d) < 0.0 && d > 1e-300) d *= 0.5;
    lo = -1.0 + d;
  }
  return numeric::refine_root(f, lo, hi, f(lo), f(hi));
}

}  // namespace

double c_log_inverse(double target) {
  if (!(target > 0.0 && target <= 0.5)) throw DomainError("c(z) = target needs target in (0, 1/2]");
  return c_inverse_any(target);
}

double solve_z(const Mixture& m) {
  double x1 = m.d1_at_one();
  if (x1 <= 2.0) return 0.0;
  return c_log_inverse(1.0 / x1);
}

double zeta(const Mixture& m, double z, double x) {
  if (!(z > 0.0)) throw DomainError("zeta needs z > 0");
  double x1 = m.d1_at_one();
  double d0 = m.xi(x), d1 = m.deriv(x, 1);
  return d0 + d1 * (1.0 - x) + d1 / z - (1.0 + z) * x1 / (z * z) * std::log1p(z * d1 / x1);
}

double zeta(const Mixture& m, double x) { return zeta(m, solve_z(m), x); }

ZetaMax max_zeta(const Mixture& m, double z) {
  const int n = 1024;
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = zeta(m, z, static_cast<double>(i) / n);
  std::vector<int> peaks;
  for (int i = 0; i <= n; ++i) {
    bool left = i == 0 || v[i] >= v[i - 1];
    bool right = i == n || v[i] >= v[i + 1];
    if (left && right) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return v[a] > v[b]; });
  if (peaks.size() > 3) peaks.resize(3);
  ZetaMax best{-std::numeric_limits<double>::infinity(), 0.0};
  auto f = [&](double x) { return zeta(m, z, x); };
  for (int i : peaks) {
    double a = std::max(0, i - 1) / static_cast<double>(n);
    double b = std::min(n, i + 1) / static_cast<double>(n);
    double x = numeric::golden_max(f, a, b, 1e-11);
    double fx = f(x);
    if (v[i] > fx) {
      fx = v[i];
      x = static_cast<double>(i) / n;
    }
    if (fx > best.value) best = {fx, x};
  }
  return best;
}

double psi(const Mixture& m) {
  double x1 = m.d1_at_one(), x2 = m.d2_at_one();
  return -(x1 - 1.0) / x2 - std::log(x2 / x1) + 1.0 - 2.0 / x1 + x2 / (x1 * x1);
}

double psi(int p, int s, double lambda) { return psi(Mixture(p, s, lambda)); }

namespace {

QuadraticRoots with_roots(double a, double b, double c) {
  QuadraticRoots q;
  q.a = a;
  q.b = b;
  q.c = c;
  double disc = q.discriminant();
  if (disc > 0.0 && a != 0.0) {
    double sq = std::sqrt(disc);
    double t = -0.5 * (b + std::copysign(sq, b));
    double r1 = t / a, r2 = c / t;
    q.roots = std::make_pair(std::min(r1, r2), std::max(r1, r2));
  }
  return q;
}

void require_mixed(int p, int s) {
  if (p < 2 || s < p) throw DomainError("need 2 <= p <= s");
}

}  // namespace

QuadraticRoots lambda_stars(int p, int s) {
  require_mixed(p, s);
  double P = p, S = s;
  double a = (S - P) * (S - P) * (S * S - 3 * S + 2 + P * P + 3 * P * S - 3 * P);
  double b = -S * (S - P) * (2 * S * S - 6 * S + 4 - P * P + 3 * P * S - 3 * P);
  double c = S * S * (S - 1) * (S - 2);
  return with_roots(a, b, c);
}

double lambda_stars_shortcut(int p, int s) {
  double P = p, S = s;
  return S * S - 6 * (P - 1) * S + (P - 1) * (P + 7);
}

QuadraticRoots s_roots(int p, int s) {
  require_mixed(p, s);
  double P = p, S = s;
  double A = S * S * S * (S - 1) * (S - 1) * (S - 2);
  double B = P * P * P * (P - 1) * (P - 1) * (P - 2);
  double C = 2 * P * (P - 1) * S * (S - 1) * ((P - 2) * (P - 3) + (S - 2) * (S - 3) - 3 * (P - 2) * (S - 2));
  return with_roots(A + B + C, -2 * A - C, A);
}

std::optional<std::pair<double, double>> s_roots_closed_form(int p, int s) {
  double P = p, S = s;
  double d = lambda_stars_shortcut(p, s) + 2 * (P - 2) * (S - 2);
  if (!(lambda_stars_shortcut(p, s) > 0.0) || d <= 0.0) return std::nullopt;
  double aF = S * S * S + (P - 3) * S * S + 2 * (P * (P - 2) + 1) * S - P * (P - 1) * (P + 1);
  double num = S * S * (S - 1) * (S - 2);
  double r = P * (P - 1) * std::sqrt(d);
  double l1 = num / ((S - P) * (aF + r));
  double l2 = num / ((S - P) * (aF - r));
  return std::make_pair(std::min(l1, l2), std::max(l1, l2));
}

Window window(const Mixture& m, double x) {
  double lower = x * (1.0 - x) * m.secant_gap(x) / m.deriv(x, 1);
  double upper = (1.0 - x) * m.curvature_gap(x) / m.deriv(x, 2);
  return {lower, upper};
}

namespace detail {

double f1_scaled(const Mixture& m, double q, double z2) {
  double d0 = m.xi(q), d1 = m.deriv(q, 1), gap = m.slope_gap(q);
  double w = 1.0 + z2;
  return -(q * d1 - d0) * w / (gap * q * q) - std::log(q * gap / (w * d1)) + 1.0 - 2.0 * d0 / (q * d1) +
         d0 * gap / (w * d1 * d1);
}

double f2_scaled(const Mixture& m, double q, double z2) {
  return m.slope_gap(q) * c_value(z2) - m.value_gap(q);
}

double h11(const Mixture& m, double x) { return f1_scaled(m, x, window(m, x).lower); }
double h12(const Mixture& m, double x) { return f1_scaled(m, x, window(m, x).upper); }
double h21_scaled(const Mixture& m, double x) { return f2_scaled(m, x, window(m, x).lower); }
double h22_scaled(const Mixture& m, double x) { return f2_scaled(m, x, window(m, x).upper); }

double t_reduced(const Mixture& m, double x) {
  return m.d1_at_one() * m.deriv(x, 2) * x - m.deriv(x, 1) * m.slope_gap(x);
}

std::optional<double> f2_root(const Mixture& m, double q) {
  double ratio = m.value_gap(q) / m.slope_gap(q);
  if (!(ratio > 0.0 && ratio < 1.0)) return std::nullopt;
  return c_inverse_any(ratio);
}

}  // namespace detail

namespace {

void require_interior(double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("criterion evaluated outside (0,1)");
}

}  // namespace

H1 eval_h1(const Mixture& m, double x) {
  require_interior(x);
  double u = (1.0 - x) * (1.0 - x);
  return {detail::h11(m, x), u * detail::h21_scaled(m, x)};
}

H2 eval_h2(const Mixture& m, double x) {
  require_interior(x);
  double u = (1.0 - x) * (1.0 - x);
  return {detail::h12(m, x), u * detail::h22_scaled(m, x)};
}

Aux eval_aux(const Mixture& m, double x) {
  if (!(x >= 0.0)) throw DomainError("auxiliary polynomials need x >= 0");
  double d1 = m.deriv(x, 1), d2 = m.deriv(x, 2), d3 = m.deriv(x, 3);
  double u = 1.0 - x;
  double t = u * detail::t_reduced(m, x);
  double mc = u * u * (d3 * m.slope_gap(x) - 2.0 * d2 * m.curvature_gap(x));
  double t12 = x * d1 * d3 - 2.0 * d2 * (x * d2 - d1);
  return {t, mc, t12};
}

F12 f12(const Mixture& m, double q, double z2) {
  require_interior(q);
  if (!(z2 > -1.0)) throw DomainError("f1, f2 need z2 > -1");
  double u = (1.0 - q) * (1.0 - q);
  return {q * q * detail::f1_scaled(m, q, z2), u * detail::f2_scaled(m, q, z2)};
}

namespace {

numeric::Fn bind(double (*fn)(const Mixture&, double), const Mixture& m) {
  return [fn, &m](double x) { return fn(m, x); };
}

}  // namespace

namespace detail {

std::optional<std::pair<double, double>> decreasing_interval(const Mixture& m) {
  auto grid = numeric::scan_grid(1e-9, 1.0 - 1e-13, kLandmarkGrid, true);
  auto roots = numeric::roots_on_grid(bind(t_reduced, m), grid);
  if (roots.empty()) return std::nullopt;
  return std::make_pair(roots.front(), roots.size() >= 2 ? roots[1] : 1.0);
}

}  // namespace detail

namespace detail {

// f2 at the window ends vanishes to second order at x = 1; values below the
// cancellation noise carry no sign.
namespace {
double f2_guarded(const Mixture& m, double x, double z2) {
  double a = m.slope_gap(x) * detail::c_value(z2), b = m.value_gap(x);
  double noise = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b));
  double v = a - b;
  return std::abs(v) <= noise ? 0.0 : v;
}
}  // namespace

double h21_guarded(const Mixture& m, double x) { return f2_guarded(m, x, window(m, x).lower); }
double h22_guarded(const Mixture& m, double x) { return f2_guarded(m, x, window(m, x).upper); }

}  // namespace detail

Landmarks landmarks(const Mixture& m) {
  if (m.is_pure() || m.p() <= 2) throw DomainError("landmarks need a genuine mixture with s > p > 2");
  Landmarks lm;
  auto interval = detail::decreasing_interval(m);
  if (!interval) return lm;
  lm.qbar1 = interval->first;
  lm.qbar2 = interval->second;
  double a = *lm.qbar1, b = *lm.qbar2;
  bool open_right = b >= 1.0;
  double hi = open_right ? 1.0 - 1e-13 : b;
  auto grid = numeric::scan_grid(a, hi, kLandmarkGrid, open_right);

  auto r11 = numeric::roots_on_grid(bind(detail::h11, m), grid);
  if (!r11.empty()) lm.q11 = r11.front();
  auto r12 = numeric::roots_on_grid(bind(detail::h12, m), grid);
  if (!r12.empty()) lm.q12 = r12.front();
  if (open_right) {
    if (detail::h21_scaled(m, a) > 0.0) lm.q21 = 1.0;
  } else {
    auto r21 = numeric::roots_on_grid(bind(detail::h21_guarded, m), grid);
    if (!r21.empty()) lm.q21 = r21.back();
  }
  auto r22 = numeric::roots_on_grid(bind(detail::h22_guarded, m), grid);
  if (!r22.empty()) {
    lm.q22 = r22.back();
  } else if (open_right) {
    lm.q22 = 1.0;
  }
  return lm;
}

}  // namespace parisi
