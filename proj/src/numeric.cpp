#include "parisi/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace parisi::numeric {

double refine_root(const Fn& f, double a, double b, double fa, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  return 0.5 * (r.first + r.second);
}

double bisect_root(const Fn& f, double a, double b, double fa, double xtol) {
  for (int i = 0; i < 400 && b - a > xtol; ++i) {
    double c = 0.5 * (a + b);
    double fc = f(c);
    if ((fc < 0.0) == (fa < 0.0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> scan_grid(double a, double b, int n, bool dense_right, bool dense_left) {
  std::vector<double> g;
  g.reserve(n + 160);
  for (int i = 0; i <= n; ++i) g.push_back(a + (b - a) * i / n);
  double step = (b - a) / n;
  for (int k = 1; k <= 72; ++k) {
    double d = step * std::pow(10.0, -k / 8.0);
    if (dense_right && d >= 1e-13 * std::max(1.0, std::abs(b))) g.push_back(b - d);
    if (dense_left && d >= 1e-13 * std::max(1.0, std::abs(a))) g.push_back(a + d);
  }
  std::sort(g.begin(), g.end());
  return g;
}

std::vector<Bracket> sign_changes(const Fn& f, const std::vector<double>& grid) {
  std::vector<Bracket> out;
  bool have = false;
  double xl = 0.0, fl = 0.0;
  for (double x : grid) {
    double fx = f(x);
    if (!std::isfinite(fx) || std::abs(fx) <= kSignFloor) continue;
    if (have && ((fx < 0.0) != (fl < 0.0))) out.push_back({xl, x, fl, fx});
    have = true;
    xl = x;
    fl = fx;
  }
  return out;
}

std::vector<double> roots_on_grid(const Fn& f, const std::vector<double>& grid) {
  std::vector<double> roots;
  for (const Bracket& b : sign_changes(f, grid)) roots.push_back(refine_root(f, b.lo, b.hi, b.flo, b.fhi));
  return roots;
}

double golden_max(const Fn& f, double a, double b, double xtol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? c : d;
}

double integrate(const Fn& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &err);
}

}  // namespace parisi::numeric
