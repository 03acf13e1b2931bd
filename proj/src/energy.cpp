#include "parisi/energy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "parisi/numeric.hpp"

namespace parisi {

namespace {

// log(1+e)/e
double log_ratio(double e) {
  if (std::abs(e) < 1e-4) return 1.0 - e / 2.0 + e * e / 3.0 - e * e * e / 4.0;
  return std::log1p(e) / e;
}

}  // namespace

double cs_energy(const Mixture& m, const ParisiMeasure& nu, double quad_tol) {
  TailProfile tp(m, nu);
  double drift = m.d1_at_one() * nu.atom();
  double inverse = 0.0;
  const auto& segs = nu.segments();
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const Segment& s = segs[k];
    double len = s.hi - s.lo;
    if (s.kind == SegmentKind::Constant) {
      drift += s.value * (m.xi(s.hi) - m.xi(s.lo));
      double tb = tp.tail(s.hi);
      inverse += len / tb * log_ratio(s.value * len / tb);
      continue;
    }
    drift += numeric::integrate([&](double x) { return m.deriv(x, 1) * full_density(m, x); }, s.lo, s.hi,
                                quad_tol);
    double c = tp.full_offset(k);
    inverse += numeric::integrate(
        [&](double x) {
          double r = std::sqrt(m.deriv(x, 2));
          return r / (1.0 + c * r);
        },
        s.lo, s.hi, quad_tol);
  }
  return 0.5 * (drift + inverse);
}

double g_of(const TailProfile& tp, double u) {
  const Mixture& m = tp.mixture();
  return 1.0 - m.xi(u) - tp.inv_sq_tail_integral(u);
}

double g_of(const Mixture& m, const ParisiMeasure& nu, double u) { return g_of(TailProfile(m, nu), u); }

namespace {

std::vector<double> support_points(const Mixture& m, const ParisiMeasure& nu) {
  std::vector<double> pts;
  double before = 0.0;
  for (const Segment& s : nu.segments()) {
    if (s.kind == SegmentKind::Constant) {
      if (s.value > before + 1e-15 * (1.0 + before)) pts.push_back(s.lo);
      before = s.value;
    } else {
      for (int j = 0; j < 64; ++j) pts.push_back(s.lo + (s.hi - s.lo) * j / 63.0);
      before = full_density(m, s.hi);
    }
  }
  return pts;
}

}  // namespace

VerificationReport verify_parisi(const Mixture& m, const ParisiMeasure& nu, double tol) {
  VerificationReport rep;
  rep.tolerance = tol;
  TailProfile tp(m, nu);
  rep.normalization_error = std::abs(tp.inv_sq(1.0) - m.d1_at_one());

  const int n = 2048;
  std::vector<double> g(n + 1);
  for (int i = 0; i <= n; ++i) g[i] = g_of(tp, static_cast<double>(i) / n);
  std::vector<int> lows;
  for (int i = 0; i <= n; ++i) {
    bool left = i == 0 || g[i] <= g[i - 1];
    bool right = i == n || g[i] <= g[i + 1];
    if (left && right) lows.push_back(i);
  }
  std::sort(lows.begin(), lows.end(), [&](int a, int b) { return g[a] < g[b] || (g[a] == g[b] && a < b); });
  if (lows.size() > 3) lows.resize(3);
  rep.min_g = g[lows.front()];
  rep.argmin_g = static_cast<double>(lows.front()) / n;
  auto neg = [&](double u) { return -g_of(tp, u); };
  for (int i : lows) {
    double a = std::max(0, i - 1) / static_cast<double>(n);
    double b = std::min(n, i + 1) / static_cast<double>(n);
    double u = numeric::golden_max(neg, a, b, 1e-12);
    double gu = g_of(tp, u);
    if (gu < rep.min_g) {
      rep.min_g = gu;
      rep.argmin_g = u;
    }
  }

  rep.support_residual = 0.0;
  for (double u : support_points(m, nu)) rep.support_residual = std::max(rep.support_residual, std::abs(g_of(tp, u)));

  rep.pass = rep.normalization_error <= tol && rep.min_g >= -tol && rep.support_residual <= tol;
  return rep;
}

}  // namespace parisi
