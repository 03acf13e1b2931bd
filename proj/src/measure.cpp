#include "parisi/measure.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

#include "parisi/criteria.hpp"
#include "parisi/numeric.hpp"

namespace parisi {

ParisiMeasure::ParisiMeasure(std::vector<Segment> segments, double atom)
    : segments_(std::move(segments)), atom_(atom) {
  if (segments_.empty()) throw InvalidMeasure("measure has no segments");
  if (!(atom_ > 0.0) || !std::isfinite(atom_)) throw InvalidMeasure("atom at 1 must be positive");
  if (segments_.front().lo != 0.0) throw InvalidMeasure("first segment must start at 0");
  if (segments_.back().hi != 1.0) throw InvalidMeasure("last segment must end at 1");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (!(s.lo < s.hi)) throw InvalidMeasure("segment with empty or reversed range");
    if (i > 0 && segments_[i - 1].hi != s.lo) throw InvalidMeasure("segments must be contiguous");
    if (s.kind == SegmentKind::Constant && !(s.value >= 0.0 && std::isfinite(s.value)))
      throw InvalidMeasure("constant density must be finite and nonnegative");
    if (s.kind == SegmentKind::Full) segments_[i].value = 0.0;
  }
}

std::size_t ParisiMeasure::locate(double x) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                             [](double v, const Segment& s) { return v < s.hi; });
  if (it == segments_.end()) return segments_.size() - 1;
  return static_cast<std::size_t>(it - segments_.begin());
}

bool operator==(const Segment& a, const Segment& b) {
  return a.lo == b.lo && a.hi == b.hi && a.kind == b.kind && a.value == b.value;
}

bool operator==(const ParisiMeasure& a, const ParisiMeasure& b) {
  return a.atom() == b.atom() && a.segments() == b.segments();
}

double full_density(const Mixture& m, double x) {
  double d3 = m.deriv(x, 3);
  if (d3 == 0.0) return 0.0;
  double d2 = m.deriv(x, 2);
  return 0.5 * d3 / (d2 * std::sqrt(d2));
}

namespace {

double slope_sign(const Mixture& m, double x) {
  double d2 = m.deriv(x, 2), d3 = m.deriv(x, 3), d4 = m.deriv(x, 4);
  return 2.0 * d2 * d4 - 3.0 * d3 * d3;
}

double left_value(const Mixture& m, const Segment& s) {
  return s.kind == SegmentKind::Constant ? s.value : full_density(m, s.hi);
}

double right_value(const Mixture& m, const Segment& s) {
  return s.kind == SegmentKind::Constant ? s.value : full_density(m, s.lo);
}

bool nondecreasing(double before, double after) {
  return after >= before - 1e-10 * (1.0 + std::abs(before));
}

}  // namespace

void validate_measure(const Mixture& m, const ParisiMeasure& nu) {
  const auto& segs = nu.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& s = segs[i];
    if (s.kind == SegmentKind::Full) {
      if (!(m.deriv(s.lo, 2) > 0.0)) throw InvalidMeasure("full density needs xi'' > 0 on its segment");
      for (int j = 0; j <= 64; ++j) {
        double x = s.lo + (s.hi - s.lo) * j / 64.0;
        double d2 = m.deriv(x, 2), d3 = m.deriv(x, 3);
        if (slope_sign(m, x) < -1e-10 * (d2 * m.deriv(x, 4) + d3 * d3 + 1e-300))
          throw InvalidMeasure("full density is decreasing inside its segment");
      }
    }
    if (i > 0 && !nondecreasing(left_value(m, segs[i - 1]), right_value(m, s)))
      throw InvalidMeasure("density decreases across a segment boundary");
  }
}

namespace {

constexpr std::size_t kPanels = 128;
using Panel = boost::math::quadrature::gauss<double, 20>;

}  // namespace

double TailProfile::full_inv_sq(std::size_t k, double r) const {
  double t = 1.0 / std::sqrt(m_.deriv(r, 2)) + offset_[k];
  return 1.0 / (t * t);
}

TailProfile::TailProfile(const Mixture& m, const ParisiMeasure& nu) : m_(m), nu_(nu) {
  validate_measure(m_, nu_);
  const auto& segs = nu_.segments();
  std::size_t n = segs.size();
  tail_hi_.assign(n, 0.0);
  offset_.assign(n, 0.0);
  calibrated_.assign(n, false);
  double t = nu_.atom();
  for (std::size_t k = n; k-- > 0;) {
    const Segment& s = segs[k];
    tail_hi_[k] = t;
    if (s.kind == SegmentKind::Constant) {
      t += s.value * (s.hi - s.lo);
    } else {
      double r = 1.0 / std::sqrt(m_.deriv(s.hi, 2));
      double c = t - r;
      if (std::abs(c) <= 1e-12 * r) {
        calibrated_[k] = true;
        c = 0.0;
      }
      offset_[k] = c;
      t = 1.0 / std::sqrt(m_.deriv(s.lo, 2)) + c;
    }
  }
  panel_inv_sq_.assign(n, {});
  panel_excess_.assign(n, {});
  for (std::size_t k = 0; k < n; ++k)
    if (segs[k].kind == SegmentKind::Full && !calibrated_[k]) tabulate(k);
  inv_sq_lo_.assign(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) inv_sq_lo_[k + 1] = inv_sq_lo_[k] + inv_sq_within(k, segs[k].hi);
  suffix_.assign(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    const Segment& s = segs[k];
    suffix_[k] = suffix_[k + 1] + inv_sq_lo_[k] * (s.hi - s.lo) + excess_within(k, s.lo);
  }
}

double TailProfile::tail(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("tail mass is defined on [0,1]");
  if (x == 1.0) return nu_.atom();
  std::size_t k = nu_.locate(x);
  const Segment& s = nu_.segments()[k];
  if (s.kind == SegmentKind::Constant) return tail_hi_[k] + s.value * (s.hi - x);
  return 1.0 / std::sqrt(m_.deriv(x, 2)) + offset_[k];
}

// int_{lo_k}^x dr / tail(r)^2
double TailProfile::inv_sq_within(std::size_t k, double x) const {
  const Segment& s = nu_.segments()[k];
  if (x <= s.lo) return 0.0;
  if (s.kind == SegmentKind::Constant) {
    double ta = tail_hi_[k] + s.value * (s.hi - s.lo);
    double tx = tail_hi_[k] + s.value * (s.hi - x);
    return (x - s.lo) / (ta * tx);
  }
  if (calibrated_[k]) return m_.deriv(x, 1) - m_.deriv(s.lo, 1);
  double h = panel_width(k);
  std::size_t j = std::min<std::size_t>(static_cast<std::size_t>((x - s.lo) / h), kPanels - 1);
  double a = s.lo + h * static_cast<double>(j);
  return panel_inv_sq_[k][j] + Panel::integrate([&](double r) { return full_inv_sq(k, r); }, a, x);
}

double TailProfile::panel_width(std::size_t k) const {
  const Segment& s = nu_.segments()[k];
  return (s.hi - s.lo) / static_cast<double>(kPanels);
}

void TailProfile::tabulate(std::size_t k) {
  const Segment& s = nu_.segments()[k];
  double h = panel_width(k);
  auto f = [&](double r) { return full_inv_sq(k, r); };
  auto& inv = panel_inv_sq_[k];
  auto& exc = panel_excess_[k];
  inv.assign(kPanels + 1, 0.0);
  exc.assign(kPanels + 1, 0.0);
  for (std::size_t j = 0; j < kPanels; ++j) {
    double a = s.lo + h * static_cast<double>(j), b = j + 1 == kPanels ? s.hi : a + h;
    inv[j + 1] = inv[j] + Panel::integrate(f, a, b);
  }
  for (std::size_t j = kPanels; j-- > 0;) {
    double a = s.lo + h * static_cast<double>(j), b = j + 1 == kPanels ? s.hi : a + h;
    double local = Panel::integrate([&](double r) { return (b - r) * f(r); }, a, b);
    exc[j] = local + exc[j + 1] + (inv[j + 1] - inv[j]) * (s.hi - b);
  }
}

namespace {

// (log(1+e) - e/(1+e)) / e^2
double phi(double e) {
  if (std::abs(e) < 0.1) {
    double sum = 0.0, pw = 1.0;
    for (int n = 0; n < 40; ++n) {
      double add = pw * (n + 1.0) / (n + 2.0);
      sum += add;
      if (std::abs(add) < 1e-19) break;
      pw *= -e;
    }
    return sum;
  }
  return (std::log1p(e) - e / (1.0 + e)) / (e * e);
}

}  // namespace

// int_u^{hi_k} (I(t) - I(u)) dt
double TailProfile::excess_within(std::size_t k, double u) const {
  const Segment& s = nu_.segments()[k];
  double len = s.hi - u;
  if (len <= 0.0) return 0.0;
  if (s.kind == SegmentKind::Constant) {
    double tb = tail_hi_[k];
    return len * len / (tb * tb) * phi(s.value * len / tb);
  }
  if (calibrated_[k]) return m_.xi(s.hi) - m_.xi(u) - m_.deriv(u, 1) * len;
  double h = panel_width(k);
  std::size_t j = std::min<std::size_t>(static_cast<std::size_t>((u - s.lo) / h), kPanels - 1);
  double b = j + 1 == kPanels ? s.hi : s.lo + h * static_cast<double>(j + 1);
  if (b < u) b = u;
  auto f = [&](double r) { return full_inv_sq(k, r); };
  double local = Panel::integrate([&](double r) { return (b - r) * f(r); }, u, b);
  double rise = panel_inv_sq_[k][j + 1] - inv_sq_within(k, u);
  return local + panel_excess_[k][j + 1] + rise * (s.hi - b);
}

double TailProfile::inv_sq(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("I(x) is defined on [0,1]");
  std::size_t k = nu_.locate(x);
  if (x == 1.0) return inv_sq_lo_.back();
  return inv_sq_lo_[k] + inv_sq_within(k, x);
}

double TailProfile::inv_sq_tail_integral(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("u outside [0,1]");
  if (u == 1.0) return 0.0;
  std::size_t k = nu_.locate(u);
  const Segment& s = nu_.segments()[k];
  return suffix_[k + 1] + inv_sq(u) * (s.hi - u) + excess_within(k, u);
}

double tail_mass(const ParisiMeasure& nu, const Mixture& m, double x) { return TailProfile(m, nu).tail(x); }

double density(const ParisiMeasure& nu, const Mixture& m, double x) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("density is defined on [0,1)");
  const Segment& s = nu.segments()[nu.locate(x)];
  return s.kind == SegmentKind::Constant ? s.value : full_density(m, x);
}

ParisiMeasure build_rs(const Mixture& m) {
  return ParisiMeasure({{0.0, 1.0, SegmentKind::Constant, 0.0}}, 1.0 / std::sqrt(m.d1_at_one()));
}

ParisiMeasure build_1rsb(const Mixture& m, double z) {
  if (!(z > 0.0)) throw ConstructionError("one-level measure needs z > 0");
  double root = std::sqrt((1.0 + z) * m.d1_at_one());
  return ParisiMeasure({{0.0, 1.0, SegmentKind::Constant, z / root}}, 1.0 / root);
}

ParisiMeasure two_level_measure(const Mixture& m, double q, double z1, double z2) {
  if (!(q > 0.0 && q < 1.0)) throw ConstructionError("two-level measure needs q in (0,1)");
  double w2 = 1.0 + z2, w12 = 1.0 + z1 + z2;
  double delta = std::sqrt((q / (w2 * w12) + (1.0 - q) / w2) / m.d1_at_one());
  double k1 = z1 * delta / q;
  double k2 = z2 * delta / (1.0 - q);
  return ParisiMeasure({{0.0, q, SegmentKind::Constant, k1}, {q, 1.0, SegmentKind::Constant, k2}}, delta);
}

namespace {

constexpr double kResidual = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConstructionError(what);
}

double k_below(const Mixture& m, double q) {
  double d1 = m.deriv(q, 1), d2 = m.deriv(q, 2);
  return (q * d2 - d1) / (q * d1 * std::sqrt(d2));
}

// Atom and density above a calibrated point q where the full part stops.
std::pair<double, double> cap_above(const Mixture& m, double q) {
  double r = std::sqrt(m.deriv(q, 2));
  double gap = m.slope_gap(q);
  return {r / gap, m.curvature_gap(q) / (r * gap)};
}

void check_calibration(const Mixture& m, const ParisiMeasure& nu, double x) {
  TailProfile tp(m, nu);
  double r = 1.0 / std::sqrt(m.deriv(x, 2));
  require(std::abs(tp.tail(x) - r) <= kResidual * r, "tail calibration fails at a full-density endpoint");
}

void check_monotone(const Mixture& m, const ParisiMeasure& nu) {
  try {
    validate_measure(m, nu);
  } catch (const InvalidMeasure& e) {
    throw ConstructionError(e.what());
  }
}

}  // namespace

ParisiMeasure build_2rsb(const Mixture& m, double q, double z1, double z2) {
  require(q > 0.0 && q < 1.0, "q must lie in (0,1)");
  require(z2 > 0.0 && z1 > 0.0, "z1 and z2 must be positive");
  Window w = window(m, q);
  require(w.lower < z2 && z2 < w.upper, "z2 outside the admissible window");
  F12 f = f12(m, q, z2);
  require(std::abs(f.f1) <= kResidual && std::abs(f.f2) <= kResidual, "(q, z2) does not solve f1 = f2 = 0");
  double w12 = q * m.slope_gap(q) / m.deriv(q, 1);
  require(std::abs(1.0 + z1 + z2 - w12) <= kResidual * w12, "z1 inconsistent with q and z2");
  ParisiMeasure nu = two_level_measure(m, q, z1, z2);
  require(nu.segments()[0].value < nu.segments()[1].value, "densities must increase");
  return nu;
}

ParisiMeasure build_2frsb(const Mixture& m, double q1, double q2) {
  require(0.0 < q1 && q1 < q2 && q2 < 1.0, "need 0 < q1 < q2 < 1");
  require(std::abs(eval_h2(m, q1).h12) <= kResidual, "q1 is not a zero of h12");
  require(std::abs(eval_h2(m, q2).h22) <= kResidual, "q2 is not a zero of h22");
  Window a = window(m, q1), b = window(m, q2);
  require(a.lower < a.upper && b.lower < b.upper, "window condition fails");
  auto [delta, k2] = cap_above(m, q2);
  ParisiMeasure nu({{0.0, q1, SegmentKind::Constant, k_below(m, q1)},
                    {q1, q2, SegmentKind::Full, 0.0},
                    {q2, 1.0, SegmentKind::Constant, k2}},
                   delta);
  check_monotone(m, nu);
  check_calibration(m, nu, q1);
  check_calibration(m, nu, q2);
  return nu;
}

ParisiMeasure build_1frsb(const Mixture& m, double q, FrsbVariant variant) {
  require(q > 0.0 && q < 1.0, "q must lie in (0,1)");
  if (variant == FrsbVariant::DensityAbove) {
    require(std::abs(eval_h2(m, q).h12) <= kResidual, "q is not a zero of h12");
    Window w = window(m, q);
    require(w.lower < w.upper, "window condition fails");
    auto grid = numeric::scan_grid(q, 1.0 - 1e-13, 2048, true);
    grid.erase(grid.begin());
    auto h22 = [&](double x) { return detail::h22_guarded(m, x); };
    require(numeric::sign_changes(h22, grid).empty(), "h22 vanishes above q");
    ParisiMeasure nu({{0.0, q, SegmentKind::Constant, k_below(m, q)}, {q, 1.0, SegmentKind::Full, 0.0}},
                     1.0 / std::sqrt(m.d2_at_one()));
    check_monotone(m, nu);
    check_calibration(m, nu, q);
    return nu;
  }
  require(m.p() == 2 && !m.is_pure(), "the density-below form needs p = 2");
  require(std::abs(eval_h2(m, q).h22) <= kResidual, "q is not a zero of h22");
  auto [delta, a] = cap_above(m, q);
  require(a > full_density(m, q), "constant part must exceed the full density at q");
  ParisiMeasure nu({{0.0, q, SegmentKind::Full, 0.0}, {q, 1.0, SegmentKind::Constant, a}}, delta);
  check_monotone(m, nu);
  check_calibration(m, nu, q);
  return nu;
}

ParisiMeasure build_frsb(const Mixture& m) {
  require(m.p() == 2 && m.lambda() < 1.0 && !m.is_pure(), "full measure needs p = 2 and lambda < 1");
  ParisiMeasure nu({{0.0, 1.0, SegmentKind::Full, 0.0}}, 1.0 / std::sqrt(m.d2_at_one()));
  check_monotone(m, nu);
  return nu;
}

std::string to_string(SegmentKind k) { return k == SegmentKind::Constant ? "constant" : "full"; }

std::string to_string(FrsbVariant v) {
  return v == FrsbVariant::DensityAbove ? "density-above" : "density-below";
}

}  // namespace parisi
