#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "parisi/criteria.hpp"
#include "parisi/energy.hpp"
#include "parisi/phases.hpp"
#include "reference.hpp"

using namespace parisi;

namespace {

struct Point {
  int p, s;
  double lambda;
};

const std::vector<Point> kPoints = {{2, 4, 1.0},     {3, 3, 1.0},    {4, 18, 0.5}, {4, 38, 0.305},
                                    {4, 38, 0.795},  {4, 38, 0.9843}, {4, 38, 0.9886}, {4, 38, 0.995},
                                    {2, 4, 0.3},     {2, 4, 0.7419}, {2, 4, 0.95}, {2, 8, 0.6}, {2, 8, 0.97}};

// Energy by Simpson integration over each segment of density and tail.
double energy_direct(const Mixture& m, const ParisiMeasure& nu) {
  TailProfile tp(m, nu);
  double drift = m.d1_at_one() * nu.atom(), inverse = 0.0;
  for (const Segment& s : nu.segments()) {
    drift += ref::simpson([&](double x) { return m.deriv(x, 1) * density(nu, m, std::min(x, s.hi - 1e-15)); }, s.lo,
                          s.hi, 4000);
    inverse += ref::graded_simpson([&](double x) { return 1 / tp.tail(x); }, s.lo, s.hi, 400);
  }
  return 0.5 * (drift + inverse);
}

// g by composite Simpson on the outer integral.
double g_direct(const TailProfile& tp, double u) {
  const Mixture& m = tp.mixture();
  double total = 0.0, lo = u;
  for (const Segment& s : tp.measure().segments()) {
    if (s.hi <= u) continue;
    total += ref::graded_simpson([&](double t) { return m.deriv(t, 1) - tp.inv_sq(t); }, lo, s.hi, 400);
    lo = s.hi;
  }
  return total;
}

// Nonnegative jumps added to the tail on constant segments, and atom rescaling.
std::vector<ParisiMeasure> perturbations(const ParisiMeasure& nu, std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ParisiMeasure> out;
  const auto& seg = nu.segments();
  std::size_t first_const_tail = seg.size();
  while (first_const_tail > 0 && seg[first_const_tail - 1].kind == SegmentKind::Constant) --first_const_tail;
  while (static_cast<int>(out.size()) < count) {
    double eps = 0.05 * (2 * u(rng) - 1);
    std::vector<Segment> s = seg;
    double atom = nu.atom() * (1 + eps);
    int mode = static_cast<int>(u(rng) * 3);
    if (mode == 1 && first_const_tail < seg.size()) {
      std::size_t i = first_const_tail + static_cast<std::size_t>(u(rng) * (seg.size() - first_const_tail));
      double t = seg[i].lo + (seg[i].hi - seg[i].lo) * u(rng);
      double c = 0.05 * u(rng);
      std::vector<Segment> r(s.begin(), s.begin() + i);
      r.push_back({seg[i].lo, t, SegmentKind::Constant, seg[i].value});
      r.push_back({t, seg[i].hi, SegmentKind::Constant, seg[i].value + c});
      for (std::size_t j = i + 1; j < seg.size(); ++j) r.push_back({seg[j].lo, seg[j].hi, SegmentKind::Constant, seg[j].value + c});
      std::vector<Segment> clean;
      for (const Segment& x : r)
        if (x.hi > x.lo) clean.push_back(x);
      s = clean;
      atom = nu.atom();
    } else if (mode == 2 && seg[0].kind == SegmentKind::Constant && seg[0].value > 0) {
      s[0].value *= 1 - 0.05 * u(rng);
      atom = nu.atom();
    }
    out.emplace_back(s, atom);
  }
  return out;
}

}  // namespace

TEST_CASE("closed-form energies") {
  CHECK(cs_energy(Mixture(2, 2, 1.0), build_rs(Mixture(2, 2, 1.0))) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  double z = ref::z_of(3.0);
  double me3 = (3 + z) / std::sqrt(3 * (1 + z));
  Mixture m3(3, 3, 1.0);
  CHECK(std::abs(cs_energy(m3, build_1rsb(m3, solve_z(m3))) - me3) < 1e-10);
  CHECK(me3 == doctest::Approx(1.6570).epsilon(1e-4));
  for (auto [p, s, l] : std::vector<Point>{{4, 18, 0.5}, {4, 18, 0.1}, {3, 7, 0.4}, {5, 30, 0.7}, {4, 38, 0.3}}) {
    Mixture m(p, s, l);
    double zz = solve_z(m), x1 = m.d1_at_one();
    CHECK(std::abs(cs_energy(m, build_1rsb(m, zz)) - (x1 + zz) / std::sqrt((1 + zz) * x1)) < 1e-10);
  }
}

TEST_CASE("energy agrees with direct integration, and quadrature is converged") {
  for (const Point& pt : kPoints) {
    CAPTURE(pt.p);
    CAPTURE(pt.s);
    CAPTURE(pt.lambda);
    Classification c = classify(pt.p, pt.s, pt.lambda);
    Mixture m(pt.p, pt.s, pt.lambda);
    double e = cs_energy(m, c.measure);
    CHECK(e == doctest::Approx(energy_direct(m, c.measure)).epsilon(1e-9));
    CHECK(std::abs(cs_energy(m, c.measure, 5e-13) - e) < 1e-9);
    CHECK(std::abs(cs_energy(m, c.measure, 1e-10) - e) < 1e-9);
    CHECK(c.energy == e);
  }
}

TEST_CASE("g against direct integration") {
  for (const Point& pt : kPoints) {
    CAPTURE(pt.lambda);
    Classification c = classify(pt.p, pt.s, pt.lambda);
    Mixture m(pt.p, pt.s, pt.lambda);
    TailProfile tp(m, c.measure);
    CHECK(g_of(tp, 1.0) == 0.0);
    CHECK(g_of(m, c.measure, 1.0) == 0.0);
    for (double u : {0.0, 0.2, 0.5, 0.8, 0.97}) CHECK(std::abs(g_of(tp, u) - g_direct(tp, u)) < 1e-9);
  }
}

TEST_CASE("p = 2 full measure has g identically zero") {
  for (auto [s, l] : std::vector<std::pair<int, double>>{{4, 0.95}, {8, 0.97}, {4, 0.99}}) {
    Mixture m(2, s, l);
    ParisiMeasure nu = build_frsb(m);
    for (int i = 0; i < 512; ++i) CHECK(std::abs(g_of(m, nu, i / 512.0)) <= 1e-9);
  }
}

TEST_CASE("p = 2 plateau part of g matches its closed form") {
  Mixture m(2, 4, 0.7419);
  Classification c = classify(2, 4, 0.7419);
  double qp = *c.params.qP;
  double X1 = m.d1_at_one(), d1 = m.deriv(qp, 1), d2 = m.deriv(qp, 2);
  double D = X1 - d1 - d2 * (1 - qp);
  for (double u = qp + 0.01; u < 1.0; u += 0.02) {
    double gbar = 1 - m.xi(u) - d1 * (1 - u) + d2 * (X1 - d1) * (1 - qp) * (1 - u) / D -
                  d2 * (X1 - d1) * (X1 - d1) * (1 - qp) * (1 - qp) / (D * D) *
                      std::log(1 + D * (1 - u) / (d2 * (1 - qp) * (1 - qp)));
    double g = g_of(m, c.measure, u);
    CHECK(g == doctest::Approx(gbar).epsilon(1e-9).scale(1e-3));
    CHECK(g > 0.0);
  }
}

TEST_CASE("verifier on constructor outputs and on perturbed measures") {
  for (const Point& pt : kPoints) {
    CAPTURE(pt.p);
    CAPTURE(pt.s);
    CAPTURE(pt.lambda);
    Classification c = classify(pt.p, pt.s, pt.lambda);
    Mixture m(pt.p, pt.s, pt.lambda);
    VerificationReport r = verify_parisi(m, c.measure);
    CHECK(r.pass);
    CHECK(r.tolerance == kDefaultTolerance);
    CHECK(r.normalization_error <= 1e-9);
    CHECK(r.min_g >= -1e-7);
    CHECK(r.support_residual <= 1e-7);
    ParisiMeasure scaled(c.measure.segments(), c.measure.atom() * 1.1);
    VerificationReport bad = verify_parisi(m, scaled);
    CHECK_FALSE(bad.pass);
    CHECK(bad.normalization_error > 0.01);
  }
  Mixture two(4, 38, 0.795);
  VerificationReport wrong = verify_parisi(two, build_1rsb(two, solve_z(two)));
  CHECK_FALSE(wrong.pass);
  CHECK(wrong.min_g < -kDefaultTolerance);
  VerificationReport loose = verify_parisi(two, build_1rsb(two, solve_z(two)), 1.0);
  CHECK(loose.tolerance == 1.0);
}

TEST_CASE("certified measures are local minima of the energy") {
  std::mt19937_64 rng(17);
  for (const Point& pt : kPoints) {
    CAPTURE(pt.lambda);
    Classification c = classify(pt.p, pt.s, pt.lambda);
    Mixture m(pt.p, pt.s, pt.lambda);
    double e = cs_energy(m, c.measure);
    for (const ParisiMeasure& nu : perturbations(c.measure, rng, 50)) {
      REQUIRE_NOTHROW(validate_measure(m, nu));
      CHECK(e <= cs_energy(m, nu) + 1e-8);
    }
  }
}

TEST_CASE("g is stationary on the support") {
  const double h = 1e-5;
  auto slope = [&](const Mixture& m, const ParisiMeasure& nu, double u) {
    return (g_of(m, nu, u + h) - g_of(m, nu, u - h)) / (2 * h);
  };
  {
    Mixture m(4, 38, 0.795);
    Classification c = classify(4, 38, 0.795);
    CHECK(std::abs(slope(m, c.measure, *c.params.q)) < 1e-6);
  }
  {
    Mixture m(4, 38, 0.9843);
    Classification c = classify(4, 38, 0.9843);
    double q1 = *c.params.q1, q2 = *c.params.q2;
    for (int i = 1; i < 8; ++i) CHECK(std::abs(slope(m, c.measure, q1 + (q2 - q1) * i / 8)) < 1e-6);
  }
  {
    Mixture m(4, 38, 0.9886);
    Classification c = classify(4, 38, 0.9886);
    double q1 = *c.params.q1;
    for (int i = 1; i < 8; ++i) CHECK(std::abs(slope(m, c.measure, q1 + (1 - q1) * i / 8)) < 1e-6);
  }
  {
    Mixture m(2, 4, 0.7419);
    Classification c = classify(2, 4, 0.7419);
    double qp = *c.params.qP;
    for (int i = 1; i < 8; ++i) CHECK(std::abs(slope(m, c.measure, qp * i / 8)) < 1e-6);
  }
}
