#include "parisi/phases.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>

#include "parisi/criteria.hpp"
#include "parisi/numeric.hpp"

namespace parisi {

std::string to_string(Phase p) {
  switch (p) {
    case Phase::RS: return "RS";
    case Phase::OneRSB: return "OneRSB";
    case Phase::TwoRSB: return "TwoRSB";
    case Phase::OneFRSB: return "OneFRSB";
    case Phase::TwoFRSB: return "TwoFRSB";
    case Phase::FRSB: return "FRSB";
  }
  return "?";
}

Phase phase_from_string(const std::string& s) {
  for (Phase p : {Phase::RS, Phase::OneRSB, Phase::TwoRSB, Phase::OneFRSB, Phase::TwoFRSB, Phase::FRSB})
    if (to_string(p) == s) return p;
  throw std::invalid_argument("unknown phase '" + s + "'");
}

int phase_index(Phase p) { return static_cast<int>(p); }

std::string to_string(RegimeTag r) {
  switch (r) {
    case RegimeTag::P2Family: return "P2Family";
    case RegimeTag::Pure: return "Pure";
    case RegimeTag::AllOneRSB: return "AllOneRSB";
    case RegimeTag::TwoPhase: return "TwoPhase";
    case RegimeTag::FourPhase: return "FourPhase";
  }
  return "?";
}

Regime regime(int p, int s) {
  if (p < 2 || s < p) throw DomainError("need 2 <= p <= s");
  Regime r;
  if (p == s) {
    r.tag = RegimeTag::Pure;
    return r;
  }
  if (p == 2) {
    r.tag = RegimeTag::P2Family;
    return r;
  }
  QuadraticRoots q = lambda_stars(p, s);
  r.discriminant = q.discriminant();
  r.shortcut_discriminant = lambda_stars_shortcut(p, s);
  r.tag = RegimeTag::AllOneRSB;
  if (!q.roots) return r;
  r.lambda1_star = q.roots->first;
  r.lambda2_star = q.roots->second;
  r.psi_lambda1_star = psi(p, s, *r.lambda1_star);
  QuadraticRoots sr = s_roots(p, s);
  if (sr.roots) {
    r.lambda_2to1F = sr.roots->first;
    r.lambda_2to1F_prime = sr.roots->second;
    r.psi_lambda_2to1F = psi(p, s, *r.lambda_2to1F);
  }
  if (!(*r.psi_lambda1_star > 0.0)) return r;
  if (!r.psi_lambda_2to1F || *r.psi_lambda_2to1F <= 0.0) {
    r.tag = RegimeTag::TwoPhase;
  } else {
    r.tag = RegimeTag::FourPhase;
  }
  return r;
}

std::vector<std::pair<std::string, double>> PhaseBoundaries::list() const {
  std::vector<std::pair<std::string, double>> out;
  if (p2) {
    out.emplace_back("lambda_1to1F", p2->lambda_1to1F);
    out.emplace_back("lambda_1Fto1", p2->lambda_1Fto1);
  }
  if (general) {
    out.emplace_back("lambda_1to2", general->lambda_1to2);
    if (general->lambda_2to2F) out.emplace_back("lambda_2to2F", *general->lambda_2to2F);
    if (general->lambda_2to1F) out.emplace_back("lambda_2to1F", *general->lambda_2to1F);
    out.emplace_back("lambda_2to1", general->lambda_2to1);
  }
  return out;
}

double PhaseBoundaries::at(const std::string& name) const {
  for (const auto& [n, v] : list())
    if (n == name) return v;
  throw RegimeMismatch(name + " is not defined for regime " + to_string(regime.tag));
}

namespace {

using Fn2 = std::function<std::array<double, 2>(double, double)>;

struct Polished {
  double x, lambda, residual;
};

// Newton on a 2x2 system in (x, lambda) with central-difference Jacobian.
Polished newton_polish(const Fn2& f, const std::function<double(double, double)>& residual, double x,
                       double lambda) {
  Polished best{x, lambda, residual(x, lambda)};
  for (int it = 0; it < 12; ++it) {
    const double hx = 1e-7, hl = 1e-7;
    auto f0 = f(x, lambda);
    auto fxp = f(x + hx, lambda), fxm = f(x - hx, lambda);
    auto flp = f(x, lambda + hl), flm = f(x, lambda - hl);
    double a = (fxp[0] - fxm[0]) / (2 * hx), b = (flp[0] - flm[0]) / (2 * hl);
    double c = (fxp[1] - fxm[1]) / (2 * hx), d = (flp[1] - flm[1]) / (2 * hl);
    double det = a * d - b * c;
    if (!std::isfinite(det) || det == 0.0) break;
    double dx = (d * f0[0] - b * f0[1]) / det;
    double dl = (-c * f0[0] + a * f0[1]) / det;
    double xn = x - dx, ln = lambda - dl;
    if (!(xn > 0.0 && xn < 1.0 && ln > 0.0 && ln < 1.0)) break;
    double rn = residual(xn, ln);
    if (!(rn < best.residual)) break;
    x = xn;
    lambda = ln;
    best = {x, lambda, rn};
    if (rn < 1e-15) break;
  }
  return best;
}

// First lambda in (lo, hi) where pred turns from false to true.
std::optional<double> transition(const std::function<bool(double)>& pred, double lo, double hi, int coarse) {
  double prev = lo;
  bool prev_val = pred(lo);
  for (int i = 1; i <= coarse; ++i) {
    double l = lo + (hi - lo) * i / coarse;
    bool v = pred(l);
    if (!prev_val && v) {
      double a = prev, b = l;
      while (b - a > 1e-11) {
        double mid = 0.5 * (a + b);
        if (pred(mid)) {
          b = mid;
        } else {
          a = mid;
        }
      }
      return 0.5 * (a + b);
    }
    prev = l;
    prev_val = v;
  }
  return std::nullopt;
}

double p2_entry(int s, double lambda) {
  Mixture m(2, s, lambda);
  return 2.0 * lambda * solve_z(m) - s * (1.0 - lambda);
}

P2Boundaries solve_p2(int s) {
  P2Boundaries b;
  double S = s;
  b.lambda_1Fto1 = std::min(1.0, S * S * (S - 1) / ((S - 2) * (S * S + S + 6)));
  auto r = [s](double l) { return p2_entry(s, l); };
  const int n = 512;
  double prev = 0.0, fprev = r(0.0);
  b.lambda_1to1F = 1.0;
  for (int i = 1; i < n; ++i) {
    double l = static_cast<double>(i) / n;
    double fl = r(l);
    if (fprev <= 0.0 && fl > 0.0) {
      b.lambda_1to1F = numeric::refine_root(r, prev, l, fprev, fl);
      break;
    }
    prev = l;
    fprev = fl;
  }
  b.residual_1to1F = b.lambda_1to1F < 1.0 ? std::abs(r(b.lambda_1to1F)) : 0.0;
  return b;
}

GeneralBoundaries solve_general(int p, int s, const Regime& reg) {
  GeneralBoundaries g;
  double l1 = *reg.lambda1_star, l2 = *reg.lambda2_star;
  auto ps = [p, s](double l) { return psi(p, s, l); };
  {
    double fa = ps(l1), fb = ps(l2);
    if (fb < 0.0) {
      g.lambda_2to1 = numeric::refine_root(ps, l1, l2, fa, fb);
    } else {
      auto roots = numeric::roots_on_grid(ps, numeric::scan_grid(l1, l2, 4096, false));
      if (roots.empty()) throw Unresolved("no zero of Psi between the roots of Q");
      g.lambda_2to1 = roots.front();
    }
    g.residual_2to1 = std::abs(ps(g.lambda_2to1));
    double f0 = ps(1e-12);
    if (f0 < 0.0) g.lambda_psi_below = numeric::refine_root(ps, 1e-12, l1, f0, fa);
  }

  auto two_level = [p, s](double l) {
    Landmarks lm = landmarks(Mixture(p, s, l));
    return lm.q11 && lm.q21 && *lm.q21 > *lm.q11;
  };
  auto l12 = transition(two_level, 1e-6, g.lambda_2to1, 96);
  if (!l12) throw Unresolved("could not bracket the 1RSB -> 2RSB transition");
  {
    Landmarks lm = landmarks(Mixture(p, s, *l12));
    double x0 = lm.q11.value_or(0.5);
    auto sys = [p, s](double x, double l) {
      Mixture m(p, s, l);
      return std::array<double, 2>{detail::h11(m, x), detail::h21_scaled(m, x)};
    };
    auto res = [p, s](double x, double l) {
      Mixture m(p, s, l);
      H1 h = eval_h1(m, x);
      return std::abs(h.h11) + std::abs(h.h21);
    };
    Polished pol = newton_polish(sys, res, x0, *l12);
    g.lambda_1to2 = std::abs(pol.lambda - *l12) < 1e-8 ? pol.lambda : *l12;
    g.x_1to2 = pol.x;
    g.residual_1to2 = res(pol.x, g.lambda_1to2);
  }

  if (reg.tag == RegimeTag::FourPhase) {
    g.lambda_2to1F = reg.lambda_2to1F;
    auto full_branch = [p, s](double l) {
      Landmarks lm = landmarks(Mixture(p, s, l));
      return lm.q12 && lm.q22 && *lm.q22 > *lm.q12;
    };
    auto l22 = transition(full_branch, g.lambda_1to2, *reg.lambda_2to1F, 96);
    if (!l22) throw Unresolved("could not bracket the 2RSB -> 2FRSB transition");
    Landmarks lm = landmarks(Mixture(p, s, *l22));
    double x0 = lm.q12.value_or(0.9);
    auto sys = [p, s](double x, double l) {
      Mixture m(p, s, l);
      return std::array<double, 2>{detail::h12(m, x), detail::h22_scaled(m, x)};
    };
    auto res = [p, s](double x, double l) {
      Mixture m(p, s, l);
      H2 h = eval_h2(m, x);
      return std::abs(h.h12) + std::abs(h.h22);
    };
    Polished pol = newton_polish(sys, res, x0, *l22);
    double lam = std::abs(pol.lambda - *l22) < 1e-8 ? pol.lambda : *l22;
    g.lambda_2to2F = lam;
    g.x_2to2F = pol.x;
    g.residual_2to2F = res(pol.x, lam);
  }
  return g;
}

PhaseBoundaries compute_boundaries(int p, int s) {
  PhaseBoundaries b;
  b.p = p;
  b.s = s;
  b.regime = regime(p, s);
  switch (b.regime.tag) {
    case RegimeTag::P2Family:
      b.p2 = solve_p2(s);
      b.low_s_unproven = s == 3;
      break;
    case RegimeTag::TwoPhase:
    case RegimeTag::FourPhase:
      b.general = solve_general(p, s, b.regime);
      break;
    default:
      break;
  }
  return b;
}

}  // namespace

PhaseBoundaries boundaries(int p, int s) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, PhaseBoundaries> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({p, s});
    if (it != cache.end()) return it->second;
  }
  PhaseBoundaries b = compute_boundaries(p, s);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(std::make_pair(p, s), b).first->second;
}

Phase interval_phase(const PhaseBoundaries& b, double lambda) {
  switch (b.regime.tag) {
    case RegimeTag::Pure:
      return b.p == 2 ? Phase::RS : Phase::OneRSB;
    case RegimeTag::P2Family:
      if (lambda == 1.0) return Phase::RS;
      if (lambda <= b.p2->lambda_1to1F) return Phase::OneRSB;
      if (lambda < b.p2->lambda_1Fto1) return Phase::OneFRSB;
      return Phase::FRSB;
    case RegimeTag::AllOneRSB:
      return Phase::OneRSB;
    case RegimeTag::TwoPhase:
      if (lambda <= b.general->lambda_1to2) return Phase::OneRSB;
      if (lambda <= b.general->lambda_2to1) return Phase::TwoRSB;
      return Phase::OneRSB;
    case RegimeTag::FourPhase:
      if (lambda <= b.general->lambda_1to2) return Phase::OneRSB;
      if (lambda <= *b.general->lambda_2to2F) return Phase::TwoRSB;
      if (lambda <= *b.general->lambda_2to1F) return Phase::TwoFRSB;
      if (lambda <= b.general->lambda_2to1) return Phase::OneFRSB;
      return Phase::OneRSB;
  }
  return Phase::OneRSB;
}

namespace {

constexpr double kZetaSlack = 1e-12;

struct Attempt {
  Classification& c;
  const Mixture& m;
  double tol;
  std::ostringstream log;

  bool accept(Phase phase, const std::function<ParisiMeasure()>& build) {
    try {
      ParisiMeasure nu = build();
      VerificationReport rep = verify_parisi(m, nu, tol);
      if (!rep.pass) {
        log << to_string(phase) << ": verifier failed (normalization " << rep.normalization_error << ", min g "
            << rep.min_g << ", support " << rep.support_residual << "); ";
        return false;
      }
      c.phase = phase;
      c.measure = nu;
      c.report = rep;
      return true;
    } catch (const std::exception& e) {
      log << to_string(phase) << ": " << e.what() << "; ";
      return false;
    }
  }
};

struct TwoRsbRoot {
  double q, z2;
};

std::vector<TwoRsbRoot> two_rsb_roots(const Mixture& m, double a, double b) {
  bool open = b >= 1.0;
  double hi = open ? 1.0 - 1e-13 : b;
  auto grid = numeric::scan_grid(a, hi, kLandmarkGrid, open);
  auto F = [&m](double q) -> double {
    auto z2 = detail::f2_root(m, q);
    if (!z2) return std::nan("");
    Window w = window(m, q);
    if (!(w.lower < *z2 && *z2 < w.upper)) return std::nan("");
    return detail::f1_scaled(m, q, *z2);
  };
  std::vector<TwoRsbRoot> out;
  double xl = 0.0, fl = std::nan("");
  for (double q : grid) {
    if (q <= 0.0 || q >= 1.0) continue;
    double fq = F(q);
    if (std::isfinite(fq) && std::isfinite(fl) && std::abs(fq) > numeric::kSignFloor &&
        std::abs(fl) > numeric::kSignFloor && ((fq < 0.0) != (fl < 0.0))) {
      double r = numeric::refine_root(F, xl, q, fl, fq);
      auto z2 = detail::f2_root(m, r);
      if (z2) out.push_back({r, *z2});
    }
    if (!std::isfinite(fq) || std::abs(fq) > numeric::kSignFloor) {
      xl = q;
      fl = fq;
    }
  }
  return out;
}

void classify_general(Attempt& at, double z) {
  const Mixture& m = at.m;
  Classification& c = at.c;
  ZetaMax zm = max_zeta(m, z);
  c.max_zeta = zm.value;
  if (zm.value <= kZetaSlack) {
    c.params.z = z;
    if (at.accept(Phase::OneRSB, [&] { return build_1rsb(m, z); })) return;
    c.params = {};
  } else {
    at.log << "OneRSB: max zeta " << zm.value << " at " << zm.x << "; ";
  }

  auto interval = detail::decreasing_interval(m);
  if (!interval) {
    at.log << "t has no root in (0,1); ";
    return;
  }
  for (const TwoRsbRoot& r : two_rsb_roots(m, interval->first, interval->second)) {
    double z1 = r.q * m.slope_gap(r.q) / m.deriv(r.q, 1) - 1.0 - r.z2;
    c.params = {};
    c.params.q = r.q;
    c.params.z1 = z1;
    c.params.z2 = r.z2;
    if (at.accept(Phase::TwoRSB, [&] { return build_2rsb(m, r.q, z1, r.z2); })) return;
  }
  c.params = {};

  Landmarks lm = landmarks(m);
  if (lm.q12 && lm.q22 && *lm.q12 < *lm.q22 && *lm.q22 < 1.0) {
    double q1 = *lm.q12, q2 = *lm.q22;
    c.params.q1 = q1;
    c.params.q2 = q2;
    if (at.accept(Phase::TwoFRSB, [&] { return build_2frsb(m, q1, q2); })) return;
    c.params = {};
  }
  if (lm.q12) {
    double q1 = *lm.q12;
    c.params.q1 = q1;
    c.variant = FrsbVariant::DensityAbove;
    if (at.accept(Phase::OneFRSB, [&] { return build_1frsb(m, q1, FrsbVariant::DensityAbove); })) return;
    c.params = {};
    c.variant.reset();
  }
}

void classify_p2(Attempt& at, const PhaseBoundaries& b, double z) {
  const Mixture& m = at.m;
  Classification& c = at.c;
  double lambda = m.lambda();
  double entry = 2.0 * lambda * z - m.s() * (1.0 - lambda);
  if (entry <= 0.0) {
    c.params.z = z;
    at.accept(Phase::OneRSB, [&] { return build_1rsb(m, z); });
    return;
  }
  if (lambda < b.p2->lambda_1Fto1) {
    auto grid = numeric::scan_grid(1e-12, 1.0 - 1e-13, kLandmarkGrid, true, true);
    auto roots = numeric::roots_on_grid([&m](double x) { return detail::h22_guarded(m, x); }, grid);
    if (roots.empty()) {
      at.log << "OneFRSB: h22 has no zero in (0,1); ";
      return;
    }
    double qp = roots.front();
    c.params.qP = qp;
    c.variant = FrsbVariant::DensityBelow;
    at.accept(Phase::OneFRSB, [&] { return build_1frsb(m, qp, FrsbVariant::DensityBelow); });
    return;
  }
  at.accept(Phase::FRSB, [&] { return build_frsb(m); });
}

}  // namespace

Classification classify(int p, int s, double lambda, double tol) {
  Mixture m(p, s, lambda);
  PhaseBoundaries b = boundaries(p, s);
  Classification c;
  c.p = p;
  c.s = s;
  c.lambda = lambda;
  c.low_s_unproven = b.low_s_unproven;
  Attempt at{c, m, tol, {}};

  if (m.is_pure()) {
    if (m.effective_exponent() == 2) {
      at.accept(Phase::RS, [&] { return build_rs(m); });
    } else {
      double z = solve_z(m);
      c.params.z = z;
      c.max_zeta = max_zeta(m, z).value;
      at.accept(Phase::OneRSB, [&] { return build_1rsb(m, z); });
    }
  } else if (p == 2) {
    classify_p2(at, b, solve_z(m));
  } else {
    classify_general(at, solve_z(m));
  }
  if (!c.report.pass) {
    std::ostringstream msg;
    msg << "no construction certified at p=" << p << " s=" << s << " lambda=" << lambda << ": " << at.log.str();
    throw Unresolved(msg.str());
  }

  c.energy = cs_energy(m, c.measure);
  c.interval = interval_phase(b, lambda);
  c.interval_agrees = c.interval == c.phase;
  for (const auto& [name, v] : b.list())
    if (std::abs(lambda - v) <= 1e-9) c.on_boundary = true;
  return c;
}

}  // namespace parisi
