#include "parisi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

namespace parisi {

void StepMeasure::validate() const {
  if (!(atom > 0.0) || !std::isfinite(atom)) throw InvalidMeasure("step measure atom must be positive");
  double prev = -1.0;
  for (const Jump& j : jumps) {
    if (!(j.q >= 0.0 && j.q < 1.0)) throw InvalidMeasure("jump location outside [0,1)");
    if (!(j.q > prev)) throw InvalidMeasure("jump locations must increase");
    if (!(j.a > 0.0) || !std::isfinite(j.a)) throw InvalidMeasure("jump sizes must be positive");
    prev = j.q;
  }
}

ParisiMeasure StepMeasure::to_parisi() const {
  validate();
  std::vector<Segment> segs;
  double level = 0.0, lo = 0.0;
  for (const Jump& j : jumps) {
    if (j.q > lo) segs.push_back({lo, j.q, SegmentKind::Constant, level});
    level += j.a;
    lo = j.q;
  }
  segs.push_back({lo, 1.0, SegmentKind::Constant, level});
  return ParisiMeasure(std::move(segs), atom);
}

namespace {

double log_ratio(double e) {
  if (std::abs(e) < 1e-4) return 1.0 - e / 2.0 + e * e / 3.0 - e * e * e / 4.0;
  return std::log1p(e) / e;
}

// Tolerates zero jumps and coincident locations; q must be nondecreasing.
double energy_of(const Mixture& m, const std::vector<Jump>& jumps, double atom) {
  double drift = m.d1_at_one() * atom;
  for (const Jump& j : jumps) drift += j.a * (1.0 - m.xi(j.q));
  double level = 0.0;
  for (const Jump& j : jumps) level += j.a;
  double tail = atom, inverse = 0.0, hi = 1.0;
  for (std::size_t i = jumps.size() + 1; i-- > 0;) {
    double lo = i == 0 ? 0.0 : jumps[i - 1].q;
    double len = hi - lo;
    if (len > 0.0) {
      inverse += len / tail * log_ratio(level * len / tail);
      tail += level * len;
    }
    if (i > 0) level -= jumps[i - 1].a;
    hi = lo;
  }
  return 0.5 * (drift + inverse);
}

}  // namespace

double step_energy(const Mixture& m, const StepMeasure& sm) {
  sm.validate();
  return energy_of(m, sm.jumps, sm.atom);
}

namespace {

// x = (theta_1..k, alpha_1..k, beta): q_i = q_{i-1} + (1 - q_{i-1}) sin^2 theta_i,
// a_i = alpha_i^2, atom = exp(beta).
struct Decoded {
  std::vector<Jump> jumps;
  double atom;
};

Decoded decode(const std::vector<double>& x, int k) {
  Decoded d;
  double q = 0.0;
  for (int i = 0; i < k; ++i) {
    double s = std::sin(x[i]);
    q = i == 0 ? s * s : q + (1.0 - q) * s * s;
    d.jumps.push_back({std::min(q, 1.0), x[k + i] * x[k + i]});
  }
  d.atom = std::exp(x[2 * k]);
  return d;
}

std::vector<double> encode(const std::vector<Jump>& jumps, double atom) {
  int k = static_cast<int>(jumps.size());
  std::vector<double> x(2 * k + 1);
  double prev = 0.0;
  for (int i = 0; i < k; ++i) {
    double frac = i == 0 ? jumps[0].q : (jumps[i].q - prev) / (1.0 - prev);
    x[i] = std::asin(std::sqrt(std::clamp(frac, 0.0, 1.0)));
    x[k + i] = std::sqrt(jumps[i].a);
    prev = jumps[i].q;
  }
  x[2 * k] = std::log(atom);
  return x;
}

struct Candidate {
  std::vector<double> x;
  double f;
};

// Nelder-Mead with dimension-adapted coefficients.
Candidate nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                      double step, int max_evals) {
  const std::size_t n = x0.size();
  const double dn = static_cast<double>(n);
  const double alpha = 1.0, beta = 1.0 + 2.0 / dn, gamma = 0.75 - 0.5 / dn, delta = 1.0 - 1.0 / dn;
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    double v = f(x);
    return std::isfinite(v) ? v : 1e300;
  };
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);
  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    double spread = vals[worst] - vals[best];
    double size = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) size = std::max(size, std::abs(pts[i][j] - pts[best][j]));
    if (spread <= 1e-16 * (1.0 + std::abs(vals[best])) && size < 1e-9) break;
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / dn;
    for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - pts[worst][j]);
    double fr = eval(xr);
    if (fr < vals[best]) {
      for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + beta * (xr[j] - centroid[j]);
      double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    bool outside = fr < vals[worst];
    for (std::size_t j = 0; j < n; ++j)
      xc[j] = outside ? centroid[j] + gamma * (xr[j] - centroid[j]) : centroid[j] - gamma * (centroid[j] - pts[worst][j]);
    double fc = eval(xc);
    if (fc < std::min(fr, vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + delta * (pts[i][j] - pts[best][j]);
      vals[i] = eval(pts[i]);
    }
  }
  std::size_t best = std::min_element(vals.begin(), vals.end()) - vals.begin();
  return {pts[best], vals[best]};
}

// Repeated simplex runs from the incumbent until they stop paying off.
Candidate polish(const std::function<double(const std::vector<double>&)>& f, Candidate c) {
  double step = 0.2;
  for (int round = 0; round < 12; ++round) {
    Candidate next = nelder_mead(f, c.x, step, 3000 * static_cast<int>(c.x.size()));
    bool improved = next.f < c.f - 1e-15 * (1.0 + std::abs(c.f));
    if (next.f < c.f) c = next;
    if (!improved) {
      if (step < 1e-3) break;
      step *= 0.1;
    }
  }
  return c;
}

bool lex_less(const Candidate& a, const Candidate& b) {
  if (a.f != b.f) return a.f < b.f;
  return a.x < b.x;
}

OracleResult level_search(const Mixture& m, int k, int restarts, std::uint64_t seed, const OracleResult* warm) {
  auto f = [&](const std::vector<double>& x) {
    Decoded d = decode(x, k);
    return energy_of(m, d.jumps, d.atom);
  };
  std::vector<std::vector<double>> starts;
  if (warm) {
    const auto& wj = warm->measure.jumps;
    // Open a zero-size level in every gap of the previous optimum.
    for (std::size_t pos = 0; pos <= wj.size(); ++pos) {
      double lo = pos == 0 ? 0.0 : wj[pos - 1].q;
      double hi = pos == wj.size() ? 1.0 : wj[pos].q;
      std::vector<Jump> jumps = wj;
      jumps.insert(jumps.begin() + pos, Jump{0.5 * (lo + hi), 0.0});
      if (pos == 0 && !wj.empty() && wj[0].q == 0.0) jumps[0].q = 0.0;
      starts.push_back(encode(jumps, warm->measure.atom));
    }
  }
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < restarts; ++r) {
    std::vector<Jump> jumps;
    double u = (r + unit(rng)) / restarts;
    for (int i = 0; i < k; ++i) {
      double q = (i + u) / (k + 0.5);
      jumps.push_back({std::min(q, 0.999), 0.05 + 1.5 * unit(rng)});
    }
    double atom = (0.2 + unit(rng)) / std::sqrt(m.d1_at_one());
    starts.push_back(encode(jumps, atom));
  }
  Candidate best{{}, INFINITY};
  for (const auto& x0 : starts) {
    Candidate c = polish(f, {x0, f(x0)});
    if (best.x.empty() || lex_less(c, best)) best = c;
  }
  Decoded d = decode(best.x, k);
  OracleResult out;
  out.energy = best.f;
  // Report only levels that carry mass at distinct locations.
  for (const Jump& j : d.jumps) {
    if (!(j.a > 0.0) || j.q >= 1.0) continue;
    if (!out.measure.jumps.empty() && j.q <= out.measure.jumps.back().q) {
      out.measure.jumps.back().a += j.a;
      continue;
    }
    out.measure.jumps.push_back(j);
  }
  out.measure.atom = d.atom;
  return out;
}

void check_levels(int k, int restarts) {
  if (k < 0 || k > kMaxLevels) throw std::out_of_range("number of levels must be in 0..6");
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
}

}  // namespace

OracleResult minimize_k(const Mixture& m, int k, int restarts, std::uint64_t seed) {
  check_levels(k, restarts);
  OracleResult cur = level_search(m, 0, restarts, seed, nullptr);
  for (int j = 1; j <= k; ++j) cur = level_search(m, j, restarts, seed, &cur);
  return cur;
}

std::string OracleProfile::tag() const {
  if (saturation < 0) return "full-like";
  return "saturates at k=" + std::to_string(saturation);
}

OracleProfile oracle_profile(const Mixture& m, int kmax, const OracleOptions& opts) {
  check_levels(kmax, opts.restarts);
  OracleProfile prof;
  prof.levels.push_back(level_search(m, 0, opts.restarts, opts.seed, nullptr));
  for (int j = 1; j <= kmax; ++j) prof.levels.push_back(level_search(m, j, opts.restarts, opts.seed, &prof.levels.back()));
  for (int j = 0; j < kmax; ++j) {
    if (prof.levels[j + 1].energy >= prof.levels[j].energy - opts.gap_tol) {
      prof.saturation = j;
      break;
    }
  }
  return prof;
}

}  // namespace parisi
