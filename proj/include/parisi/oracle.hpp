#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"

namespace parisi {

struct Jump {
  double q;
  double a;
};

// gamma(x) = sum_{q_i <= x} a_i on [0,1) plus an atom at 1.
struct StepMeasure {
  std::vector<Jump> jumps;
  double atom = 1.0;

  std::size_t k() const { return jumps.size(); }
  void validate() const;
  ParisiMeasure to_parisi() const;
};

double step_energy(const Mixture& m, const StepMeasure& sm);

struct OracleResult {
  StepMeasure measure;
  double energy = 0.0;
};

inline constexpr int kMaxLevels = 6;

struct OracleOptions {
  int restarts = 16;
  std::uint64_t seed = 1;
  double gap_tol = 1e-6;
};

OracleResult minimize_k(const Mixture& m, int k, int restarts = 16, std::uint64_t seed = 1);

struct OracleProfile {
  std::vector<OracleResult> levels;  // index k = 0..kmax
  // Smallest k with E(k+1) >= E(k) - gap_tol, or -1 if none ("full-like").
  int saturation = -1;
  std::string tag() const;
};

OracleProfile oracle_profile(const Mixture& m, int kmax, const OracleOptions& opts = {});

}  // namespace parisi
