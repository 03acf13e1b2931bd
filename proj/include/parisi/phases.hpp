#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "parisi/energy.hpp"
#include "parisi/measure.hpp"

namespace parisi {

class RegimeMismatch : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class Unresolved : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Phase { RS, OneRSB, TwoRSB, OneFRSB, TwoFRSB, FRSB };
enum class RegimeTag { P2Family, Pure, AllOneRSB, TwoPhase, FourPhase };

std::string to_string(Phase p);
std::string to_string(RegimeTag r);
Phase phase_from_string(const std::string& s);
int phase_index(Phase p);

struct Regime {
  RegimeTag tag = RegimeTag::Pure;
  std::optional<double> discriminant;
  std::optional<double> shortcut_discriminant;
  std::optional<double> lambda1_star, lambda2_star;
  std::optional<double> lambda_2to1F, lambda_2to1F_prime;
  std::optional<double> psi_lambda1_star, psi_lambda_2to1F;
};

Regime regime(int p, int s);

struct P2Boundaries {
  double lambda_1to1F = 0.0;
  double lambda_1Fto1 = 0.0;  // lambda bar 1F -> F
  double residual_1to1F = 0.0;
};

struct GeneralBoundaries {
  double lambda_1to2 = 0.0;
  double x_1to2 = 0.0;
  double residual_1to2 = 0.0;
  std::optional<double> lambda_2to2F, x_2to2F, residual_2to2F;
  std::optional<double> lambda_2to1F;
  double lambda_2to1 = 0.0;
  double residual_2to1 = 0.0;
  // Zero of Psi in (0, lambda1*), reported for comparison with lambda_1to2.
  std::optional<double> lambda_psi_below;
};

struct PhaseBoundaries {
  int p = 0, s = 0;
  Regime regime;
  std::optional<P2Boundaries> p2;
  std::optional<GeneralBoundaries> general;
  bool low_s_unproven = false;

  // (name, lambda) in increasing order.
  std::vector<std::pair<std::string, double>> list() const;
  // Throws RegimeMismatch when the named boundary does not exist for this family.
  double at(const std::string& name) const;
};

// Memoized per (p, s); safe to call concurrently.
PhaseBoundaries boundaries(int p, int s);

// Phase read off the boundary intervals; an exact boundary belongs to the
// lower-lambda phase.
Phase interval_phase(const PhaseBoundaries& b, double lambda);

struct PhaseParams {
  std::optional<double> z, q, z1, z2, q1, q2, qP;
};

struct Classification {
  int p = 0, s = 0;
  double lambda = 0.0;
  Phase phase = Phase::RS;
  PhaseParams params;
  std::optional<FrsbVariant> variant;
  bool on_boundary = false;
  bool low_s_unproven = false;
  Phase interval = Phase::RS;
  bool interval_agrees = true;
  std::optional<double> max_zeta;
  ParisiMeasure measure{{{0.0, 1.0, SegmentKind::Constant, 0.0}}, 1.0};
  VerificationReport report;
  double energy = 0.0;
};

Classification classify(int p, int s, double lambda, double tol = kDefaultTolerance);

}  // namespace parisi
