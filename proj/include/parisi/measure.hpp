#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "parisi/mixture.hpp"

namespace parisi {

class InvalidMeasure : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class ConstructionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class SegmentKind { Constant, Full };

struct Segment {
  double lo;
  double hi;
  SegmentKind kind;
  double value = 0.0;  // density on a Constant segment, unused for Full
};

// nu(dx) = gamma(x) dx on [0,1) plus an atom at 1. A Full segment carries
// the density gamma = xi'''/(2 xi''^{3/2}) of the mixture it is paired with.
class ParisiMeasure {
public:
  ParisiMeasure(std::vector<Segment> segments, double atom);

  const std::vector<Segment>& segments() const { return segments_; }
  double atom() const { return atom_; }
  std::size_t locate(double x) const;

private:
  std::vector<Segment> segments_;
  double atom_;
};

bool operator==(const Segment& a, const Segment& b);
bool operator==(const ParisiMeasure& a, const ParisiMeasure& b);

double full_density(const Mixture& m, double x);

// Throws InvalidMeasure unless gamma is nondecreasing on [0,1) for m.
void validate_measure(const Mixture& m, const ParisiMeasure& nu);

// Tail nu((x,1]) and I(x) = int_0^x dr / nu((r,1])^2, with per-segment data
// cached. A Full segment whose tail equals xi''^{-1/2} to rounding is
// "calibrated" and handled in closed form.
class TailProfile {
public:
  TailProfile(const Mixture& m, const ParisiMeasure& nu);

  double tail(double x) const;
  double inv_sq(double x) const;
  // int_u^1 I(t) dt
  double inv_sq_tail_integral(double u) const;
  double full_offset(std::size_t i) const { return offset_[i]; }
  bool calibrated(std::size_t i) const { return calibrated_[i]; }
  const Mixture& mixture() const { return m_; }
  const ParisiMeasure& measure() const { return nu_; }

private:
  double inv_sq_within(std::size_t i, double x) const;
  double excess_within(std::size_t i, double u) const;
  void tabulate(std::size_t i);
  double full_inv_sq(std::size_t i, double r) const;
  double panel_width(std::size_t i) const;

  Mixture m_;
  ParisiMeasure nu_;
  std::vector<double> tail_hi_;
  std::vector<double> offset_;
  std::vector<bool> calibrated_;
  std::vector<double> inv_sq_lo_;
  std::vector<double> suffix_;  // int_{lo_i}^1 I(t) dt
  // Uncalibrated full segments: I at panel nodes and int_{node}^{hi} (I - I(node)).
  std::vector<std::vector<double>> panel_inv_sq_, panel_excess_;
};

double tail_mass(const ParisiMeasure& nu, const Mixture& m, double x);
double density(const ParisiMeasure& nu, const Mixture& m, double x);

ParisiMeasure build_rs(const Mixture& m);
ParisiMeasure build_1rsb(const Mixture& m, double z);
// Two-level measure from (q, z1, z2) with the atom fixed by normalization;
// no optimality checks.
ParisiMeasure two_level_measure(const Mixture& m, double q, double z1, double z2);
ParisiMeasure build_2rsb(const Mixture& m, double q, double z1, double z2);
ParisiMeasure build_2frsb(const Mixture& m, double q1, double q2);

enum class FrsbVariant { DensityAbove, DensityBelow };
// DensityAbove: constant on [0,q), full on [q,1). DensityBelow: full on
// [0,q), constant on [q,1), with q = q_P.
ParisiMeasure build_1frsb(const Mixture& m, double q, FrsbVariant variant);
ParisiMeasure build_frsb(const Mixture& m);

std::string to_string(SegmentKind k);
std::string to_string(FrsbVariant v);

}  // namespace parisi
