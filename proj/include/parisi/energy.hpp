#pragma once

#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"

namespace parisi {

inline constexpr double kDefaultTolerance = 1e-7;

struct VerificationReport {
  double normalization_error = 0.0;
  double min_g = 0.0;
  double argmin_g = 0.0;
  double support_residual = 0.0;
  bool pass = false;
  double tolerance = kDefaultTolerance;
};

// Q(nu) = (1/2) [ int xi' dnu + int_0^1 dx / nu((x,1]) ]
double cs_energy(const Mixture& m, const ParisiMeasure& nu, double quad_tol = 1e-12);

// g(u) = int_u^1 (xi'(t) - int_0^t dr / nu((r,1])^2) dt
double g_of(const Mixture& m, const ParisiMeasure& nu, double u);
double g_of(const TailProfile& tp, double u);

VerificationReport verify_parisi(const Mixture& m, const ParisiMeasure& nu, double tol = kDefaultTolerance);

}  // namespace parisi
