#pragma once

#include <functional>
#include <vector>

namespace parisi::numeric {

using Fn = std::function<double(double)>;

// Values at or below this magnitude carry no sign information.
inline constexpr double kSignFloor = 1e-15;

// Full-precision root of f on [a, b] given opposite-signed endpoint values.
double refine_root(const Fn& f, double a, double b, double fa, double fb);

double bisect_root(const Fn& f, double a, double b, double fa, double xtol);

// Uniform grid on [a, b] with n intervals. Geometric points accumulating at
// b (dense_right) or a (dense_left) are merged in so roots hugging an end
// stay resolved.
std::vector<double> scan_grid(double a, double b, int n, bool dense_right, bool dense_left = false);

struct Bracket {
  double lo, hi, flo, fhi;
};

// Sign changes of f over consecutive grid samples, skipping samples whose
// magnitude is under kSignFloor.
std::vector<Bracket> sign_changes(const Fn& f, const std::vector<double>& grid);

std::vector<double> roots_on_grid(const Fn& f, const std::vector<double>& grid);

// Golden-section maximization of f on [a, b].
double golden_max(const Fn& f, double a, double b, double xtol);

// Adaptive 31-point Gauss-Kronrod.
double integrate(const Fn& f, double a, double b, double tol = 1e-12);

}  // namespace parisi::numeric
