#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "parisi/phases.hpp"

namespace parisi {

inline constexpr const char* kCsvVersionLine = "# parisi-zero v1";

// Exit codes: 0 success, 1 usage or input error, 2 unresolved or not certified.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Inclusive grid "lo:hi:step"; throws std::invalid_argument when empty or malformed.
std::vector<double> parse_lambda_grid(const std::string& text);
// count points evenly spaced on [lo, hi], endpoints included.
std::vector<double> even_grid(double lo, double hi, int count);

std::string sweep_csv_header();

}  // namespace parisi
