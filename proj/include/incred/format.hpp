#pragma once

#include <span>
#include <string>

namespace incred {

/// Shortest round-trip decimal spelling of a double ("inf", "-inf", "nan"
/// for non-finite values). Output is locale independent.
std::string format_real(double v);

/// Comma-separated list of format_real values.
std::string format_reals(std::span<const double> v, const char* sep = ",");

}  // namespace incred
