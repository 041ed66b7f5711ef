#pragma once

// Exact rational scalar type used throughout the library. All core
// computations are exact; doubles appear only in simulation output and
// report rendering.

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace pandora {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Parses "p" or "p/q" with decimal integers, q > 0 after sign normalization.
Rat parse_rat(const std::string& text);

// Canonical rendering: "p" when the denominator is 1, else "p/q", lowest terms.
std::string rat_to_string(const Rat& x);

double rat_to_double(const Rat& x);

// Largest multiple of g at most x (g > 0).
Rat floor_to_multiple(const Rat& x, const Rat& g);

// Smallest multiple of g at least x (g > 0).
Rat ceil_to_multiple(const Rat& x, const Rat& g);

inline Rat rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }
inline Rat rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }

// (x)^+ = max(x, 0)
inline Rat rat_plus(const Rat& x) { return x < 0 ? Rat(0) : x; }

}  // namespace pandora
