#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>

namespace rerl {

// Exact rational arithmetic for delays and clock values.  The learning
// searches repeatedly halve delays, so denominators grow without bound;
// arbitrary-precision rationals keep integrality tests and class
// computations decidable.
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

// Largest integer <= r.
Int floor_rat(const Rat& r);

// r - floor(r), in [0,1).
Rat frac_rat(const Rat& r);

bool is_integer(const Rat& r);

// Parses "3", "1.5", "-0.25" or "p/q".  Returns nullopt on malformed input.
std::optional<Rat> parse_rat(const std::string& s);

// Renders exactly: finite decimal when the denominator divides a power of
// ten, "p/q" otherwise.
std::string rat_to_string(const Rat& r);

}  // namespace rerl
