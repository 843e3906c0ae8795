#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace pief {

using Rat = mpq_class;

// Accepts "p", "p/q", decimals ("-1.25") and exponent forms ("3e-2"); the
// value is exact, so "0.1" is 1/10.
Rat parse_rational(std::string_view text);

// Exact value of the shortest decimal that round-trips to x.
Rat rational_from_double(double x);

// "p" or "p/q" in lowest terms.
std::string rat_to_string(const Rat& r);

inline double to_double(const Rat& r) { return r.get_d(); }

}  // namespace pief
