#pragma once

#include <complex>
#include <string>
#include <string_view>

namespace compint {

using Cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Divergence is represented by a quiet-NaN complex value so that it poisons
// every arithmetic expression it flows into instead of crashing.  Anything
// non-finite (overflow included) counts as divergent.
Cplx divergence_sentinel();
bool is_divergent(const Cplx& v);

// Complex literals use the compact form "a+bi" with no interior whitespace:
// "1", "-2.5", "i", "-i", "2i", "0.5-2i", "1e-3+2i".  Throws
// std::invalid_argument on malformed input.
Cplx parse_complex(std::string_view text);

// Formats a value so parse_complex round-trips it exactly.
std::string format_complex(const Cplx& v);

}  // namespace compint
