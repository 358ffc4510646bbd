#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace dofalign {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Render a rational as "p/q", or just "p" when the denominator is 1.
std::string to_string(const Rational& r);

/// Parse "p", "-p" or "p/q" (optionally signed numerator). Throws
/// std::invalid_argument on anything else, including q == 0.
Rational parse_rational(std::string_view text);

/// Parse a comma-separated list of rationals, e.g. "1/3,1/3,1/3,1/3".
std::vector<Rational> parse_rational_list(std::string_view text);

} // namespace dofalign
