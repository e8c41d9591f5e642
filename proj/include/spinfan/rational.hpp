#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace spinfan {

using Rational = boost::rational<std::int64_t>;

/// Parses "p/q", an integer, or a terminating decimal such as "-0.25".
Rational parse_rational(const std::string &text);
std::string to_string(const Rational &r);
double to_double(const Rational &r);

} // namespace spinfan
