#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace machmin {

using Rational = boost::rational<std::int64_t>;

/// Parses "a/b" or "a" into a normalized fraction; throws std::invalid_argument.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);

std::int64_t ceil_rational(const Rational& q);
std::int64_t floor_rational(const Rational& q);

/// ceil(q * k) evaluated without intermediate rounding.
std::int64_t ceil_times(const Rational& q, std::int64_t k);

double to_double(const Rational& q);

}  // namespace machmin
