#include "machmin/rational.hpp"

#include <charconv>
#include <stdexcept>

namespace machmin {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole)
{
    std::int64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty())
        throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    return value;
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return Rational(parse_int(text, text));
    const auto num = parse_int(text.substr(0, slash), text);
    const auto den = parse_int(text.substr(slash + 1), text);
    if (den == 0)
        throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
}

std::string to_string(const Rational& q)
{
    if (q.denominator() == 1)
        return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

std::int64_t floor_rational(const Rational& q)
{
    // boost::rational keeps the denominator positive.
    auto n = q.numerator();
    auto d = q.denominator();
    auto div = n / d;
    if (n % d != 0 && n < 0)
        --div;
    return div;
}

std::int64_t ceil_rational(const Rational& q)
{
    return -floor_rational(-q);
}

std::int64_t ceil_times(const Rational& q, std::int64_t k)
{
    return ceil_rational(q * Rational(k));
}

double to_double(const Rational& q)
{
    return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

}  // namespace machmin
