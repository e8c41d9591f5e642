#include "spinfan/rational.hpp"

#include <charconv>
#include <stdexcept>

namespace spinfan {

namespace {

std::int64_t parse_int(std::string_view s, const std::string &whole) {
    std::int64_t v = 0;
    if (s.empty()) {
        throw std::invalid_argument("malformed rational: '" + whole + "'");
    }
    const char *begin = s.data();
    if (*begin == '+') {
        ++begin;
    }
    auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("malformed rational: '" + whole + "'");
    }
    return v;
}

} // namespace

Rational parse_rational(const std::string &text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const auto num = parse_int(std::string_view(text).substr(0, slash), text);
        const auto den = parse_int(std::string_view(text).substr(slash + 1), text);
        if (den == 0) {
            throw std::invalid_argument("zero denominator in '" + text + "'");
        }
        return Rational(num, den);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) {
        return Rational(parse_int(text, text));
    }
    const std::string_view whole(text);
    const auto frac = whole.substr(dot + 1);
    if (frac.size() > 15 || frac.find_first_not_of("0123456789") != std::string_view::npos) {
        throw std::invalid_argument("malformed rational: '" + text + "'");
    }
    const bool negative = !text.empty() && text[0] == '-';
    auto int_part = whole.substr(0, dot);
    if (int_part == "-" || int_part == "+" || int_part.empty()) {
        int_part = "0";
    }
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) {
        scale *= 10;
    }
    const std::int64_t ip = parse_int(int_part, text);
    const std::int64_t fp = frac.empty() ? 0 : parse_int(frac, text);
    const std::int64_t magnitude = (ip < 0 ? -ip : ip) * scale + fp;
    return Rational(negative ? -magnitude : magnitude, scale);
}

std::string to_string(const Rational &r) {
    if (r.denominator() == 1) {
        return std::to_string(r.numerator());
    }
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational &r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

} // namespace spinfan
