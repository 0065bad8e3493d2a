#include "somos/rational.hpp"

#include "somos/error.hpp"

#include <algorithm>
#include <cctype>

namespace somos {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

Integer parse_integer(std::string_view s, std::string_view whole) {
    s = trim(s);
    std::string_view digits = s;
    if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
    if (digits.empty() ||
        !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw Error(ErrorCode::InvalidArgument,
                    "expected a rational \"p/q\", got \"" + std::string(whole) + "\"");
    }
    std::string buf(s.front() == '+' ? s.substr(1) : s);
    return Integer(buf, 10);
}

} // namespace

Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
    return make_rational(parse_integer(text.substr(0, slash), text),
                         parse_integer(text.substr(slash + 1), text));
}

std::string to_string(const Rational& value) {
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Integer ipow(unsigned long base, unsigned long exponent) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, exponent);
    return r;
}

RationalInterval::RationalInterval(Rational lower, Rational upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (!(lower_ < upper_)) {
        throw Error(ErrorCode::InvalidArgument,
                    "interval requires lower < upper, got (" + somos::to_string(lower_) + ", " +
                        somos::to_string(upper_) + "]");
    }
}

RationalInterval parse_interval(std::string_view text) {
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) {
        throw Error(ErrorCode::InvalidArgument, "expected an interval \"a,b\", got \"" + std::string(text) + "\"");
    }
    return RationalInterval(parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1)));
}

std::string to_string(const RationalInterval& interval) {
    return "(" + to_string(interval.lower()) + ", " + to_string(interval.upper()) + "]";
}

} // namespace somos
