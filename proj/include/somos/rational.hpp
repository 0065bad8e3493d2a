#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace somos {

// Exact rationals in canonical (lowest terms, positive denominator) form.
using Rational = mpq_class;
using Integer = mpz_class;

/// Builds num/den in canonical form. Throws Error{InvalidArgument} on den == 0.
Rational make_rational(const Integer& num, const Integer& den);

/// Parses "p/q" or an integer "p". Decimal notation is rejected so that input
/// stays exact.
Rational parse_rational(std::string_view text);

/// Always "p/q", including integers ("1/1").
std::string to_string(const Rational& value);

/// b^e for e >= 0.
Integer ipow(unsigned long base, unsigned long exponent);

/// Half-open interval (lower, upper].
class RationalInterval {
public:
    RationalInterval(Rational lower, Rational upper);

    const Rational& lower() const noexcept { return lower_; }
    const Rational& upper() const noexcept { return upper_; }

    Rational length() const { return upper_ - lower_; }
    bool contains(const Rational& x) const { return lower_ < x && x <= upper_; }
    bool contains(const RationalInterval& other) const {
        return lower_ <= other.lower_ && other.upper_ <= upper_;
    }
    bool disjoint(const RationalInterval& other) const {
        return upper_ <= other.lower_ || other.upper_ <= lower_;
    }

    friend bool operator==(const RationalInterval&, const RationalInterval&) = default;

private:
    Rational lower_;
    Rational upper_;
};

/// Parses "a,b" into (a, b]. Requires a < b.
RationalInterval parse_interval(std::string_view text);

std::string to_string(const RationalInterval& interval);

} // namespace somos
