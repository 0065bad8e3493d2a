#pragma once

#include "somos/rational.hpp"

#include <mpfr.h>
#include <nlohmann/json.hpp>

#include <string>

namespace somos {

/// RAII owner of an mpfr_t with a fixed precision.
class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t precision);
    BigFloat(const BigFloat& other);
    BigFloat(BigFloat&& other) noexcept;
    BigFloat& operator=(const BigFloat& other);
    BigFloat& operator=(BigFloat&& other) noexcept;
    ~BigFloat();

    mpfr_ptr get() noexcept { return value_; }
    mpfr_srcptr get() const noexcept { return value_; }
    mpfr_prec_t precision() const noexcept { return mpfr_get_prec(value_); }

    double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(value_, rnd); }
    /// Scientific notation with `digits` significant digits.
    std::string to_string(int digits, mpfr_rnd_t rnd = MPFR_RNDN) const;

private:
    mpfr_t value_;
};

/// A real enclosed as midpoint +- radius. Every operation returns a ball that
/// contains the exact result for every pair of inputs inside the operand
/// balls; midpoint rounding is charged to the radius, and radii are always
/// rounded upward.
class BallValue {
public:
    static constexpr mpfr_prec_t kRadiusPrecision = 64;

    /// The exact point 0 at the given midpoint precision.
    explicit BallValue(mpfr_prec_t precision);

    static BallValue from_rational(const Rational& value, mpfr_prec_t precision);
    static BallValue from_integer(long value, mpfr_prec_t precision);

    const BigFloat& mid() const noexcept { return mid_; }
    const BigFloat& rad() const noexcept { return rad_; }
    mpfr_prec_t precision() const noexcept { return mid_.precision(); }

    double mid_double() const { return mid_.to_double(); }
    /// Radius as a double, rounded up.
    double rad_double() const { return rad_.to_double(MPFR_RNDU); }

    /// Widens the radius by a nonnegative amount.
    BallValue& inflate(double amount);
    BallValue& inflate(const Rational& amount);

    BallValue operator-() const;
    friend BallValue operator+(const BallValue& a, const BallValue& b);
    friend BallValue operator-(const BallValue& a, const BallValue& b);
    friend BallValue operator*(const BallValue& a, const BallValue& b);
    BallValue scaled(const Rational& factor) const;

    friend BallValue exp(const BallValue& x);
    /// Throws OutOfDomain unless the whole ball is positive.
    friend BallValue log(const BallValue& x);
    /// The ball raised to a rational power, via exp(log(x) * q).
    BallValue pow(const Rational& q) const;

    bool contains(double x) const;
    bool contains(const Rational& x) const;
    bool overlaps(const BallValue& other) const;

    /// Midpoint rounded to every decimal the radius guarantees, then "± rad".
    std::string display() const;
    /// Midpoint as a decimal string that round-trips the stored precision.
    std::string mid_string() const;
    /// Radius with 6 significant digits, rounded up.
    std::string rad_string() const;

private:
    void charge_rounding();

    BigFloat mid_;
    BigFloat rad_;
};

/// {"mid": decimal string, "rad": decimal string}
nlohmann::json to_json(const BallValue& ball);

} // namespace somos
