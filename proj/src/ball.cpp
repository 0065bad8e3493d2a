#include "somos/ball.hpp"

#include "somos/error.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace somos {

namespace {

std::string format_mpfr(const char* fmt, int digits, mpfr_srcptr x, mpfr_rnd_t rnd) {
    char* buf = nullptr;
    const int n = mpfr_asprintf(&buf, fmt, digits, rnd, x);
    if (n < 0 || buf == nullptr) throw Error(ErrorCode::ResourceLimit, "mpfr_asprintf failed");
    std::unique_ptr<char, decltype(&mpfr_free_str)> guard(buf, &mpfr_free_str);
    return std::string(buf, static_cast<std::size_t>(n));
}

// |x| rounded up to radius precision.
BigFloat abs_up(const BigFloat& x) {
    BigFloat r(BallValue::kRadiusPrecision);
    mpfr_abs(r.get(), x.get(), MPFR_RNDU);
    return r;
}

} // namespace

BigFloat::BigFloat(mpfr_prec_t precision) {
    mpfr_init2(value_, precision);
    mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(const BigFloat& other) {
    mpfr_init2(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(value_, other.precision());
    mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
    if (this != &other) {
        mpfr_set_prec(value_, other.precision());
        mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
    mpfr_swap(value_, other.value_);
    return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

std::string BigFloat::to_string(int digits, mpfr_rnd_t rnd) const {
    return format_mpfr("%.*R*e", std::max(digits - 1, 0), value_, rnd);
}

BallValue::BallValue(mpfr_prec_t precision) : mid_(precision), rad_(kRadiusPrecision) {}

void BallValue::charge_rounding() {
    // A round-to-nearest result is within 2^-p |mid| of the exact value.
    if (mpfr_zero_p(mid_.get())) return;
    BigFloat err = abs_up(mid_);
    mpfr_mul_2si(err.get(), err.get(), -static_cast<long>(precision()), MPFR_RNDU);
    mpfr_add(rad_.get(), rad_.get(), err.get(), MPFR_RNDU);
}

BallValue BallValue::from_rational(const Rational& value, mpfr_prec_t precision) {
    BallValue out(precision);
    if (mpfr_set_q(out.mid_.get(), value.get_mpq_t(), MPFR_RNDN) != 0) out.charge_rounding();
    return out;
}

BallValue BallValue::from_integer(long value, mpfr_prec_t precision) {
    BallValue out(precision);
    if (mpfr_set_si(out.mid_.get(), value, MPFR_RNDN) != 0) out.charge_rounding();
    return out;
}

BallValue& BallValue::inflate(double amount) {
    if (!(amount >= 0)) throw Error(ErrorCode::InvalidArgument, "radius increment must be >= 0");
    mpfr_add_d(rad_.get(), rad_.get(), amount, MPFR_RNDU);
    return *this;
}

BallValue& BallValue::inflate(const Rational& amount) {
    if (amount < 0) throw Error(ErrorCode::InvalidArgument, "radius increment must be >= 0");
    mpfr_add_q(rad_.get(), rad_.get(), amount.get_mpq_t(), MPFR_RNDU);
    return *this;
}

BallValue BallValue::operator-() const {
    BallValue out(*this);
    mpfr_neg(out.mid_.get(), out.mid_.get(), MPFR_RNDN);
    return out;
}

BallValue operator+(const BallValue& a, const BallValue& b) {
    BallValue out(std::max(a.precision(), b.precision()));
    const int inexact = mpfr_add(out.mid_.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
    mpfr_add(out.rad_.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
    if (inexact != 0) out.charge_rounding();
    return out;
}

BallValue operator-(const BallValue& a, const BallValue& b) { return a + (-b); }

BallValue operator*(const BallValue& a, const BallValue& b) {
    BallValue out(std::max(a.precision(), b.precision()));
    const int inexact = mpfr_mul(out.mid_.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN);
    // |xy - ab| <= |a| rb + |b| ra + ra rb
    BigFloat t = abs_up(a.mid_);
    mpfr_mul(t.get(), t.get(), b.rad_.get(), MPFR_RNDU);
    mpfr_add(out.rad_.get(), out.rad_.get(), t.get(), MPFR_RNDU);
    t = abs_up(b.mid_);
    mpfr_mul(t.get(), t.get(), a.rad_.get(), MPFR_RNDU);
    mpfr_add(out.rad_.get(), out.rad_.get(), t.get(), MPFR_RNDU);
    mpfr_mul(t.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
    mpfr_add(out.rad_.get(), out.rad_.get(), t.get(), MPFR_RNDU);
    if (inexact != 0) out.charge_rounding();
    return out;
}

BallValue BallValue::scaled(const Rational& factor) const {
    BallValue out(precision());
    const int inexact = mpfr_mul_q(out.mid_.get(), mid_.get(), factor.get_mpq_t(), MPFR_RNDN);
    const Rational magnitude = abs(factor);
    mpfr_mul_q(out.rad_.get(), rad_.get(), magnitude.get_mpq_t(), MPFR_RNDU);
    if (inexact != 0) out.charge_rounding();
    return out;
}

BallValue exp(const BallValue& x) {
    BallValue out(x.precision());
    const int inexact = mpfr_exp(out.mid_.get(), x.mid_.get(), MPFR_RNDN);
    // |e^y - e^m| <= e^m (e^r - 1) for |y - m| <= r
    BigFloat em(BallValue::kRadiusPrecision);
    mpfr_exp(em.get(), x.mid_.get(), MPFR_RNDU);
    BigFloat er(BallValue::kRadiusPrecision);
    mpfr_expm1(er.get(), x.rad_.get(), MPFR_RNDU);
    mpfr_mul(out.rad_.get(), em.get(), er.get(), MPFR_RNDU);
    if (inexact != 0) out.charge_rounding();
    return out;
}

BallValue log(const BallValue& x) {
    BigFloat low(x.precision());
    mpfr_sub(low.get(), x.mid_.get(), x.rad_.get(), MPFR_RNDD);
    if (mpfr_sgn(low.get()) <= 0) {
        throw Error(ErrorCode::OutOfDomain, "log of a ball that is not strictly positive");
    }
    BallValue out(x.precision());
    const int inexact = mpfr_log(out.mid_.get(), x.mid_.get(), MPFR_RNDN);
    // |log y - log m| <= r / (m - r) for |y - m| <= r < m
    mpfr_div(out.rad_.get(), x.rad_.get(), low.get(), MPFR_RNDU);
    if (inexact != 0) out.charge_rounding();
    return out;
}

BallValue BallValue::pow(const Rational& q) const { return exp(log(*this).scaled(q)); }

bool BallValue::contains(double x) const {
    BigFloat d(precision() + 64);
    mpfr_sub_d(d.get(), mid_.get(), x, MPFR_RNDN);
    mpfr_abs(d.get(), d.get(), MPFR_RNDD);
    return mpfr_lessequal_p(d.get(), rad_.get());
}

bool BallValue::contains(const Rational& x) const {
    BigFloat d(precision() + 64);
    mpfr_sub_q(d.get(), mid_.get(), x.get_mpq_t(), MPFR_RNDN);
    mpfr_abs(d.get(), d.get(), MPFR_RNDD);
    return mpfr_lessequal_p(d.get(), rad_.get());
}

bool BallValue::overlaps(const BallValue& other) const {
    BigFloat d(std::max(precision(), other.precision()) + 64);
    mpfr_sub(d.get(), mid_.get(), other.mid_.get(), MPFR_RNDN);
    mpfr_abs(d.get(), d.get(), MPFR_RNDD);
    BigFloat r(kRadiusPrecision);
    mpfr_add(r.get(), rad_.get(), other.rad_.get(), MPFR_RNDU);
    return mpfr_lessequal_p(d.get(), r.get());
}

std::string BallValue::display() const {
    // Printing to d decimals adds at most 0.5e-d, so the printed value is
    // within 1e-d of the truth whenever rad <= 0.5e-d.
    int decimals = 0;
    const double r = rad_double();
    if (r > 0 && r < 0.5) {
        decimals = static_cast<int>(std::floor(-std::log10(2.0 * r)));
    } else if (r == 0) {
        decimals = static_cast<int>(static_cast<double>(precision()) * 0.30103);
    }
    decimals = std::clamp(decimals, 0, static_cast<int>(static_cast<double>(precision()) * 0.30103));
    return format_mpfr("%.*R*f", decimals, mid_.get(), MPFR_RNDN) + " ± " + rad_string();
}

std::string BallValue::mid_string() const {
    const int digits = static_cast<int>(std::ceil(static_cast<double>(precision()) * 0.30103)) + 1;
    return mid_.to_string(digits);
}

std::string BallValue::rad_string() const { return rad_.to_string(6, MPFR_RNDU); }

nlohmann::json to_json(const BallValue& ball) {
    return {{"mid", ball.mid_string()}, {"rad", ball.rad_string()}};
}

} // namespace somos
