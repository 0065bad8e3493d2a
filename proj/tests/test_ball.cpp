#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "somos/ball.hpp"
#include "somos/error.hpp"

#include <cmath>
#include <random>

using namespace somos;

namespace {

// f evaluated at 512 bits on the exact rational point.
template <typename F>
Rational reference(const Rational& x, F&& f) {
    BigFloat v(512);
    mpfr_set_q(v.get(), x.get_mpq_t(), MPFR_RNDN);
    f(v.get());
    mpq_class out;
    mpfr_get_q(out.get_mpq_t(), v.get());
    return out;
}

BallValue ball(const Rational& mid, const Rational& rad, mpfr_prec_t prec = 80) {
    BallValue b = BallValue::from_rational(mid, prec);
    b.inflate(rad);
    return b;
}

} // namespace

TEST_CASE("exact values have zero radius") {
    const BallValue half = BallValue::from_rational(Rational(1, 2), 64);
    CHECK(half.rad_double() == 0.0);
    CHECK(half.contains(0.5));
    const BallValue third = BallValue::from_rational(Rational(1, 3), 64);
    CHECK(third.rad_double() > 0.0);
    CHECK(third.rad_double() < 1e-18);
    CHECK(third.contains(Rational(1, 3)));
}

TEST_CASE("property: operations enclose every point of the operand balls") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<long> num(1, 1000);
    for (int trial = 0; trial < 200; ++trial) {
        const Rational a(num(rng), 37), b(num(rng), 53);
        const Rational ra(num(rng), 1000000), rb(num(rng), 1000000);
        const BallValue A = ball(a, ra), B = ball(b, rb);
        for (int sa : {-1, 0, 1}) {
            for (int sb : {-1, 0, 1}) {
                const Rational x = a + sa * ra, y = b + sb * rb;
                CHECK((A + B).contains(Rational(x + y)));
                CHECK((A - B).contains(Rational(x - y)));
                CHECK((A * B).contains(Rational(x * y)));
                CHECK(A.scaled(Rational(-3, 7)).contains(Rational(x * Rational(-3, 7))));
            }
            const Rational x = a + sa * ra;
            const BallValue small = ball(a / 100, ra / 100);
            const Rational xs = x / 100;
            CHECK(exp(small).contains(reference(xs, [](mpfr_ptr v) { mpfr_exp(v, v, MPFR_RNDN); })));
            CHECK(log(A).contains(reference(x, [](mpfr_ptr v) { mpfr_log(v, v, MPFR_RNDN); })));
        }
    }
}

TEST_CASE("log needs a positive ball") {
    CHECK_THROWS_AS(log(ball(Rational(1, 10), Rational(1, 5))), Error);
    CHECK_THROWS_AS(log(BallValue(64)), Error);
}

TEST_CASE("overlap and display") {
    const BallValue a = ball(Rational(1), Rational(1, 10));
    const BallValue b = ball(Rational(6, 5), Rational(1, 10));
    const BallValue c = ball(Rational(13, 10), Rational(1, 100));
    CHECK(a.overlaps(b));
    CHECK_FALSE(a.overlaps(c));
    CHECK(b.overlaps(c));

    const BallValue pi_ish = ball(Rational(314159265, 100000000), Rational(1, 10000000), 128);
    CHECK(pi_ish.display().rfind("3.141593 ± ", 0) == 0);
    const auto j = to_json(pi_ish);
    CHECK(j.contains("mid"));
    CHECK(j.contains("rad"));
    CHECK(std::stod(j["mid"].get<std::string>()) == doctest::Approx(3.14159265));
    CHECK(std::stod(j["rad"].get<std::string>()) >= 1e-7);
}

TEST_CASE("pow via exp/log") {
    const BallValue x = BallValue::from_rational(Rational(8), 128);
    const BallValue cube_root = x.pow(Rational(1, 3));
    CHECK(cube_root.contains(2.0));
    CHECK(cube_root.rad_double() < 1e-30);
}
