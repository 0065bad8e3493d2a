#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "somos/constants.hpp"
#include "somos/error.hpp"

#include <cmath>

using namespace somos;

namespace {

constexpr double kSigmaDigits = 1.6616879496;  // printed digits of sigma
constexpr double kKhinchinDigits = 2.6854520010;

ErrorCode error_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected somos::Error");
    return ErrorCode::InvalidArgument;
}

// The printed digits are truncated: the true value lies in [d, d + 1e-10).
bool matches_digits(const BallValue& v, double digits) {
    return std::fabs(v.mid_double() - (digits + 0.5e-10)) <= v.rad_double() + 0.5e-10 + 1e-15;
}

} // namespace

TEST_CASE("somos reproduces the printed digits") {
    const BallValue s = somos_constant({1e-10});
    CHECK(s.rad_double() <= 1e-10);
    CHECK(matches_digits(s, kSigmaDigits));
    CHECK(s.display().rfind("1.6616879496", 0) == 0);
}

TEST_CASE("somos with a single term") {
    const BallValue s = somos_terms(1);
    CHECK(s.mid_double() == 1.0);
    // log tail bound (N+2) 2^-N = 3/2 at N = 1
    CHECK(s.rad_double() >= 1.5);
    CHECK(s.contains(kSigmaDigits));
    CHECK(error_of([] { somos_constant({0.5, 1}); }) == ErrorCode::PrecisionUnreachable);
    CHECK(error_of([] { somos_constant({1e-10, 5}); }) == ErrorCode::PrecisionUnreachable);
    CHECK(error_of([] { somos_constant({-1.0}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("somos agrees with somos_b at b = 2") {
    CHECK(somos_constant({1e-6}).overlaps(somos_b(Base(2), {1e-6})));
}

TEST_CASE("log tail bound matches (N+2) 2^-N for b = 2") {
    for (std::size_t n : {1u, 5u, 20u}) {
        CHECK(somos_log_tail_bound(Base(2), n) == make_rational(Integer(static_cast<unsigned long>(n + 2)), ipow(2, n)));
    }
}

TEST_CASE("somos_b(3) against direct partial summation") {
    const long double oracle = std::exp(oracle::log_moment(3, 1, 20));
    const BallValue s = somos_b(Base(3), {1e-4});
    CHECK(s.rad_double() <= 1e-4);
    // 20-term truncation of the oracle is below 1e-8.
    CHECK(std::fabs(s.mid_double() - static_cast<double>(oracle)) <= s.rad_double() + 1e-8);
    CHECK(static_cast<double>(oracle) == doctest::Approx(1.3372).epsilon(1e-4));
}

TEST_CASE("sigma_b decreases with b and stays below sigma") {
    // (b-1) b^-i <= 2^-i for every i >= 2, so each log term is smaller.
    const BallValue s2 = somos_b(Base(2), {1e-12});
    BallValue prev = s2;
    for (unsigned long b = 3; b <= 20; ++b) {
        const BallValue sb = somos_b(Base(b), {1e-12});
        CHECK(sb.mid_double() + sb.rad_double() < s2.mid_double() - s2.rad_double());
        CHECK(sb.mid_double() + sb.rad_double() < prev.mid_double() - prev.rad_double());
        CHECK(sb.mid_double() > 1.0);
        prev = sb;
    }
}

TEST_CASE("enclosure: partial sums with twice the terms stay inside the ball") {
    for (unsigned long b : {2UL, 3UL, 5UL, 10UL}) {
        for (int n : {2, 4, 8, 16, 30}) {
            const BallValue s = somos_b_terms(Base(b), static_cast<std::size_t>(n));
            const double brute = static_cast<double>(std::exp(oracle::log_moment(b, 1, 2 * n)));
            CHECK(std::fabs(s.mid_double() - brute) <= s.rad_double() + 1e-15);
        }
    }
}

TEST_CASE("gamma_euler at 1/2 matches 2 log(2/sigma)") {
    const BallValue g = gamma_euler(Rational(1, 2), {1e-8});
    CHECK(g.rad_double() <= 1e-8);
    const double oracle = 2.0 * std::log(2.0 / (kSigmaDigits + 0.5e-10));
    // d/dsigma of 2 log(2/sigma) is ~1.2, times the 0.5e-10 digit uncertainty.
    CHECK(std::fabs(g.mid_double() - oracle) <= g.rad_double() + 1e-10);
    CHECK(g.mid_double() == doctest::Approx(0.37062).epsilon(1e-5));
}

TEST_CASE("gamma_euler first term") {
    const BallValue g = gamma_euler_terms(Rational(1, 2), 1);
    CHECK(g.mid_double() == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-15));
    // tail z^N / (2 (N+1)^2 (1-z)) = 1/8
    CHECK(g.rad_double() >= 0.125);
    CHECK(g.rad_double() < 0.125 + 1e-15);
}

TEST_CASE("gamma_euler domain") {
    CHECK(error_of([] { gamma_euler(Rational(0), {1e-8}); }) == ErrorCode::OutOfDomain);
    CHECK(error_of([] { gamma_euler(Rational(3, 4), {1e-8}); }) == ErrorCode::OutOfDomain);
    CHECK(error_of([] { gamma_euler(Rational(-1, 4), {1e-8}); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("gamma at 1/3 reproduces sigma_3") {
    const BallValue g = gamma_euler(Rational(1, 3), {1e-8});
    const BallValue via = exp(g.scaled(Rational(-1, 3))).scaled(Rational(3, 2));
    CHECK(via.overlaps(somos_b(Base(3), {1e-8})));
}

TEST_CASE("somos_b_via_gamma cross-route") {
    const BallValue two = somos_b_via_gamma(Base(2), {1e-10});
    CHECK(two.rad_double() <= 1e-10);
    CHECK(matches_digits(two, kSigmaDigits));
    for (unsigned long b : {3UL, 10UL}) {
        const BallValue g = somos_b_via_gamma(Base(b), {1e-10});
        const BallValue s = somos_b(Base(b), {1e-10});
        CHECK(g.overlaps(s));
        CHECK(std::fabs(g.mid_double() - s.mid_double()) <= 1e-10);
    }
}

TEST_CASE("log_identity_check") {
    const double expected[] = {std::log(2.0), std::log(1.5), std::log(7.0 / 6.0)};
    const unsigned long bases[] = {2, 3, 7};
    for (int i = 0; i < 3; ++i) {
        const auto r = log_identity_check(Base(bases[i]), {1e-12});
        CHECK(r.series.overlaps(r.closed_form));
        CHECK(r.series.contains(expected[i]) == r.series.contains(expected[i]));
        CHECK(r.closed_form.mid_double() == doctest::Approx(expected[i]).epsilon(1e-15));
        CHECK(r.series.rad_double() <= 1e-12);
    }
    CHECK(log_identity_check(Base(2), {1e-10}).closed_form.mid_double() ==
          doctest::Approx(0.6931471805).epsilon(1e-10));
}

TEST_CASE("khinchin reference digits") {
    const BallValue k = khinchin({1e-6});
    CHECK(k.rad_double() <= 1e-6);
    CHECK(std::fabs(k.mid_double() - kKhinchinDigits) <= k.rad_double() + 1e-10);
    CHECK(k.display().rfind("2.68545", 0) == 0);
}

TEST_CASE("khinchin small N and monotonicity") {
    const BallValue one = khinchin_partial_product(1);
    CHECK(one.mid_double() == 1.0);
    CHECK(one.rad_double() > 1.0);
    double prev = 0.0;
    for (std::size_t n : {2u, 10u, 100u, 1000u, 10000u, 100000u}) {
        const BallValue k = khinchin_partial_product(n);
        CHECK(k.mid_double() >= prev);
        CHECK(k.contains(kKhinchinDigits));
        CHECK(khinchin_terms(n).contains(kKhinchinDigits));
        CHECK(khinchin_terms(n).rad_double() < k.rad_double());
        prev = k.mid_double();
    }
    CHECK(error_of([] { khinchin({1e-9}); }) == ErrorCode::PrecisionUnreachable);
}

TEST_CASE("khinchin tail bound dominates a brute-force tail") {
    // sum_{i=N+1}^{M} log2(i) log(1 + 1/(i(i+2))) with M = 100 N, plus the
    // bound past M, must not exceed the bound at N.
    for (std::size_t n : {2u, 10u, 1000u}) {
        long double s = 0;
        for (std::size_t i = n + 1; i <= 100 * n; ++i) {
            const long double x = static_cast<long double>(i);
            s += std::log2(x) * std::log1p(1.0L / (x * (x + 2)));
        }
        CHECK(static_cast<double>(s) <= khinchin_log_tail_bound(n));
        CHECK(static_cast<double>(s) > 0.5 * khinchin_log_tail_bound(n) * 0.5);
    }
}

TEST_CASE("somos_recurrence reference values") {
    // direct recurrence oracle: 1, 1, 2, 12, 576, 1658880
    std::uint64_t g = 1;
    for (unsigned n = 0; n <= 5; ++n) {
        if (n > 0) g = n * g * g;
        const auto r = somos_recurrence(n);
        REQUIRE(r.g.has_value());
        CHECK(r.g->get_ui() == g);
        CHECK(r.root == doctest::Approx(std::pow(static_cast<double>(g), std::ldexp(1.0, -static_cast<int>(n))))
                            .epsilon(1e-14));
    }
    CHECK(somos_recurrence(3).g->get_ui() == 12);
    CHECK(somos_recurrence(3).root == doctest::Approx(std::pow(12.0, 0.125)).epsilon(1e-15));
    CHECK(somos_recurrence(3).root == doctest::Approx(1.36426).epsilon(1e-5));
    CHECK(somos_recurrence(5).g->get_ui() == 1658880);
    CHECK(somos_recurrence(5).root == doctest::Approx(1.56447).epsilon(1e-5));
    CHECK(somos_recurrence(0).root == 1.0);
}

TEST_CASE("somos_recurrence limits") {
    CHECK(error_of([] { somos_recurrence(31); }) == ErrorCode::ResourceLimit);
    const auto r = somos_recurrence(30);
    CHECK_FALSE(r.g.has_value());
    CHECK(r.root < kSigmaDigits + 1e-10);
    CHECK(r.root > 1.66);
    RecurrenceOptions small;
    small.exact_bits_budget = 100;
    CHECK_FALSE(somos_recurrence(10, small).g.has_value());
    CHECK(somos_recurrence(10, small).root == doctest::Approx(somos_recurrence(10).root).epsilon(1e-15));
}

TEST_CASE("digit_moments for b = 2") {
    const auto m = digit_moments(Base(2), {1e-12});
    CHECK(m.mean_log.mid_double() == doctest::Approx(std::log(kSigmaDigits)).epsilon(1e-9));
    CHECK(m.mean_log.mid_double() == doctest::Approx(0.50783).epsilon(1e-5));
    const long double mean60 = oracle::log_moment(2, 1, 60);
    const long double var60 = oracle::log_moment(2, 2, 60) - mean60 * mean60;
    CHECK(std::fabs(m.var_log.mid_double() - static_cast<double>(var60)) <= m.var_log.rad_double() + 1e-14);
    CHECK(m.var_log.mid_double() == doctest::Approx(0.331).epsilon(1e-2));
    CHECK(m.mean_digit == 2);
    CHECK(exp(m.mean_log).overlaps(somos_b(Base(2), {1e-10})));
}

TEST_CASE("digit_moments mean matches sigma_b for several bases") {
    for (unsigned long b : {3UL, 5UL, 10UL}) {
        const auto m = digit_moments(Base(b), {1e-12});
        CHECK(exp(m.mean_log).overlaps(somos_b(Base(b), {1e-12})));
        CHECK(m.var_log.mid_double() > 0.0);
        CHECK(m.mean_digit == make_rational(Integer(b), Integer(b - 1)));
    }
}
