#pragma once

#include "somos/ball.hpp"
#include "somos/digits.hpp"
#include "somos/rational.hpp"

#include <cstddef>
#include <optional>
#include <utility>

namespace somos {

struct PrecisionRequest {
    double target_radius = 1e-10;
    std::size_t max_terms = 100'000;
};

// Every constant is produced twice: a `*_terms` form that sums a fixed number
// of terms and reports whatever radius the tail bound gives, and a
// PrecisionRequest form that picks the term count for a target radius and
// throws PrecisionUnreachable when max_terms is not enough.

/// Working precision (bits) used for a target radius and term count.
mpfr_prec_t working_precision(double target_radius, std::size_t terms);

/// Somos' constant prod_i i^(2^-i).
BallValue somos_constant(const PrecisionRequest& request);
BallValue somos_terms(std::size_t terms, mpfr_prec_t precision = 128);

/// sigma_b = prod_i i^((b-1) b^-i).
BallValue somos_b(Base b, const PrecisionRequest& request);
BallValue somos_b_terms(Base b, std::size_t terms, mpfr_prec_t precision = 128);

/// Bound on (b-1) sum_{i>N} b^-i log i, from log i < i:
/// b^-N ((b-1) N + b) / (b-1).
Rational somos_log_tail_bound(Base b, std::size_t terms);

/// gamma(z) = sum_{i>=1} z^(i-1) (1/i - log((i+1)/i)) for rational z in (0, 1/2].
BallValue gamma_euler(const Rational& z, const PrecisionRequest& request);
BallValue gamma_euler_terms(const Rational& z, std::size_t terms, mpfr_prec_t precision = 128);

/// sigma_b through the generalized Euler constant:
/// sigma_b = b/(b-1) exp(-gamma(1/b)/b).
BallValue somos_b_via_gamma(Base b, const PrecisionRequest& request);

struct LogIdentity {
    BallValue series;       // sum_{i>=1} b^-i / i
    BallValue closed_form;  // log(b/(b-1))
};
LogIdentity log_identity_check(Base b, const PrecisionRequest& request);

struct KhinchinRequest {
    double target_radius = 1e-6;
    std::size_t max_terms = 100'000'000;
};

/// Khinchin's constant from the plain partial product over i = 2..N.
///
/// The product and the tail bound give the enclosure [P_N, P_N e^U]; the
/// returned ball is centred on it. No series acceleration is used, so the
/// default term cap limits the radius to a few 1e-7.
BallValue khinchin(const KhinchinRequest& request);
BallValue khinchin_terms(std::size_t terms);

/// Same enclosure with the partial product P_N itself as midpoint.
BallValue khinchin_partial_product(std::size_t terms);

/// Upper bound on sum_{i>N} log2(i) log(1 + 1/(i(i+2))).
double khinchin_log_tail_bound(std::size_t terms);

struct RecurrenceOptions {
    unsigned max_n = 30;
    // Largest g_n (in bits) that is materialized exactly.
    std::size_t exact_bits_budget = std::size_t{1} << 24;
};

struct RecurrenceValue {
    unsigned n = 0;
    std::optional<Integer> g;  // empty when g_n exceeds the exact budget
    double root = 1.0;         // g_n^(2^-n)
};

/// g_0 = 1, g_n = n g_{n-1}^2.
RecurrenceValue somos_recurrence(unsigned n, const RecurrenceOptions& options = {});

struct DigitMoments {
    BallValue mean_log;  // E[log n] = log sigma_b
    BallValue var_log;   // Var[log n]
    Rational mean_digit; // E[n] = b/(b-1)
};

/// Moments of log n under P(n = i) = (b-1) b^-i.
DigitMoments digit_moments(Base b, const PrecisionRequest& request);

} // namespace somos
