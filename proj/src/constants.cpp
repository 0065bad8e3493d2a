#include "somos/constants.hpp"

#include "somos/error.hpp"
#include "somos/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace somos {

namespace {

constexpr mpfr_prec_t kMaxPrecision = 4096;
constexpr int kGuardBits = 30;

void check_request(double target, std::size_t max_terms) {
    if (!(target > 0) || !std::isfinite(target)) {
        throw Error(ErrorCode::InvalidArgument, "target radius must be a positive finite number");
    }
    if (max_terms == 0) throw Error(ErrorCode::InvalidArgument, "max_terms must be >= 1");
}

[[noreturn]] void unreachable(const char* what, double target, std::size_t max_terms) {
    throw Error(ErrorCode::PrecisionUnreachable, std::string(what) + ": radius " + std::to_string(target) +
                                                     " is not reachable within " + std::to_string(max_terms) +
                                                     " terms");
}

double rational_to_double_up(const Rational& q) {
    BigFloat f(64);
    mpfr_set_q(f.get(), q.get_mpq_t(), MPFR_RNDU);
    return f.to_double(MPFR_RNDU);
}

// (b-1) sum_{i=2..N} b^-i (log i)^power
BallValue weighted_log_sum(Base base, std::size_t terms, int power, mpfr_prec_t precision) {
    const unsigned long b = base.value();
    BallValue sum(precision);
    Integer pw = b;
    for (std::size_t i = 2; i <= terms; ++i) {
        pw *= b;
        BallValue term = log(BallValue::from_integer(static_cast<long>(i), precision));
        if (power == 2) term = term * term;
        sum = sum + term.scaled(make_rational(Integer(b - 1), pw));
    }
    return sum;
}

// Smallest N in [1, max_terms] with bound(N) <= limit, for a nonincreasing bound.
template <typename Bound>
std::optional<std::size_t> first_terms_within(Bound&& bound, double limit, std::size_t max_terms) {
    if (bound(max_terms) > limit) return std::nullopt;
    std::size_t lo = 1, hi = max_terms;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (bound(mid) <= limit) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

// Computes with the chosen N and grows N while rounding keeps the radius
// above target.
template <typename Compute>
BallValue refine(Compute&& compute, std::size_t terms, double target, std::size_t max_terms, const char* what) {
    while (true) {
        BallValue v = compute(terms, working_precision(target, terms));
        if (v.rad_double() <= target) return v;
        if (terms >= max_terms) unreachable(what, target, max_terms);
        terms = std::min(max_terms, terms + 1 + terms / 4);
    }
}

} // namespace

mpfr_prec_t working_precision(double target_radius, std::size_t terms) {
    const double bits = std::ceil(-std::log2(target_radius)) + kGuardBits +
                        std::ceil(std::log2(static_cast<double>(terms) + 2.0)) + 8;
    if (bits > static_cast<double>(kMaxPrecision)) {
        throw Error(ErrorCode::PrecisionUnreachable, "target radius needs more than 4096 bits");
    }
    return std::max<mpfr_prec_t>(64, static_cast<mpfr_prec_t>(bits));
}

Rational somos_log_tail_bound(Base base, std::size_t terms) {
    const unsigned long b = base.value();
    const Integer n(static_cast<unsigned long>(terms));
    return make_rational(Integer(b - 1) * n + b, Integer(b - 1) * ipow(b, terms));
}

BallValue somos_b_terms(Base b, std::size_t terms, mpfr_prec_t precision) {
    if (terms == 0) throw Error(ErrorCode::InvalidArgument, "at least one term is required");
    BallValue log_sigma = weighted_log_sum(b, terms, 1, precision);
    log_sigma.inflate(somos_log_tail_bound(b, terms));
    return exp(log_sigma);
}

BallValue somos_terms(std::size_t terms, mpfr_prec_t precision) { return somos_b_terms(Base(2), terms, precision); }

BallValue somos_b(Base b, const PrecisionRequest& request) {
    check_request(request.target_radius, request.max_terms);
    // sigma_b < 2 and e^t - 1 < 2t for small t, so 4 * tail <= target suffices
    // before rounding.
    auto bound = [&](std::size_t n) { return 4.0 * rational_to_double_up(somos_log_tail_bound(b, n)); };
    const auto terms = first_terms_within(bound, request.target_radius, request.max_terms);
    if (!terms) unreachable("somos_b", request.target_radius, request.max_terms);
    return refine([&](std::size_t n, mpfr_prec_t p) { return somos_b_terms(b, n, p); }, *terms,
                  request.target_radius, request.max_terms, "somos_b");
}

BallValue somos_constant(const PrecisionRequest& request) { return somos_b(Base(2), request); }

BallValue gamma_euler_terms(const Rational& z, std::size_t terms, mpfr_prec_t precision) {
    if (z <= 0 || z > Rational(1, 2)) {
        throw Error(ErrorCode::OutOfDomain, "gamma_euler needs z in (0, 1/2], got " + to_string(z));
    }
    if (terms == 0) throw Error(ErrorCode::InvalidArgument, "at least one term is required");
    BallValue sum(precision);
    Rational zpow = 1;
    for (std::size_t i = 1; i <= terms; ++i) {
        const Integer n(static_cast<unsigned long>(i));
        BallValue term = BallValue::from_rational(make_rational(1, n), precision) -
                         log(BallValue::from_rational(make_rational(n + 1, n), precision));
        sum = sum + term.scaled(zpow);
        zpow *= z;
    }
    // 0 < 1/i - log(1 + 1/i) < 1/(2 i^2)
    const Integer next(static_cast<unsigned long>(terms + 1));
    Rational tail = zpow / (Rational(2) * Rational(next * next) * (Rational(1) - z));
    tail.canonicalize();
    sum.inflate(tail);
    return sum;
}

BallValue gamma_euler(const Rational& z, const PrecisionRequest& request) {
    check_request(request.target_radius, request.max_terms);
    if (z <= 0 || z > Rational(1, 2)) {
        throw Error(ErrorCode::OutOfDomain, "gamma_euler needs z in (0, 1/2], got " + to_string(z));
    }
    const double zd = z.get_d();
    auto bound = [&](std::size_t n) {
        const double np1 = static_cast<double>(n) + 1.0;
        return 2.0 * std::pow(zd, static_cast<double>(n)) / (2.0 * np1 * np1 * (1.0 - zd));
    };
    const auto terms = first_terms_within(bound, request.target_radius, request.max_terms);
    if (!terms) unreachable("gamma_euler", request.target_radius, request.max_terms);
    return refine([&](std::size_t n, mpfr_prec_t p) { return gamma_euler_terms(z, n, p); }, *terms,
                  request.target_radius, request.max_terms, "gamma_euler");
}

BallValue somos_b_via_gamma(Base base, const PrecisionRequest& request) {
    check_request(request.target_radius, request.max_terms);
    const unsigned long b = base.value();
    const Rational z = make_rational(1, Integer(b));
    // d sigma_b / d gamma = -sigma_b / b and sigma_b < 2.
    double gamma_target = request.target_radius * static_cast<double>(b) / 8.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        const BallValue g = gamma_euler(z, {gamma_target, request.max_terms});
        BallValue sigma = exp(g.scaled(make_rational(-1, Integer(b)))).scaled(make_rational(Integer(b), Integer(b - 1)));
        if (sigma.rad_double() <= request.target_radius) return sigma;
        gamma_target /= 4.0;
    }
    unreachable("somos_b_via_gamma", request.target_radius, request.max_terms);
}

LogIdentity log_identity_check(Base base, const PrecisionRequest& request) {
    check_request(request.target_radius, request.max_terms);
    const unsigned long b = base.value();
    // sum_{i>N} b^-i / i <= b^-N / ((N+1)(b-1))
    auto tail = [b](std::size_t n) {
        return make_rational(1, Integer(static_cast<unsigned long>(n + 1)) * Integer(b - 1) * ipow(b, n));
    };
    auto bound = [&](std::size_t n) { return 2.0 * rational_to_double_up(tail(n)); };
    const auto terms = first_terms_within(bound, request.target_radius, request.max_terms);
    if (!terms) unreachable("log_identity_check", request.target_radius, request.max_terms);
    const mpfr_prec_t precision = working_precision(request.target_radius, *terms);

    Rational partial = 0;
    for (std::size_t i = 1; i <= *terms; ++i) {
        partial += make_rational(1, Integer(static_cast<unsigned long>(i)) * ipow(b, i));
    }
    partial.canonicalize();
    BallValue series = BallValue::from_rational(partial, precision);
    series.inflate(tail(*terms));
    BallValue closed = log(BallValue::from_rational(make_rational(Integer(b), Integer(b - 1)), precision));
    return {std::move(series), std::move(closed)};
}

double khinchin_log_tail_bound(std::size_t terms) {
    // log(1 + 1/(i(i+2))) < 1/i^2 and log2(x)/x^2 decreases for x >= 2, so the
    // tail past N >= 2 is at most the integral (ln N + 1) / (N ln 2).
    if (terms < 2) return 0.125 + khinchin_log_tail_bound(2);
    const double n = static_cast<double>(terms);
    return (std::log(n) + 1.0) / (n * std::log(2.0)) * (1.0 + 1e-12);
}

namespace {

struct KhinchinLogSum {
    double partial;   // sum_{i=2..N} log2(i) log(1 + 1/(i(i+2)))
    double rounding;  // bound on the floating-point error of `partial`
    double tail;      // bound on the omitted terms
};

KhinchinLogSum khinchin_log_sum(std::size_t terms) {
    if (terms == 0) throw Error(ErrorCode::InvalidArgument, "at least one term is required");
    CompensatedSum sum;
    double magnitude = 0.0;
    for (std::size_t i = 2; i <= terms; ++i) {
        const double x = static_cast<double>(i);
        const double t = std::log2(x) * std::log1p(1.0 / (x * (x + 2.0)));
        sum += t;
        magnitude += t;
    }
    // Each term carries at most ~8 roundings (product, quotient, two libm
    // calls at <= 1 ulp); the compensated sum adds 2u|S| + O(N u^2).
    constexpr double u = std::numeric_limits<double>::epsilon() / 2;
    const double n = static_cast<double>(terms);
    return {sum.value(), (18.0 * u + 4.0 * n * u * u) * magnitude * 1.01, khinchin_log_tail_bound(terms)};
}

} // namespace

BallValue khinchin_partial_product(std::size_t terms) {
    const KhinchinLogSum s = khinchin_log_sum(terms);
    BallValue log_k = BallValue::from_rational(Rational(s.partial), 128);
    log_k.inflate(s.rounding);
    log_k.inflate(s.tail);
    return exp(log_k);
}

BallValue khinchin_terms(std::size_t terms) {
    const KhinchinLogSum s = khinchin_log_sum(terms);
    const Rational half_tail = Rational(s.tail) / 2;
    BallValue log_k = BallValue::from_rational(Rational(s.partial) + half_tail, 128);
    log_k.inflate(s.rounding);
    log_k.inflate(half_tail);
    return exp(log_k);
}

BallValue khinchin(const KhinchinRequest& request) {
    check_request(request.target_radius, request.max_terms);
    constexpr double kUpper = 2.69;
    auto bound = [&](std::size_t n) { return kUpper * std::expm1(0.5 * khinchin_log_tail_bound(n) + 1e-14); };
    const auto terms = first_terms_within(bound, request.target_radius * 0.99, request.max_terms);
    if (!terms) unreachable("khinchin", request.target_radius, request.max_terms);
    BallValue k = khinchin_terms(*terms);
    if (k.rad_double() > request.target_radius) unreachable("khinchin", request.target_radius, request.max_terms);
    return k;
}

RecurrenceValue somos_recurrence(unsigned n, const RecurrenceOptions& options) {
    if (n > options.max_n) {
        throw Error(ErrorCode::ResourceLimit, "somos_recurrence is capped at n = " + std::to_string(options.max_n));
    }
    RecurrenceValue out;
    out.n = n;
    constexpr mpfr_prec_t precision = 192;
    // log2 g_n = 2^n sum_{k<=n} 2^-k log2 k < 0.733 * 2^n
    const double estimated_bits = std::ldexp(0.733, static_cast<int>(n)) + 64;
    BigFloat log_root(precision);
    if (estimated_bits <= static_cast<double>(options.exact_bits_budget)) {
        Integer g = 1;
        for (unsigned k = 1; k <= n; ++k) g = g * g * k;
        BigFloat gf(precision);
        mpfr_set_z(gf.get(), g.get_mpz_t(), MPFR_RNDN);
        mpfr_log(log_root.get(), gf.get(), MPFR_RNDN);
        mpfr_div_2ui(log_root.get(), log_root.get(), n, MPFR_RNDN);
        out.g = std::move(g);
    } else {
        BigFloat term(precision);
        for (unsigned k = 2; k <= n; ++k) {
            mpfr_set_ui(term.get(), k, MPFR_RNDN);
            mpfr_log(term.get(), term.get(), MPFR_RNDN);
            mpfr_div_2ui(term.get(), term.get(), k, MPFR_RNDN);
            mpfr_add(log_root.get(), log_root.get(), term.get(), MPFR_RNDN);
        }
    }
    mpfr_exp(log_root.get(), log_root.get(), MPFR_RNDN);
    out.root = log_root.to_double();
    return out;
}

DigitMoments digit_moments(Base b, const PrecisionRequest& request) {
    check_request(request.target_radius, request.max_terms);
    // (log i)^2 < i as well, so both sums share the tail bound.
    auto bound = [&](std::size_t n) { return 8.0 * rational_to_double_up(somos_log_tail_bound(b, n)); };
    const auto terms = first_terms_within(bound, request.target_radius, request.max_terms);
    if (!terms) unreachable("digit_moments", request.target_radius, request.max_terms);
    const mpfr_prec_t precision = working_precision(request.target_radius, *terms);
    const Rational tail = somos_log_tail_bound(b, *terms);

    BallValue mean = weighted_log_sum(b, *terms, 1, precision);
    mean.inflate(tail);
    BallValue second = weighted_log_sum(b, *terms, 2, precision);
    second.inflate(tail);
    BallValue var = second - mean * mean;
    return {std::move(mean), std::move(var), make_rational(Integer(b.value()), Integer(b.value() - 1))};
}

} // namespace somos
