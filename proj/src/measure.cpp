#include "somos/measure.hpp"

#include "somos/error.hpp"
#include "somos/summation.hpp"

#include <cmath>

namespace somos {

nlohmann::json to_json(const InvarianceReport& report) {
    nlohmann::json branches = nlohmann::json::array();
    for (const auto& [i, m] : report.branch_measures) {
        branches.push_back({{"branch", i}, {"measure", to_string(m)}});
    }
    return {
        {"original_measure", to_string(report.original_measure)},
        {"branch_measures", std::move(branches)},
        {"truncation_index", report.truncation_index},
        {"tail_measure_closed_form", to_string(report.tail_measure_closed_form)},
        {"total", to_string(report.total)},
        {"holds", report.holds()},
    };
}

RationalInterval branch_preimage(const RationalInterval& interval, Digit i, Base base) {
    if (i == 0) throw Error(ErrorCode::InvalidArgument, "branch index must be >= 1");
    const unsigned long b = base.value();
    const Rational shift(b - 1);
    const Rational scale(ipow(b, i));
    Rational lo = (interval.lower() + shift) / scale;
    Rational hi = (interval.upper() + shift) / scale;
    lo.canonicalize();
    hi.canonicalize();
    return RationalInterval(std::move(lo), std::move(hi));
}

InvarianceReport verify_lebesgue_invariance(const RationalInterval& interval, std::size_t truncation,
                                            Base b) {
    if (b.value() != 2) {
        throw Error(ErrorCode::UnsupportedBase,
                    "Lebesgue invariance holds only for b = 2; use verify_shift_invariance");
    }
    if (interval.lower() < 0 || interval.upper() > 1) {
        throw Error(ErrorCode::OutOfRange, "interval " + to_string(interval) + " is not inside (0,1]");
    }
    if (truncation == 0) throw Error(ErrorCode::InvalidArgument, "truncation index must be >= 1");

    InvarianceReport report;
    report.original_measure = interval.length();
    report.truncation_index = truncation;
    report.total = 0;
    for (Digit i = 1; i <= truncation; ++i) {
        Rational len = branch_preimage(interval, i, b).length();
        report.total += len;
        report.branch_measures.emplace_back(i, std::move(len));
    }
    // sum_{i>N} 2^-i |I| = 2^-N |I|
    report.tail_measure_closed_form = report.original_measure / Rational(ipow(2, truncation));
    report.tail_measure_closed_form.canonicalize();
    report.total += report.tail_measure_closed_form;
    report.total.canonicalize();
    return report;
}

Rational cylinder_measure(std::span<const Digit> prefix, Base base) {
    const unsigned long b = base.value();
    Integer num = 1;
    unsigned long total = 0;
    for (Digit m : prefix) {
        if (m == 0) throw Error(ErrorCode::InvalidArgument, "digits must be >= 1");
        num *= b - 1;
        total += m;
    }
    return make_rational(num, ipow(b, total));
}

InvarianceReport verify_shift_invariance(std::span<const Digit> prefix, Base b, std::size_t truncation) {
    if (truncation == 0) throw Error(ErrorCode::InvalidArgument, "truncation index must be >= 1");
    InvarianceReport report;
    report.original_measure = cylinder_measure(prefix, b);
    report.truncation_index = truncation;
    report.total = 0;
    std::vector<Digit> extended(prefix.size() + 1);
    std::copy(prefix.begin(), prefix.end(), extended.begin() + 1);
    for (Digit i = 1; i <= truncation; ++i) {
        extended[0] = i;
        Rational m = cylinder_measure(extended, b);
        report.total += m;
        report.branch_measures.emplace_back(i, std::move(m));
    }
    // sum_{i>N} (b-1) b^-i mu(C) = b^-N mu(C)
    report.tail_measure_closed_form = report.original_measure / Rational(ipow(b.value(), truncation));
    report.tail_measure_closed_form.canonicalize();
    report.total += report.tail_measure_closed_form;
    report.total.canonicalize();
    return report;
}

double birkhoff_average(std::span<const Digit> digits, std::size_t k) {
    if (k == 0 || k > digits.size()) {
        throw Error(ErrorCode::InvalidArgument, "birkhoff_average needs 1 <= k <= number of digits");
    }
    CompensatedSum sum;
    for (std::size_t j = 0; j < k; ++j) {
        if (digits[j] == 0) throw Error(ErrorCode::InvalidArgument, "digits must be >= 1");
        sum += std::log(static_cast<double>(digits[j]));
    }
    return sum.value() / static_cast<double>(k);
}

} // namespace somos
