#pragma once

#include "somos/digits.hpp"
#include "somos/rational.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace somos {

/// Exact bookkeeping for one invariance check: the measure of a set against
/// the measure of its preimage, split into N explicit branches plus the
/// closed-form remainder of the branch series.
struct InvarianceReport {
    Rational original_measure;
    std::vector<std::pair<Digit, Rational>> branch_measures;
    std::size_t truncation_index = 0;
    Rational tail_measure_closed_form;
    Rational total;

    bool holds() const { return total == original_measure; }
};

/// Rationals are written as "p/q" strings.
nlohmann::json to_json(const InvarianceReport& report);

/// Preimage of I under branch i of the shift map, x -> b^i x - (b-1).
RationalInterval branch_preimage(const RationalInterval& interval, Digit i, Base b);

/// Lebesgue measure of T^-1(I) versus |I| for the binary map. Only b = 2 is
/// supported; Lebesgue measure is not invariant for larger bases.
InvarianceReport verify_lebesgue_invariance(const RationalInterval& interval, std::size_t truncation,
                                            Base b = Base(2));

/// Measure of the digit cylinder [m_1..m_k] under the product law with
/// P(n = i) = (b-1) b^-i.
Rational cylinder_measure(std::span<const Digit> prefix, Base b);

/// mu_b of the shift preimage of a cylinder versus mu_b of the cylinder.
InvarianceReport verify_shift_invariance(std::span<const Digit> prefix, Base b, std::size_t truncation);

/// (1/k) sum_{j<k} log(n_j): the log of the geometric mean of the first k
/// digits, accumulated with compensated summation.
double birkhoff_average(std::span<const Digit> digits, std::size_t k);

} // namespace somos
