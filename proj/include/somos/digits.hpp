#pragma once

#include "somos/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace somos {

using Digit = std::uint64_t;

/// Radix of the run-length expansion, b >= 2.
class Base {
public:
    explicit Base(unsigned long value);
    unsigned long value() const noexcept { return value_; }
    friend bool operator==(Base, Base) = default;

private:
    unsigned long value_;
};

/// Sequence of run-length digits: `prefix` followed by `cycle` repeated forever.
///
/// A sequence without a cycle is a finite digit prefix (e.g. the output of
/// orbit_digits); it denotes a cylinder rather than a single real. Sequences
/// are kept in normal form: the cycle is primitive and the prefix is as short
/// as possible, so equal values compare equal.
class DigitSeq {
public:
    DigitSeq() = default;
    DigitSeq(std::vector<Digit> prefix, std::vector<Digit> cycle = {});

    const std::vector<Digit>& prefix() const noexcept { return prefix_; }
    const std::vector<Digit>& cycle() const noexcept { return cycle_; }
    bool is_infinite() const noexcept { return !cycle_.empty(); }

    /// k-th digit (0-based), unrolling the cycle.
    Digit at(std::size_t k) const;

    /// First k digits. Throws if the sequence is finite and shorter than k.
    std::vector<Digit> take(std::size_t k) const;

    friend bool operator==(const DigitSeq&, const DigitSeq&) = default;

private:
    void normalize();

    std::vector<Digit> prefix_;
    std::vector<Digit> cycle_;
};

/// Text form `[n1,n2,...;c1,c2,...]`; the part after ';' is the cycle.
std::string to_string(const DigitSeq& digits);
DigitSeq parse_digit_seq(std::string_view text);

struct EncodeOptions {
    // Maximum number of base-b positions examined (pre-period plus period).
    std::size_t max_positions = 1'000'000;
};

/// Exact run-length expansion of x in (0,1] using the non-terminating base-b
/// expansion. Throws OutOfRange, NotRepresentable (b >= 3 and a base-b digit
/// outside {0, b-1}) or ResourceLimit.
DigitSeq encode_digits(const Rational& x, Base b, const EncodeOptions& options = {});

/// Closed-form value (b-1) * sum_k b^-(n_1+...+n_k) of an infinite sequence.
Rational decode_exact(const DigitSeq& digits, Base b);

struct PrefixDecode {
    Rational partial_sum;
    RationalInterval cylinder;
};

/// Partial sum of the first k digits and the cylinder of all reals sharing
/// them. For k == 0 the cylinder is (0,1].
PrefixDecode decode_prefix(const DigitSeq& digits, Base b, std::size_t k);
PrefixDecode decode_prefix(std::span<const Digit> digits, Base b);

/// Domain of branch i of the shift map: ((b-1) b^-i, b^(1-i)].
RationalInterval branch_interval(Digit i, Base b);

struct ShiftStep {
    Digit digit;
    Rational image;
};

/// One step of the shift map: x -> b^i x - (b-1) on branch i. Throws
/// OutOfRange, or GapPoint when b >= 3 and x lies between branch domains.
ShiftStep apply_T(const Rational& x, Base b);

/// First k digits obtained by iterating apply_T.
std::vector<Digit> orbit_digits(const Rational& x, Base b, std::size_t k);

/// Streaming run-length parser for binary expansions: emits the gap between
/// successive one bits (the first digit is the position of the first one).
class RunLengthParser {
public:
    /// Feeds one bit; returns the completed digit if this bit closed a run.
    std::optional<Digit> feed_bit(bool bit) noexcept {
        ++gap_;
        if (!bit) return std::nullopt;
        Digit d = gap_;
        gap_ = 0;
        return d;
    }

    /// Feeds 64 bits, most significant first, calling sink(digit) for every
    /// completed run. Stops early and returns false once sink returns false.
    template <typename Sink>
    bool feed_word(std::uint64_t word, Sink&& sink);

    /// Number of bits consumed since the last emitted digit.
    Digit pending() const noexcept { return gap_; }

private:
    Digit gap_ = 0;
};

template <typename Sink>
bool RunLengthParser::feed_word(std::uint64_t word, Sink&& sink) {
    int remaining = 64;
    while (word != 0) {
        const int zeros = __builtin_clzll(word);
        gap_ += static_cast<Digit>(zeros) + 1;
        const Digit d = gap_;
        gap_ = 0;
        remaining -= zeros + 1;
        word = remaining == 0 ? 0 : word << (zeros + 1);
        if (!sink(d)) return false;
    }
    gap_ += static_cast<Digit>(remaining);
    return true;
}

/// Run-length parse of a finite bitstream. Trailing zeros after the last one
/// do not produce a digit.
std::vector<Digit> digits_from_bitstream(std::span<const std::uint8_t> bits);

} // namespace somos
