#include "somos/digits.hpp"

#include "somos/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>

namespace somos {

namespace {

constexpr unsigned long kMaxBase = 1UL << 31;

using U128 = unsigned __int128;

// Positions (1-based) of the digit b-1 in the non-terminating base-b
// expansion of p/q, over the pre-period followed by exactly one period.
struct DivisionTrace {
    std::vector<std::size_t> top_positions;
    std::size_t preperiod = 0;
    std::size_t period = 0;
};

std::size_t preperiod_length(Integer q, unsigned long b) {
    std::size_t steps = 0;
    Integer g = gcd(q, Integer(b));
    while (g > 1) {
        q /= g;
        ++steps;
        g = gcd(q, Integer(b));
    }
    return steps;
}

// Remainder state r in (0, q] with x_tail = r/q; the next digit is the largest
// d with d/b < r/q strictly, which keeps every tail nonzero.
template <typename Int>
DivisionTrace trace_division(Int r, const Int q, const unsigned long b, std::size_t preperiod,
                             std::size_t max_positions) {
    DivisionTrace trace;
    trace.preperiod = preperiod;
    const Int top = Int(b - 1);
    std::size_t pos = 0;
    auto step = [&] {
        if (++pos > max_positions) {
            throw Error(ErrorCode::ResourceLimit,
                        "expansion needs more than " + std::to_string(max_positions) + " base-" +
                            std::to_string(b) + " positions");
        }
        const Int scaled = r * Int(b);
        const Int d = (scaled - 1) / q;
        r = scaled - d * q;
        if (d == top) {
            trace.top_positions.push_back(pos);
        } else if (d != 0) {
            throw Error(ErrorCode::NotRepresentable,
                        "base-" + std::to_string(b) + " expansion contains a digit outside {0, " +
                            std::to_string(b - 1) + "}");
        }
    };
    for (std::size_t i = 0; i < preperiod; ++i) step();
    const Int anchor = r;
    do {
        step();
    } while (r != anchor);
    trace.period = pos - preperiod;
    return trace;
}

DigitSeq digits_from_trace(const DivisionTrace& t) {
    const auto& pos = t.top_positions;
    const auto first_cycle = std::upper_bound(pos.begin(), pos.end(), t.preperiod);
    // A nonzero tail forces at least one top digit inside every period.
    if (first_cycle == pos.end()) throw Error(ErrorCode::InvalidArgument, "degenerate expansion");

    std::vector<Digit> prefix;
    std::size_t last = 0;
    for (auto it = pos.begin(); it != std::next(first_cycle); ++it) {
        prefix.push_back(*it - last);
        last = *it;
    }
    std::vector<Digit> cycle;
    for (auto it = std::next(first_cycle); it != pos.end(); ++it) {
        cycle.push_back(*it - last);
        last = *it;
    }
    cycle.push_back(*first_cycle + t.period - last);
    return DigitSeq(std::move(prefix), std::move(cycle));
}

void check_unit_interval(const Rational& x) {
    if (x <= 0 || x > 1) {
        throw Error(ErrorCode::OutOfRange, "x = " + to_string(x) + " is outside (0,1]");
    }
}

Digit parse_digit(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    Digit d = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec != std::errc{} || ptr != s.data() + s.size() || d == 0) {
        throw Error(ErrorCode::InvalidArgument, "invalid digit \"" + std::string(s) + "\"");
    }
    return d;
}

std::vector<Digit> parse_digit_list(std::string_view s) {
    std::vector<Digit> out;
    if (s.find_first_not_of(" \t") == std::string_view::npos) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(parse_digit(s.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

void append_list(std::string& out, const std::vector<Digit>& ds) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(ds[i]);
    }
}

} // namespace

Base::Base(unsigned long value) : value_(value) {
    if (value < 2 || value > kMaxBase) {
        throw Error(ErrorCode::InvalidArgument, "base must satisfy 2 <= b <= 2^31, got " + std::to_string(value));
    }
}

DigitSeq::DigitSeq(std::vector<Digit> prefix, std::vector<Digit> cycle)
    : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
    auto positive = [](Digit d) { return d >= 1; };
    if (!std::all_of(prefix_.begin(), prefix_.end(), positive) ||
        !std::all_of(cycle_.begin(), cycle_.end(), positive)) {
        throw Error(ErrorCode::InvalidArgument, "digits must be >= 1");
    }
    normalize();
}

void DigitSeq::normalize() {
    if (cycle_.empty()) return;
    const std::size_t n = cycle_.size();
    for (std::size_t p = 1; p < n; ++p) {
        if (n % p != 0) continue;
        bool periodic = true;
        for (std::size_t i = p; i < n && periodic; ++i) periodic = cycle_[i] == cycle_[i - p];
        if (periodic) {
            cycle_.resize(p);
            break;
        }
    }
    while (!prefix_.empty() && prefix_.back() == cycle_.back()) {
        prefix_.pop_back();
        std::rotate(cycle_.rbegin(), cycle_.rbegin() + 1, cycle_.rend());
    }
}

Digit DigitSeq::at(std::size_t k) const {
    if (k < prefix_.size()) return prefix_[k];
    if (cycle_.empty()) throw Error(ErrorCode::OutOfRange, "digit index past end of finite sequence");
    return cycle_[(k - prefix_.size()) % cycle_.size()];
}

std::vector<Digit> DigitSeq::take(std::size_t k) const {
    std::vector<Digit> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(at(i));
    return out;
}

std::string to_string(const DigitSeq& digits) {
    std::string out = "[";
    append_list(out, digits.prefix());
    out += ';';
    append_list(out, digits.cycle());
    out += ']';
    return out;
}

DigitSeq parse_digit_seq(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
        throw Error(ErrorCode::InvalidArgument, "digit sequence must look like [n1,n2,...;c1,...]");
    }
    text = text.substr(1, text.size() - 2);
    const auto semi = text.find(';');
    if (semi == std::string_view::npos) return DigitSeq(parse_digit_list(text));
    return DigitSeq(parse_digit_list(text.substr(0, semi)), parse_digit_list(text.substr(semi + 1)));
}

DigitSeq encode_digits(const Rational& x, Base base, const EncodeOptions& options) {
    check_unit_interval(x);
    const unsigned long b = base.value();
    const Integer& p = x.get_num();
    const Integer& q = x.get_den();
    const std::size_t preperiod = preperiod_length(q, b);
    DivisionTrace trace;
    if (q.fits_ulong_p() && q.get_ui() <= std::numeric_limits<std::uint64_t>::max()) {
        trace = trace_division<U128>(U128(p.get_ui()), U128(q.get_ui()), b, preperiod, options.max_positions);
    } else {
        trace = trace_division<Integer>(p, q, b, preperiod, options.max_positions);
    }
    return digits_from_trace(trace);
}

Rational decode_exact(const DigitSeq& digits, Base base) {
    if (!digits.is_infinite()) {
        throw Error(ErrorCode::InvalidArgument, "decode_exact needs a sequence with a cycle");
    }
    const unsigned long b = base.value();
    // Horner accumulation: after n_1..n_m, acc = sum_j b^(s_m - s_j).
    auto accumulate = [b](const std::vector<Digit>& ds, Integer& acc, unsigned long& total) {
        for (Digit d : ds) {
            acc = acc * ipow(b, d) + 1;
            total += d;
        }
    };
    Integer head = 0, tail = 0;
    unsigned long head_len = 0, tail_len = 0;
    accumulate(digits.prefix(), head, head_len);
    accumulate(digits.cycle(), tail, tail_len);
    // (b-1) [ head / b^S + tail / (b^S (b^T - 1)) ]
    const Integer scale = ipow(b, head_len);
    const Integer period = ipow(b, tail_len) - 1;
    return make_rational(Integer(b - 1) * (head * period + tail), scale * period);
}

PrefixDecode decode_prefix(std::span<const Digit> digits, Base base) {
    const unsigned long b = base.value();
    Integer acc = 0;
    unsigned long total = 0;
    for (Digit d : digits) {
        if (d == 0) throw Error(ErrorCode::InvalidArgument, "digits must be >= 1");
        acc = acc * ipow(b, d) + 1;
        total += d;
    }
    const Integer scale = ipow(b, total);
    Rational partial = make_rational(Integer(b - 1) * acc, scale);
    Rational upper = partial + make_rational(1, scale);
    return {partial, RationalInterval(partial, std::move(upper))};
}

PrefixDecode decode_prefix(const DigitSeq& digits, Base b, std::size_t k) {
    const auto head = digits.take(k);
    return decode_prefix(std::span<const Digit>(head), b);
}

RationalInterval branch_interval(Digit i, Base base) {
    if (i == 0) throw Error(ErrorCode::InvalidArgument, "branch index must be >= 1");
    const unsigned long b = base.value();
    const Integer pw = ipow(b, i);
    return RationalInterval(make_rational(Integer(b - 1), pw), make_rational(Integer(b), pw));
}

ShiftStep apply_T(const Rational& x, Base base) {
    check_unit_interval(x);
    const unsigned long b = base.value();
    const Integer& p = x.get_num();
    const Integer& q = x.get_den();
    const Integer lower_scale = Integer(b - 1) * q;
    Integer pw = b;
    Digit i = 1;
    while (p * pw <= lower_scale) {
        pw *= b;
        ++i;
    }
    // x > (b-1) b^-i; x must also satisfy x <= b^(1-i), i.e. p b^i <= b q.
    if (p * pw > Integer(b) * q) {
        throw Error(ErrorCode::GapPoint, "x = " + to_string(x) + " lies between branches " + std::to_string(i - 1) +
                                             " and " + std::to_string(i) + " of T_" + std::to_string(b));
    }
    return {i, make_rational(p * pw - lower_scale, q)};
}

std::vector<Digit> orbit_digits(const Rational& x, Base b, std::size_t k) {
    std::vector<Digit> out;
    out.reserve(k);
    Rational current = x;
    for (std::size_t j = 0; j < k; ++j) {
        auto step = apply_T(current, b);
        out.push_back(step.digit);
        current = std::move(step.image);
    }
    return out;
}

std::vector<Digit> digits_from_bitstream(std::span<const std::uint8_t> bits) {
    std::vector<Digit> out;
    RunLengthParser parser;
    for (auto bit : bits) {
        if (auto d = parser.feed_bit(bit != 0)) out.push_back(*d);
    }
    return out;
}

} // namespace somos
