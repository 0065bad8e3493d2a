#pragma once

#include "somos/digits.hpp"
#include "somos/summation.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace somos {

struct RngSeed {
    std::uint64_t value = 0;
    friend bool operator==(RngSeed, RngSeed) = default;
};

/// SplitMix64 output function; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** (period 2^256 - 1), state filled from a SplitMix64 stream.
class Xoshiro256 {
public:
    static constexpr std::string_view kName = "xoshiro256**";

    explicit Xoshiro256(RngSeed seed) noexcept;
    /// Raw state; must not be all zero.
    explicit Xoshiro256(const std::array<std::uint64_t, 4>& state) noexcept : state_(state) {}

    std::uint64_t operator()() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> state_{};
};

/// Seed of trajectory `index` in an ensemble: mix64(base ^ index).
RngSeed derive_seed(RngSeed base, std::uint64_t index) noexcept;

namespace detail {

// Exact comparison once a threshold b^-j lands inside the dyadic cell of the
// first word; consumes further words until the comparison resolves.
Digit sample_digit_slow(unsigned long b, Digit j, std::uint64_t first_word,
                        const std::function<std::uint64_t()>& more_words);

} // namespace detail

/// Draws i >= 1 with probability exactly (b-1) b^-i.
///
/// The uniform variate V in (0,1] is read as (u + V') / 2^64 with u the first
/// word, and the digit is the first j with V > b^-j. Each comparison is
/// decided exactly from the cell (u, u+1] / 2^64; only when b^-j falls inside
/// that cell are more words consumed.
template <typename Gen>
Digit sample_digit(Base base, Gen& gen) {
    using U128 = unsigned __int128;
    constexpr U128 two64 = U128(1) << 64;
    const unsigned long b = base.value();
    const std::uint64_t u = gen();
    auto more = [&gen]() -> std::uint64_t { return gen(); };
    if (u == 0) return detail::sample_digit_slow(b, 1, u, more);
    U128 pw = b;
    for (Digit j = 1;; ++j) {
        if (pw >= two64) return j;
        const U128 low = U128(u) * pw;
        if (low >= two64) return j;
        if (low + pw > two64) return detail::sample_digit_slow(b, j, u, more);
        pw *= b;
    }
}

// Digits above this value share the last histogram slot.
inline constexpr std::size_t kHistogramSlots = 64;

struct TrajectoryStats {
    std::size_t steps = 0;
    CompensatedSum sum_log;
    CompensatedSum sum_log_sq;
    std::vector<std::pair<std::size_t, double>> checkpoints;  // (step, geometric mean)
    std::array<std::uint64_t, kHistogramSlots + 1> digit_counts{};  // index = digit, last = overflow

    void add(Digit d);
    double log_average() const { return sum_log.value() / static_cast<double>(steps); }
    double geometric_mean() const;
    friend bool operator==(const TrajectoryStats&, const TrajectoryStats&) = default;
};

/// Powers of ten up to `steps`, plus `steps` itself.
std::vector<std::size_t> default_checkpoints(std::size_t steps);

TrajectoryStats run_trajectory(Base b, std::size_t steps, RngSeed seed, std::span<const std::size_t> checkpoints = {});

/// Digits of a Lebesgue-uniform x in (0,1] (b = 2 only), read as the run
/// lengths of its binary expansion. Throws UnsupportedBase for b != 2.
TrajectoryStats lebesgue_orbit_experiment(std::size_t steps, RngSeed seed,
                                          std::span<const std::size_t> checkpoints = {}, Base b = Base(2));

/// Same as lebesgue_orbit_experiment but with the binary expansion supplied
/// 64 bits at a time, most significant bit first.
TrajectoryStats orbit_stats_from_words(std::size_t steps, const std::function<std::uint64_t()>& next_word,
                                       std::span<const std::size_t> checkpoints = {});

struct EnsembleSummary {
    unsigned long b = 2;
    std::size_t trajectories = 0;
    std::size_t steps = 0;
    std::uint64_t base_seed = 0;
    double mean_log_average = 0.0;
    double std_error = 0.0;
    double target = 0.0;  // log sigma_b
    double z_score = 0.0;
    bool degenerate = false;  // zero standard error; z_score is not meaningful
    std::array<std::uint64_t, kHistogramSlots + 1> digit_counts{};
    std::vector<double> log_averages;
};

struct EnsembleOptions {
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// Trajectory t uses derive_seed(base_seed, t). Results depend only on
/// (b, steps, base_seed, trajectory count), not on the thread count.
EnsembleSummary run_ensemble(Base b, std::size_t trajectories, std::size_t steps, RngSeed base_seed,
                             const EnsembleOptions& options = {});

/// Ensemble over explicit per-trajectory seeds.
EnsembleSummary run_ensemble_with_seeds(Base b, std::size_t steps, std::span<const RngSeed> seeds,
                                        const EnsembleOptions& options = {});

/// log sigma_b as a double, from the constants module.
double log_somos_b(Base b);
/// Var[log n] under the digit law, from the constants module.
double log_digit_variance(Base b);

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
};

/// Goodness of fit of digit counts against (b-1) b^-i. Digits 1..11 get
/// their own bins and 12+ is pooled; trailing bins whose expected count is
/// below 5 are merged into the pooled tail.
ChiSquareResult chi_square_digit_law(std::span<const std::uint64_t> counts, Base b);

/// Two-sample chi-square homogeneity test on digit counts with the same bins
/// as chi_square_digit_law.
ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> first, std::span<const std::uint64_t> second,
                                      Base b);

nlohmann::json to_json(const EnsembleSummary& summary);
nlohmann::json to_json(const TrajectoryStats& stats);

} // namespace somos
