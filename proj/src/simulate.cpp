#include "somos/simulate.hpp"

#include "somos/constants.hpp"
#include "somos/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace somos {

namespace {

const std::array<double, kHistogramSlots>& log_table() {
    static const auto table = [] {
        std::array<double, kHistogramSlots> t{};
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = std::log(static_cast<double>(i));
        return t;
    }();
    return table;
}

void record_checkpoint(TrajectoryStats& stats, std::span<const std::size_t> checkpoints, std::size_t& next) {
    while (next < checkpoints.size() && checkpoints[next] < stats.steps) ++next;
    if (next < checkpoints.size() && checkpoints[next] == stats.steps) {
        stats.checkpoints.emplace_back(stats.steps, stats.geometric_mean());
        ++next;
    }
}

std::vector<std::size_t> sorted_checkpoints(std::span<const std::size_t> checkpoints, std::size_t steps) {
    std::vector<std::size_t> out(checkpoints.begin(), checkpoints.end());
    out.push_back(steps);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    out.erase(std::remove_if(out.begin(), out.end(), [steps](std::size_t s) { return s == 0 || s > steps; }),
              out.end());
    return out;
}

void check_steps(std::size_t steps) {
    if (steps == 0) throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
}

// Bins: digits 1..K individually, then K+1 and above pooled.
struct Binning {
    std::size_t last_single = 11;
    std::vector<double> probabilities;  // size last_single + 1
};

Binning digit_bins(Base base, double sample_size) {
    const double b = static_cast<double>(base.value());
    Binning bins;
    // Tail mass P(n > K) = b^-K; fold bins until the pooled tail expects >= 5.
    while (bins.last_single > 1 && sample_size * std::pow(b, -static_cast<double>(bins.last_single)) < 5.0) {
        --bins.last_single;
    }
    for (std::size_t i = 1; i <= bins.last_single; ++i) {
        bins.probabilities.push_back((b - 1.0) * std::pow(b, -static_cast<double>(i)));
    }
    bins.probabilities.push_back(std::pow(b, -static_cast<double>(bins.last_single)));
    return bins;
}

std::vector<double> binned_counts(std::span<const std::uint64_t> counts, std::size_t last_single) {
    std::vector<double> out(last_single + 1, 0.0);
    for (std::size_t d = 1; d < counts.size(); ++d) {
        out[std::min(d, last_single + 1) - 1] += static_cast<double>(counts[d]);
    }
    return out;
}

double total(std::span<const std::uint64_t> counts) {
    double n = 0;
    for (auto c : counts) n += static_cast<double>(c);
    return n;
}

double upper_tail(double statistic, std::size_t dof) {
    boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

} // namespace

Xoshiro256::Xoshiro256(RngSeed seed) noexcept {
    std::uint64_t x = seed.value;
    for (auto& s : state_) {
        s = mix64(x);
        x += 0x9e3779b97f4a7c15ULL;
    }
}

RngSeed derive_seed(RngSeed base, std::uint64_t index) noexcept { return {mix64(base.value ^ index)}; }

namespace detail {

Digit sample_digit_slow(unsigned long b, Digit j, std::uint64_t first_word,
                        const std::function<std::uint64_t()>& more_words) {
    Integer cell = static_cast<unsigned long>(first_word);
    unsigned long bits = 64;
    Integer pw = ipow(b, j);
    while (true) {
        const Integer scale = ipow(2, bits);
        if ((cell + 1) * pw <= scale) {
            ++j;
            pw *= b;
        } else if (cell * pw >= scale) {
            return j;
        } else {
            cell = (cell << 64) + Integer(static_cast<unsigned long>(more_words()));
            bits += 64;
        }
    }
}

} // namespace detail

void TrajectoryStats::add(Digit d) {
    ++steps;
    const double l = d < kHistogramSlots ? log_table()[d] : std::log(static_cast<double>(d));
    sum_log += l;
    sum_log_sq += l * l;
    ++digit_counts[std::min<std::size_t>(d, kHistogramSlots)];
}

double TrajectoryStats::geometric_mean() const {
    if (steps == 0) return std::numeric_limits<double>::quiet_NaN();
    return std::exp(log_average());
}

std::vector<std::size_t> default_checkpoints(std::size_t steps) {
    std::vector<std::size_t> out;
    for (std::size_t c = 10; c < steps; c *= 10) out.push_back(c);
    if (steps > 0) out.push_back(steps);
    return out;
}

TrajectoryStats run_trajectory(Base b, std::size_t steps, RngSeed seed, std::span<const std::size_t> checkpoints) {
    check_steps(steps);
    const auto marks = sorted_checkpoints(checkpoints, steps);
    Xoshiro256 rng(seed);
    TrajectoryStats stats;
    std::size_t next = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        stats.add(sample_digit(b, rng));
        if (next < marks.size() && marks[next] == stats.steps) record_checkpoint(stats, marks, next);
    }
    return stats;
}

TrajectoryStats orbit_stats_from_words(std::size_t steps, const std::function<std::uint64_t()>& next_word,
                                       std::span<const std::size_t> checkpoints) {
    check_steps(steps);
    const auto marks = sorted_checkpoints(checkpoints, steps);
    TrajectoryStats stats;
    RunLengthParser parser;
    std::size_t next = 0;
    auto sink = [&](Digit d) {
        stats.add(d);
        if (next < marks.size() && marks[next] == stats.steps) record_checkpoint(stats, marks, next);
        return stats.steps < steps;
    };
    while (stats.steps < steps) parser.feed_word(next_word(), sink);
    return stats;
}

TrajectoryStats lebesgue_orbit_experiment(std::size_t steps, RngSeed seed, std::span<const std::size_t> checkpoints,
                                          Base b) {
    if (b.value() != 2) {
        throw Error(ErrorCode::UnsupportedBase, "the bitstream orbit experiment exists only for b = 2");
    }
    Xoshiro256 rng(seed);
    return orbit_stats_from_words(steps, [&rng] { return rng(); }, checkpoints);
}

double log_somos_b(Base b) { return digit_moments(b, {1e-15, 100'000}).mean_log.mid_double(); }

double log_digit_variance(Base b) { return digit_moments(b, {1e-15, 100'000}).var_log.mid_double(); }

EnsembleSummary run_ensemble_with_seeds(Base b, std::size_t steps, std::span<const RngSeed> seeds,
                                        const EnsembleOptions& options) {
    check_steps(steps);
    if (seeds.size() < 2) throw Error(ErrorCode::InvalidArgument, "an ensemble needs at least 2 trajectories");

    std::vector<TrajectoryStats> results(seeds.size());
    unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, seeds.size()));
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (std::size_t t = cursor++; t < seeds.size(); t = cursor++) {
            const std::size_t final_only[] = {steps};
            results[t] = run_trajectory(b, steps, seeds[t], final_only);
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
        worker();
    }

    EnsembleSummary out;
    out.b = b.value();
    out.trajectories = seeds.size();
    out.steps = steps;
    CompensatedSum sum;
    for (const auto& r : results) {
        out.log_averages.push_back(r.log_average());
        sum += r.log_average();
        for (std::size_t i = 0; i < out.digit_counts.size(); ++i) out.digit_counts[i] += r.digit_counts[i];
    }
    const double n = static_cast<double>(seeds.size());
    out.mean_log_average = sum.value() / n;
    CompensatedSum sq;
    for (double a : out.log_averages) sq += (a - out.mean_log_average) * (a - out.mean_log_average);
    out.std_error = std::sqrt(sq.value() / (n - 1.0) / n);
    out.target = log_somos_b(b);
    out.degenerate = !(out.std_error > 0.0);
    out.z_score = out.degenerate ? 0.0 : (out.mean_log_average - out.target) / out.std_error;
    return out;
}

EnsembleSummary run_ensemble(Base b, std::size_t trajectories, std::size_t steps, RngSeed base_seed,
                             const EnsembleOptions& options) {
    std::vector<RngSeed> seeds;
    seeds.reserve(trajectories);
    for (std::size_t t = 0; t < trajectories; ++t) seeds.push_back(derive_seed(base_seed, t));
    auto out = run_ensemble_with_seeds(b, steps, seeds, options);
    out.base_seed = base_seed.value;
    return out;
}

ChiSquareResult chi_square_digit_law(std::span<const std::uint64_t> counts, Base b) {
    const double n = total(counts);
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "no samples");
    const Binning bins = digit_bins(b, n);
    const auto observed = binned_counts(counts, bins.last_single);
    ChiSquareResult r;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expected = n * bins.probabilities[i];
        r.statistic += (observed[i] - expected) * (observed[i] - expected) / expected;
    }
    r.degrees_of_freedom = observed.size() - 1;
    r.p_value = upper_tail(r.statistic, r.degrees_of_freedom);
    return r;
}

ChiSquareResult chi_square_two_sample(std::span<const std::uint64_t> first, std::span<const std::uint64_t> second,
                                      Base b) {
    const double n1 = total(first), n2 = total(second);
    if (n1 == 0 || n2 == 0) throw Error(ErrorCode::InvalidArgument, "no samples");
    const Binning bins = digit_bins(b, std::min(n1, n2));
    const auto r1 = binned_counts(first, bins.last_single);
    const auto r2 = binned_counts(second, bins.last_single);
    const double k1 = std::sqrt(n2 / n1), k2 = std::sqrt(n1 / n2);
    ChiSquareResult r;
    std::size_t used = 0;
    for (std::size_t i = 0; i < r1.size(); ++i) {
        if (r1[i] + r2[i] == 0) continue;
        const double diff = k1 * r1[i] - k2 * r2[i];
        r.statistic += diff * diff / (r1[i] + r2[i]);
        ++used;
    }
    r.degrees_of_freedom = used > 1 ? used - 1 : 1;
    r.p_value = upper_tail(r.statistic, r.degrees_of_freedom);
    return r;
}

nlohmann::json to_json(const TrajectoryStats& stats) {
    nlohmann::json checkpoints = nlohmann::json::array();
    for (const auto& [step, gm] : stats.checkpoints) checkpoints.push_back({{"step", step}, {"geometric_mean", gm}});
    std::size_t last = stats.digit_counts.size();
    while (last > 1 && stats.digit_counts[last - 1] == 0) --last;
    return {
        {"steps", stats.steps},
        {"log_average", stats.log_average()},
        {"geometric_mean", stats.geometric_mean()},
        {"sum_log", stats.sum_log.value()},
        {"sum_log_sq", stats.sum_log_sq.value()},
        {"checkpoints", std::move(checkpoints)},
        {"digit_counts", std::vector<std::uint64_t>(stats.digit_counts.begin() + 1, stats.digit_counts.begin() + static_cast<std::ptrdiff_t>(last))},
    };
}

nlohmann::json to_json(const EnsembleSummary& s) {
    return {
        {"base", s.b},
        {"trajectories", s.trajectories},
        {"steps", s.steps},
        {"seed", s.base_seed},
        {"generator", std::string(Xoshiro256::kName)},
        {"seed_rule", "trajectory t uses splitmix64(seed xor t)"},
        {"mean_log_average", s.mean_log_average},
        {"std_error", s.std_error},
        {"target_log_sigma_b", s.target},
        {"z_score", s.degenerate ? nlohmann::json(nullptr) : nlohmann::json(s.z_score)},
        {"degenerate", s.degenerate},
    };
}

} // namespace somos
