#include "somos/cli.hpp"

#include "somos/constants.hpp"
#include "somos/digits.hpp"
#include "somos/error.hpp"
#include "somos/measure.hpp"
#include "somos/simulate.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace somos::cli {

namespace {

using nlohmann::json;

struct CommandConfig {
    std::string subcommand;
    unsigned long base = 2;
    double precision = 1e-10;
    std::size_t max_terms = 0;
    std::size_t steps = 1'000'000;
    std::size_t trajectories = 1;
    std::uint64_t seed = 42;
    std::string format = "json";
    std::string output;

    // expand
    std::string x;
    std::size_t digits = 0;
    // constant
    std::string name;
    std::string route = "series";
    std::string z;
    bool sh_variant = false;
    // verify
    std::string kind;
    std::string interval = "0,1";
    std::string prefix;
    std::size_t truncation = 10;
    // simulate
    std::vector<std::size_t> checkpoints;
    unsigned threads = 0;
};

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::vector<Digit> parse_prefix(const std::string& text) {
    return parse_digit_seq("[" + text + "]").prefix();
}

// Writes to --output (resolved against $SOMOS_OUTPUT_DIR when relative) or to out.
void emit(const CommandConfig& cfg, const std::string& text, std::ostream& out) {
    if (cfg.output.empty() || cfg.output == "-") {
        out << text;
        return;
    }
    std::filesystem::path path(cfg.output);
    if (path.is_relative()) {
        if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
            path = std::filesystem::path(dir) / path;
        }
    }
    std::ofstream file(path);
    if (!file) throw Error(ErrorCode::InvalidArgument, "cannot open output file " + path.string());
    file << text;
}

int cmd_expand(const CommandConfig& cfg, std::ostream& out) {
    const Base b(cfg.base);
    const Rational x = parse_rational(cfg.x);
    const DigitSeq seq = encode_digits(x, b);
    const std::size_t k = cfg.digits != 0 ? cfg.digits : seq.prefix().size() + seq.cycle().size();
    const auto head = seq.take(k);
    const auto decoded = decode_prefix(std::span<const Digit>(head), b);
    json doc = {
        {"x", to_string(x)},
        {"base", cfg.base},
        {"digits", to_string(seq)},
        {"prefix", head},
        {"partial_sum", to_string(decoded.partial_sum)},
        {"cylinder", {{"lower", to_string(decoded.cylinder.lower())}, {"upper", to_string(decoded.cylinder.upper())}}},
    };
    emit(cfg, doc.dump(2) + "\n", out);
    return kExitOk;
}

json ball_json(const BallValue& v) {
    json j = to_json(v);
    j["display"] = v.display();
    return j;
}

int cmd_constant(const CommandConfig& cfg, bool precision_given, std::ostream& out) {
    const Base b(cfg.base);
    json doc = {{"constant", cfg.name}, {"base", cfg.base}};
    int status = kExitOk;
    std::vector<std::string> lines;

    if (cfg.name == "khinchin") {
        KhinchinRequest req;
        if (precision_given) req.target_radius = cfg.precision;
        if (cfg.max_terms != 0) req.max_terms = cfg.max_terms;
        const BallValue k = khinchin(req);
        doc["precision"] = req.target_radius;
        doc["value"] = ball_json(k);
        lines.push_back(k.display());
    } else {
        PrecisionRequest req{cfg.precision, cfg.max_terms != 0 ? cfg.max_terms : 100'000};
        doc["precision"] = req.target_radius;
        if (cfg.name == "gamma") {
            const Rational z = cfg.z.empty() ? make_rational(1, Integer(cfg.base)) : parse_rational(cfg.z);
            const BallValue g = gamma_euler(z, req);
            doc["z"] = to_string(z);
            doc["value"] = ball_json(g);
            lines.push_back(g.display());
        } else if (cfg.name == "somos" || cfg.name == "somos_b") {
            const Base eff = cfg.name == "somos" ? Base(2) : b;
            doc["base"] = eff.value();
            doc["route"] = cfg.route;
            std::optional<BallValue> primary;
            if (cfg.route == "series" || cfg.route == "both") {
                BallValue s = cfg.name == "somos" ? somos_constant(req) : somos_b(eff, req);
                doc["series"] = ball_json(s);
                lines.push_back("series " + s.display());
                primary = std::move(s);
            }
            if (cfg.route == "gamma" || cfg.route == "both") {
                BallValue g = somos_b_via_gamma(eff, req);
                doc["gamma"] = ball_json(g);
                lines.push_back("gamma  " + g.display());
                if (primary) {
                    const bool overlap = primary->overlaps(g);
                    doc["overlap"] = overlap;
                    if (!overlap) status = kExitCheckFailed;
                } else {
                    primary = std::move(g);
                }
            }
            doc["value"] = ball_json(*primary);
            if (cfg.sh_variant) {
                if (eff.value() < 2) throw Error(ErrorCode::InvalidArgument, "sh-variant needs b >= 2");
                const BallValue v = primary->pow(make_rational(1, Integer(eff.value() - 1)));
                doc["sh_variant"] = ball_json(v);
                lines.push_back("sigma_b^(1/(b-1)) " + v.display());
            }
            if (lines.size() == 1) lines[0] = doc["value"]["display"].get<std::string>();
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown constant \"" + cfg.name + "\"");
        }
    }

    if (cfg.format == "text") {
        std::string text;
        for (const auto& l : lines) text += l + "\n";
        emit(cfg, text, out);
    } else {
        emit(cfg, doc.dump(2) + "\n", out);
    }
    return status;
}

int cmd_verify(const CommandConfig& cfg, std::ostream& out) {
    const Base b(cfg.base);
    InvarianceReport report;
    json doc = {{"kind", cfg.kind}, {"base", cfg.base}};
    if (cfg.kind == "lebesgue") {
        const RationalInterval interval = parse_interval(cfg.interval);
        report = verify_lebesgue_invariance(interval, cfg.truncation, b);
        doc["interval"] = {{"lower", to_string(interval.lower())}, {"upper", to_string(interval.upper())}};
    } else if (cfg.kind == "shift") {
        const auto prefix = parse_prefix(cfg.prefix);
        report = verify_shift_invariance(prefix, b, cfg.truncation);
        doc["prefix"] = prefix;
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown verification kind \"" + cfg.kind + "\"");
    }
    doc["report"] = to_json(report);
    emit(cfg, doc.dump(2) + "\n", out);
    return report.holds() ? kExitOk : kExitCheckFailed;
}

std::string series_csv(const TrajectoryStats& stats, double target) {
    std::string csv = "step,geometric_mean,log_error\n";
    for (const auto& [step, gm] : stats.checkpoints) {
        csv += std::to_string(step) + "," + format_double(gm) + "," + format_double(std::log(gm) - target) + "\n";
    }
    return csv;
}

json series_json(const TrajectoryStats& stats, double target) {
    json rows = json::array();
    for (const auto& [step, gm] : stats.checkpoints) {
        rows.push_back({{"step", step}, {"geometric_mean", gm}, {"log_error", std::log(gm) - target}});
    }
    return rows;
}

int cmd_simulate(const CommandConfig& cfg, std::ostream& out) {
    if (cfg.steps == 0) throw Error(ErrorCode::InvalidArgument, "--steps must be >= 1");
    if (cfg.trajectories == 0) throw Error(ErrorCode::InvalidArgument, "--trajectories must be >= 1");
    const Base b(cfg.base);
    const auto checkpoints = cfg.checkpoints.empty() ? default_checkpoints(cfg.steps) : cfg.checkpoints;
    const double target = log_somos_b(b);

    json doc = {
        {"base", cfg.base},
        {"steps", cfg.steps},
        {"trajectories", cfg.trajectories},
        {"seed", cfg.seed},
        {"generator", std::string(Xoshiro256::kName)},
        {"target_log_sigma_b", target},
    };
    double z = 0.0;
    bool degenerate = false;
    TrajectoryStats lead;
    if (cfg.trajectories == 1) {
        lead = run_trajectory(b, cfg.steps, RngSeed{cfg.seed}, checkpoints);
        const double se = std::sqrt(log_digit_variance(b) / static_cast<double>(cfg.steps));
        z = (lead.log_average() - target) / se;
        doc["summary"] = {
            {"mean_log_average", lead.log_average()},
            {"geometric_mean", lead.geometric_mean()},
            {"std_error", se},
            {"std_error_source", "digit-law variance"},
            {"z_score", z},
            {"degenerate", false},
        };
    } else {
        const EnsembleSummary summary =
            run_ensemble(b, cfg.trajectories, cfg.steps, RngSeed{cfg.seed}, EnsembleOptions{cfg.threads});
        // Trajectory 0 again, this time with checkpoints, for the convergence series.
        lead = run_trajectory(b, cfg.steps, derive_seed(RngSeed{cfg.seed}, 0), checkpoints);
        json s = to_json(summary);
        s["std_error_source"] = "ensemble";
        s["geometric_mean"] = std::exp(summary.mean_log_average);
        doc["summary"] = std::move(s);
        z = summary.z_score;
        degenerate = summary.degenerate;
    }
    doc["series"] = series_json(lead, target);

    if (cfg.format == "csv") {
        emit(cfg, series_csv(lead, target), out);
    } else {
        emit(cfg, doc.dump(2) + "\n", out);
    }
    return !degenerate && std::fabs(z) < 5.0 ? kExitOk : kExitCheckFailed;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CommandConfig cfg;
    CLI::App app{"Run-length digit expansions, Somos-type constants and their universality checks", "somos"};
    app.require_subcommand(1);

    auto* expand = app.add_subcommand("expand", "Run-length digits and cylinder of a rational p/q");
    expand->add_option("x", cfg.x, "Rational in (0,1] as p/q")->required();
    expand->add_option("-b,--base", cfg.base, "Base b >= 2")->capture_default_str();
    expand->add_option("-k,--digits", cfg.digits, "Number of digits to unroll (default: prefix + one cycle)");
    expand->add_option("-o,--output", cfg.output, "Output file (default stdout)");

    auto* constant = app.add_subcommand("constant", "High-precision constants as midpoint ± radius");
    constant->add_option("name", cfg.name, "somos | somos_b | khinchin | gamma")
        ->required()
        ->check(CLI::IsMember({"somos", "somos_b", "khinchin", "gamma"}));
    constant->add_option("-b,--base", cfg.base, "Base b >= 2")->capture_default_str();
    auto* precision_opt =
        constant->add_option("-p,--precision", cfg.precision, "Target radius (default 1e-10, 1e-6 for khinchin)");
    constant->add_option("--max-terms", cfg.max_terms, "Cap on series terms");
    constant->add_option("--route", cfg.route, "series | gamma | both")
        ->check(CLI::IsMember({"series", "gamma", "both"}))
        ->capture_default_str();
    constant->add_option("--z", cfg.z, "Argument of gamma as p/q (default 1/b)");
    constant->add_flag("--sh-variant", cfg.sh_variant, "Also print sigma_b^(1/(b-1))");
    constant->add_option("-f,--format", cfg.format, "json | text")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    constant->add_option("-o,--output", cfg.output, "Output file (default stdout)");

    auto* verify = app.add_subcommand("verify", "Exact invariance checks of the shift map");
    verify->add_option("kind", cfg.kind, "lebesgue | shift")->required()->check(CLI::IsMember({"lebesgue", "shift"}));
    verify->add_option("--interval", cfg.interval, "Interval a,b meaning (a,b]")->capture_default_str();
    verify->add_option("--prefix", cfg.prefix, "Comma-separated digit prefix of the cylinder");
    verify->add_option("-b,--base", cfg.base, "Base b >= 2")->capture_default_str();
    verify->add_option("-N,--truncation", cfg.truncation, "Number of explicit branches")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify->add_option("-o,--output", cfg.output, "Output file (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of geometric-mean convergence");
    simulate->add_option("-b,--base", cfg.base, "Base b >= 2")->capture_default_str();
    simulate->add_option("--steps", cfg.steps, "Digits per trajectory")->capture_default_str();
    simulate->add_option("--trajectories", cfg.trajectories, "Number of trajectories")->capture_default_str();
    simulate->add_option("--seed", cfg.seed, "Base seed")->capture_default_str();
    simulate->add_option("--checkpoints", cfg.checkpoints, "Steps at which to record the geometric mean")
        ->delimiter(',');
    simulate->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
    simulate->add_option("-f,--format", cfg.format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    simulate->add_option("-o,--output", cfg.output, "Output file (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (expand->parsed()) return cmd_expand(cfg, out);
        if (constant->parsed()) return cmd_constant(cfg, precision_opt->count() > 0, out);
        if (verify->parsed()) return cmd_verify(cfg, out);
        if (simulate->parsed()) return cmd_simulate(cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace somos::cli
