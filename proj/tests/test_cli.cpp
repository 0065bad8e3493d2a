#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "somos/cli.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
    json doc() const { return json::parse(out); }
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = somos::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("expand") {
    auto r = run({"expand", "5/8", "--base", "2", "--digits", "5"});
    REQUIRE(r.code == 0);
    auto d = r.doc();
    CHECK(d["digits"] == "[1,3;1]");
    CHECK(d["prefix"] == json::array({1, 3, 1, 1, 1}));
    CHECK(d["partial_sum"] == "79/128");
    CHECK(d["cylinder"]["lower"] == "79/128");
    CHECK(d["cylinder"]["upper"] == "5/8");

    r = run({"expand", "1/3", "--base", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.doc()["digits"] == "[;2]");

    r = run({"expand", "1/2", "--base", "3"});
    CHECK(r.code == 2);
    CHECK(r.err.find("NotRepresentable") != std::string::npos);

    CHECK(run({"expand", "0.5"}).code == 2);
    CHECK(run({"expand", "3/2"}).code == 2);
    CHECK(run({"expand", "1/2", "--base", "1"}).code == 2);
}

TEST_CASE("constant") {
    auto r = run({"constant", "somos", "--precision", "1e-10"});
    REQUIRE(r.code == 0);
    auto d = r.doc();
    CHECK(d["value"]["display"].get<std::string>().rfind("1.6616879496", 0) == 0);
    CHECK(std::stod(d["value"]["rad"].get<std::string>()) <= 1e-10);

    r = run({"constant", "somos_b", "--base", "3", "--route", "both"});
    REQUIRE(r.code == 0);
    d = r.doc();
    CHECK(d["overlap"] == true);
    CHECK(d.contains("series"));
    CHECK(d.contains("gamma"));

    r = run({"constant", "khinchin", "--precision", "1e-6"});
    REQUIRE(r.code == 0);
    CHECK(r.doc()["value"]["display"].get<std::string>().rfind("2.68545", 0) == 0);
    CHECK(r.doc()["precision"] == 1e-6);

    r = run({"constant", "gamma", "--z", "1/2", "--precision", "1e-8"});
    REQUIRE(r.code == 0);
    CHECK(std::stod(r.doc()["value"]["mid"].get<std::string>()) == doctest::Approx(0.37062).epsilon(1e-5));

    r = run({"constant", "somos_b", "--base", "3", "--sh-variant", "--format", "text"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("sigma_b^(1/(b-1))") != std::string::npos);

    r = run({"constant", "somos_b", "--base", "4", "--route", "gamma"});
    REQUIRE(r.code == 0);
    CHECK(r.doc()["route"] == "gamma");

    CHECK(run({"constant", "somos", "--precision", "1e-10", "--max-terms", "3"}).code == 2);
    CHECK(run({"constant", "pi"}).code == 2);
    CHECK(run({"constant", "gamma", "--z", "3/4"}).code == 2);
}

TEST_CASE("verify") {
    auto r = run({"verify", "lebesgue", "--interval", "1/3,2/3", "-N", "5"});
    REQUIRE(r.code == 0);
    CHECK(r.doc()["report"]["total"] == "1/3");
    CHECK(r.doc()["report"]["holds"] == true);

    r = run({"verify", "shift", "--prefix", "2", "--base", "3", "-N", "6"});
    REQUIRE(r.code == 0);
    CHECK(r.doc()["report"]["total"] == "2/9");

    CHECK(run({"verify", "lebesgue", "--interval", "2/3,1/3"}).code == 2);
    CHECK(run({"verify", "lebesgue", "--base", "3"}).code == 2);
    CHECK(run({"verify", "shift", "--prefix", "1,0"}).code == 2);
    CHECK(run({"verify", "lebesgue", "-N", "0"}).code == 2);
}

TEST_CASE("simulate") {
    auto r = run({"simulate", "--base", "2", "--steps", "1000000", "--seed", "42"});
    REQUIRE(r.code == 0);
    auto d = r.doc();
    const double gm = d["summary"]["geometric_mean"];
    CHECK(std::fabs(gm / 1.6616879496 - 1.0) < 0.003);
    CHECK(d["generator"] == "xoshiro256**");
    CHECK(d["series"].size() == 6);

    r = run({"simulate", "--base", "3", "--trajectories", "100", "--steps", "100000", "--seed", "7"});
    REQUIRE(r.code == 0);
    CHECK(std::fabs(r.doc()["summary"]["z_score"].get<double>()) < 5.0);

    CHECK(run({"simulate", "--steps", "0"}).code == 2);
    CHECK(run({"simulate", "--trajectories", "0"}).code == 2);
    CHECK(run({"simulate", "--format", "xml"}).code == 2);
}

TEST_CASE("simulate csv output is fixed-order and deterministic") {
    const std::vector<std::string> args{"simulate", "--steps", "5000", "--checkpoints", "100,1000", "--format", "csv"};
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    std::istringstream lines(a.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "step,geometric_mean,log_error");
    int rows = 0;
    while (std::getline(lines, row)) {
        ++rows;
        CHECK(row.find(',') != std::string::npos);
    }
    CHECK(rows == 3);
}

TEST_CASE("output directory from the environment") {
    const auto dir = std::filesystem::temp_directory_path() / "somos_cli_test";
    std::filesystem::create_directories(dir);
    ::setenv(somos::cli::kOutputDirEnv, dir.c_str(), 1);
    const auto r = run({"verify", "shift", "--prefix", "1", "-N", "3", "--output", "report.json"});
    ::unsetenv(somos::cli::kOutputDirEnv);
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(dir / "report.json");
    REQUIRE(in.good());
    CHECK(json::parse(in)["report"]["total"] == "1/2");
    std::filesystem::remove_all(dir);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}
