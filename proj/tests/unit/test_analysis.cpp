#include "dichotomy/analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace dichotomy;
using nlohmann::json;

namespace {

const std::string data_dir = DICHOTOMY_TEST_DATA;

SystemSpec spec(const std::string& name) { return load_spec(data_dir + "/" + name); }

}  // namespace

TEST_CASE("Example 1 passes end to end") {
    const auto r = run_analysis(spec("ex1_pass.json"));
    CHECK(r.pass);
    const json& rep = r.report;
    CHECK(rep["schema_version"] == kReportSchemaVersion);
    CHECK(rep["seed"] == kDefaultSeed);
    CHECK(rep["estimate"]["classification"] == "uniform");
    CHECK(std::abs(rep["estimate"]["a_hat"].get<double>() - 2.0) <= 1e-6);
    CHECK(std::abs(rep["estimate"]["b_hat"].get<double>() - 3.0) <= 1e-6);
    REQUIRE(rep["datko"].size() == 1);
    CHECK(std::abs(rep["datko"][0]["D"].get<double>() - 1.5) <= 1e-6);
    CHECK(rep["datko"][0]["pass"] == true);
    CHECK(rep["certificates"]["derived"][0]["status"] == "derived");
    for (const auto& v : rep["certificates"]["verified"]) CHECK(v["pass"] == true);
    CHECK(rep["lyapunov"][0]["pass"] == true);
    REQUIRE(r.samples.has_value());
    CHECK(r.samples->rows.size() == 110);
}

TEST_CASE("an undersized D fails the verdict") {
    const auto r = run_analysis(spec("ex1_fail_D.json"));
    CHECK_FALSE(r.pass);
    CHECK(r.report["datko"][0]["pass"] == false);
    CHECK(r.report["datko"][0]["max_ratio"].get<double>() > 1.2);
}

TEST_CASE("Example 2 passes with D from the closed form") {
    const auto r = run_analysis(spec("ex2.json"));
    CHECK(r.pass);
    CHECK(r.report["datko"][0]["D"] == 2.0);
    CHECK(r.report["datko"][0]["epsilon"] == 1.5);
    CHECK(r.report["certificates"]["growth_bound"]["pass"] == true);
}

TEST_CASE("reports are reproducible for a fixed seed") {
    const auto s = spec("custom_diagonal.json");
    const auto a = strip_timing(run_analysis(s, {7, 1}).report);
    const auto b = strip_timing(run_analysis(s, {7, 2}).report);
    CHECK(a == b);
    CHECK_FALSE(a.contains("timing"));
    const auto c = strip_timing(run_analysis(s, {8, 1}).report);
    CHECK(c["seed"] == 8);
}

TEST_CASE("certificate verification") {
    const auto s = spec("ex1_pass.json");
    const auto good = run_verify(s, DichotomyCertificate{2.0, 3.0, 0.0, 1.0, 1.0});
    CHECK(good.pass);
    const auto bad = run_verify(s, DichotomyCertificate{4.0, 3.0, 0.0, 1.0, 1.0});
    CHECK_FALSE(bad.pass);
}

TEST_CASE("version string") { CHECK(std::string(toolkit_version()).size() > 0); }
