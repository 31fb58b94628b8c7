#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relrisk/io.hpp"
#include "relrisk/switchmodel.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const char* bin = std::getenv("RELRISK_CLI");
    if (!bin) throw std::runtime_error("RELRISK_CLI is not set; run through ctest");
    const std::string cmd = std::string(bin) + ' ' + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    RunResult r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
    return r;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("relrisk_cli_" + name)).string();
}

std::string write_file(const std::string& name, const std::string& content) {
    const std::string path = temp_path(name);
    std::ofstream f(path, std::ios::binary);
    f << content;
    return path;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json measure_entry(const json& report, const std::string& scale) {
    for (const auto& e : report.at("measures")) {
        if (e.at("scale") == scale) return e;
    }
    throw std::runtime_error("scale not in report: " + scale);
}

bool near(double a, double b, double tol = 1e-12) { return std::fabs(a - b) <= tol; }

constexpr const char* kTable = R"('{"a1_y1":30,"a1_y0":70,"a0_y1":60,"a0_y0":40}')";

// Individual-level rows for a randomized trial drawn from a switch mechanism.
std::string mechanism_csv(relrisk::SwitchPattern pattern, double q, double r, std::int64_t n,
                          std::uint64_t seed) {
    using namespace relrisk;
    const SimulatedCohort cohort = simulate_cohort({pattern, q, r}, n, seed);
    const TwoByTwoTable t = observed_table(cohort, 0.5, seed);
    std::string csv = "a,y\n";
    const auto rows = [&csv](const char* row, std::int64_t count) {
        for (std::int64_t i = 0; i < count; ++i) csv += row;
    };
    rows("1,1\n", t.a1_y1);
    rows("1,0\n", t.a1_y0);
    rows("0,1\n", t.a0_y1);
    rows("0,0\n", t.a0_y0);
    return csv;
}

}  // namespace

TEST_CASE("measure from a 2x2 table") {
    RunResult r = run_cli(std::string("measure --table ") + kTable + " --scales rr,sr,grrr");
    CHECK(r.code == 0);
    const json report = json::parse(r.out);
    CHECK(near(report.at("p0").get<double>(), 0.6));
    CHECK(near(report.at("p1").get<double>(), 0.3));
    CHECK(near(measure_entry(report, "rr").at("value").get<double>(), 0.5));
    CHECK(near(measure_entry(report, "sr").at("value").get<double>(), 1.75));
    CHECK(near(measure_entry(report, "grrr").at("value").get<double>(), 0.5));
    // Counts were given, so the ratio scales carry Wald intervals.
    CHECK(near(measure_entry(report, "rr").at("ci_low").get<double>(), 0.35607179369390296));
    CHECK(near(measure_entry(report, "rr").at("ci_high").get<double>(), 0.7021055990043189));
    CHECK(measure_entry(report, "sr").contains("ci_low"));
    CHECK(!measure_entry(report, "grrr").contains("ci_low"));
}

TEST_CASE("measure from a risk pair") {
    RunResult r = run_cli("measure --p0 0.3 --p1 0.3 --scales grrr");
    CHECK(r.code == 0);
    const json report = json::parse(r.out);
    CHECK(measure_entry(report, "grrr").at("value").get<double>() == 0.0);
}

TEST_CASE("measure reports undefined scales and fails only when nothing computes") {
    RunResult all_failed = run_cli("measure --p0 0 --p1 0.1 --scales rr");
    CHECK(all_failed.code == 2);
    const json report = json::parse(all_failed.out);
    CHECK(measure_entry(report, "rr").at("value").is_null());
    CHECK(measure_entry(report, "rr").at("reason") == "UndefinedMeasure");

    // Partial success: the defined scales carry the run.
    RunResult partial = run_cli("measure --p0 0 --p1 0.1 --scales rr,sr,rd");
    CHECK(partial.code == 0);
    const json p = json::parse(partial.out);
    CHECK(p.at("measures").size() == 3);
    CHECK(near(measure_entry(p, "sr").at("value").get<double>(), 0.9));
    CHECK(near(measure_entry(p, "rd").at("value").get<double>(), 0.1));
}

TEST_CASE("measure input validation") {
    CHECK(run_cli("measure --p0 0.3 --scales rr").code == 1);
    CHECK(run_cli("measure --p0 0.3 --p1 1.5 --scales rr").code == 1);
    CHECK(run_cli("measure --p0 0.3 --p1 0.1 --scales bogus").code == 1);
    CHECK(run_cli("measure --table '{\"a1_y1\":30}' --scales rr").code == 1);
    CHECK(run_cli("measure --table '{broken json' --scales rr").code == 1);
    CHECK(run_cli(std::string("measure --table ") + kTable + " --p0 0.3 --p1 0.1").code == 1);
    CHECK(run_cli("measure --table /nonexistent/table.json --scales rr").code == 1);
}

TEST_CASE("transport lands on the implied risk") {
    RunResult benefit = run_cli("transport --p0 0.4 --scale grrr --value 0.5");
    CHECK(benefit.code == 0);
    CHECK(near(json::parse(benefit.out).at("p1").get<double>(), 0.2));

    RunResult harm = run_cli("transport --p0 0.4 --scale grrr --value -0.5");
    CHECK(harm.code == 0);
    CHECK(near(json::parse(harm.out).at("p1").get<double>(), 0.7));

    RunResult sw = run_cli("transport --p0 0.5 --scale switch --value 0.5 --selected sr");
    CHECK(sw.code == 0);
    CHECK(near(json::parse(sw.out).at("p1").get<double>(), 0.75));
}

TEST_CASE("transport reports non-closure with the implied value") {
    RunResult r = run_cli("transport --p0 0.5 --scale rr --value 3");
    CHECK(r.code == 2);
    const json report = json::parse(r.out);
    CHECK(report.at("p1").is_null());
    CHECK(report.at("error") == "NotClosed");
    CHECK(near(report.at("implied").get<double>(), 1.5));
}

TEST_CASE("transport input validation") {
    CHECK(run_cli("transport --p0 0.5 --scale nope --value 1").code == 1);
    CHECK(run_cli("transport --p0 0.5 --scale rr").code == 1);
    CHECK(run_cli("transport --p0 0.5 --scale switch --value 0.5").code == 1);
    CHECK(run_cli("transport --p0 0.5 --scale rr --value 2 --selected rr").code == 1);
    CHECK(run_cli("transport --p0 1.5 --scale rr --value 1").code == 1);
}

TEST_CASE("simulate is byte-identical across reruns") {
    const std::string flags =
        "simulate --pattern sufficient-causal --q 0.5 --r 0.2 --n 5000 --seed 7";
    RunResult a = run_cli(flags);
    RunResult b = run_cli(flags);
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());

    // Same contract for file output.
    const std::string f1 = temp_path("sim_a.json");
    const std::string f2 = temp_path("sim_b.json");
    CHECK(run_cli(flags + " --out " + f1).code == 0);
    CHECK(run_cli(flags + " --out " + f2).code == 0);
    const std::string c1 = read_file(f1);
    CHECK(c1 == read_file(f2));
    CHECK(c1 == a.out);

    // CSV mode is deterministic too.
    RunResult c = run_cli(flags + " --output csv");
    RunResult d = run_cli(flags + " --output csv");
    CHECK(c.out == d.out);
    CHECK(c.out.rfind("key,value\n", 0) == 0);
}

TEST_CASE("simulate classifies degenerate cohorts exactly") {
    RunResult r = run_cli(
        "simulate --pattern sufficient-preventive --q 1 --r 1 --n 100 --seed 3");
    CHECK(r.code == 0);
    const json report = json::parse(r.out);
    CHECK(report.at("counts").at("preventive").get<int>() == 100);
    CHECK(report.at("counts").at("doomed").get<int>() == 0);
    CHECK(report.at("counts").at("causal").get<int>() == 0);
    CHECK(report.at("counts").at("immune").get<int>() == 0);
}

TEST_CASE("large simulation tracks the closed-form risks") {
    RunResult r = run_cli(
        "simulate --pattern sufficient-causal --q 0.5 --r 0.2 --n 1000000 --seed 1");
    CHECK(r.code == 0);
    const json report = json::parse(r.out);
    const double p0 = report.at("empirical").at("p0").get<double>();
    const double p1 = report.at("empirical").at("p1").get<double>();
    // Each arm holds about half a million individuals.
    CHECK(std::fabs(p0 - 0.2) <= 3.0 * std::sqrt(0.2 * 0.8 / 5e5));
    CHECK(std::fabs(p1 - 0.6) <= 3.0 * std::sqrt(0.6 * 0.4 / 5e5));
}

TEST_CASE("simulate input validation") {
    CHECK(run_cli("simulate --pattern sufficient-causal --q 1.5 --r 0.2 --n 10 --seed 1").code ==
          1);
    CHECK(run_cli("simulate --pattern sufficient-causal --q 0.5 --r 0.2 --n 10").code == 1);
    CHECK(run_cli("simulate --pattern bogus --q 0.5 --r 0.2 --n 10 --seed 1").code == 1);
    CHECK(run_cli("simulate --pattern sufficient-causal --q 0.5 --r 0.2 --n 0 --seed 1").code ==
          1);
    CHECK(run_cli("simulate --pattern sufficient-causal --q 0.5 --r 0.2 --n 10 --seed 1 "
                  "--treat-probability 0")
              .code == 1);
}

TEST_CASE("sweep holds the stable column while the opposite ratio moves") {
    RunResult sp = run_cli(
        "sweep --pattern sufficient-preventive --q 0.3 --baseline-risks 0.1,0.5,0.9");
    CHECK(sp.code == 0);
    const json sp_rows = json::parse(sp.out);
    REQUIRE(sp_rows.size() == 3);
    for (const auto& row : sp_rows) {
        CHECK(near(row.at("rr").get<double>(), 0.7));
        CHECK(near(row.at("stable_scale_value").get<double>(), 0.7));
    }
    CHECK(std::fabs(sp_rows[0].at("sr").get<double>() - sp_rows[2].at("sr").get<double>()) >
          0.01);

    RunResult sc = run_cli("sweep --pattern sufficient-causal --q 0.5 --baseline-risks 0.1,0.3");
    CHECK(sc.code == 0);
    const json sc_rows = json::parse(sc.out);
    REQUIRE(sc_rows.size() == 2);
    for (const auto& row : sc_rows) CHECK(near(row.at("sr").get<double>(), 0.5));
    CHECK(near(sc_rows[0].at("rr").get<double>(), 5.5));
}

TEST_CASE("sweep with no carriers shows every ratio at 1") {
    RunResult r = run_cli("sweep --pattern necessary-causal --q 0 --baseline-risks 0.2,0.5,0.8");
    CHECK(r.code == 0);
    for (const auto& row : json::parse(r.out)) {
        CHECK(row.at("rr").get<double>() == 1.0);
        CHECK(row.at("sr").get<double>() == 1.0);
        CHECK(row.at("or").get<double>() == 1.0);
        CHECK(row.at("grrr").get<double>() == 0.0);
    }
}

TEST_CASE("sweep input validation") {
    CHECK(run_cli("sweep --pattern sufficient-causal --q 0.5 --baseline-risks 1.0").code == 1);
    CHECK(run_cli("sweep --pattern sufficient-causal --q 0.5 --baseline-risks nope").code == 1);
    CHECK(run_cli("sweep --pattern sufficient-causal --q 0.5").code == 1);
}

TEST_CASE("fit reproduces the crude ratio on a saturated design") {
    std::string csv = "a,y\n";
    for (int i = 0; i < 30; ++i) csv += "1,1\n";
    for (int i = 0; i < 70; ++i) csv += "1,0\n";
    for (int i = 0; i < 60; ++i) csv += "0,1\n";
    for (int i = 0; i < 40; ++i) csv += "0,0\n";
    const std::string path = write_file("saturated.csv", csv);

    RunResult log_link = run_cli("fit --data " + path + " --link log");
    CHECK(log_link.code == 0);
    const json report = json::parse(log_link.out);
    CHECK(std::fabs(report.at("exposure_effect").get<double>() - 0.5) <= 1e-8);
    CHECK(report.at("scale") == "adjusted RR");
    CHECK(report.at("reference_level") == "outcome");
    CHECK(report.at("converged").get<bool>());

    // Crude p1 < p0, so auto lands on the same level.
    RunResult auto_link = run_cli("fit --data " + path + " --link auto");
    CHECK(auto_link.code == 0);
    CHECK(json::parse(auto_link.out).at("reference_level") == "outcome");
}

TEST_CASE("fit auto-selects the complement level for a harmful mechanism") {
    const std::string path = write_file(
        "sc_trial.csv",
        mechanism_csv(relrisk::SwitchPattern::sufficient_causal, 0.3, 0.2, 20000, 19));
    RunResult r = run_cli("fit --data " + path + " --link auto");
    CHECK(r.code == 0);
    const json report = json::parse(r.out);
    CHECK(report.at("reference_level") == "complement");
    CHECK(report.at("scale") == "adjusted SR");
    // The exposure effect estimates the carrier-free survival 1 - q.
    CHECK(std::fabs(report.at("exposure_effect").get<double>() - 0.7) <= 0.02);
}

TEST_CASE("fit surfaces separation as a computation error") {
    std::string csv = "a,y\n";
    for (int i = 0; i < 10; ++i) csv += "1,1\n";
    for (int i = 0; i < 5; ++i) csv += "0,1\n";
    for (int i = 0; i < 5; ++i) csv += "0,0\n";
    const std::string path = write_file("separated.csv", csv);
    RunResult r = run_cli("fit --data " + path + " --link log");
    CHECK(r.code == 2);
}

TEST_CASE("fit input validation") {
    CHECK(run_cli("fit --data /nonexistent/rows.csv").code == 1);
    const std::string bad = write_file("bad_header.csv", "x,y\n1,0\n");
    CHECK(run_cli("fit --data " + bad).code == 1);
    const std::string bad_link = write_file("tiny.csv", "a,y\n1,0\n0,1\n");
    CHECK(run_cli("fit --data " + bad_link + " --link bogus").code == 1);
}

TEST_CASE("interpret renders the prevented fraction reading") {
    RunResult r = run_cli("interpret --p0 0.3 --p1 0.1 --direction benefit");
    CHECK(r.code == 0);
    const json report = json::parse(r.out);
    CHECK(near(report.at("value").get<double>(), 2.0 / 3.0));
    CHECK(report.at("interpretation") ==
          "proportion prevented among those who would get the outcome if untreated");
    CHECK(json::parse(r.out).at("caveat").get<std::string>().find("no-causation") !=
          std::string::npos);

    // The documented display rounding at 4 decimal places.
    RunResult csv = run_cli(
        "interpret --p0 0.3 --p1 0.1 --direction benefit --output csv --precision 4");
    CHECK(csv.code == 0);
    CHECK(csv.out.find("value,0.6667\n") != std::string::npos);
}

TEST_CASE("interpret renders the harmed fraction reading") {
    RunResult r = run_cli("interpret --p0 0.2 --p1 0.6 --direction harm");
    CHECK(r.code == 0);
    const json report = json::parse(r.out);
    CHECK(near(report.at("value").get<double>(), 0.5));
    CHECK(report.at("interpretation") ==
          "proportion harmed among those who would survive untreated");
}

TEST_CASE("interpret rejects a direction the data contradicts") {
    RunResult r = run_cli("interpret --p0 0.2 --p1 0.6 --direction benefit");
    CHECK(r.code == 2);
    const json report = json::parse(r.out);
    CHECK(report.at("error") == "DirectionContradiction");
    CHECK(report.at("value").is_null());

    RunResult h = run_cli("interpret --p0 0.6 --p1 0.2 --direction harm");
    CHECK(h.code == 2);

    CHECK(run_cli("interpret --p0 0.2 --p1 0.6 --direction sideways").code == 1);
    CHECK(run_cli("interpret --p0 0.2 --p1 0.6").code == 1);
}

TEST_CASE("csv and json outputs agree at the configured precision") {
    const std::string args = std::string("measure --table ") + kTable + " --scales rr,sr,or";
    const json report = json::parse(run_cli(args).out);
    RunResult csv = run_cli(args + " --output csv --precision 6");
    CHECK(csv.code == 0);

    std::istringstream lines(csv.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "scale,value,selected,ci_low,ci_high,ci_level,reason");
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string scale, value, selected, ci_low, ci_high;
        std::getline(fields, scale, ',');
        std::getline(fields, value, ',');
        std::getline(fields, selected, ',');
        std::getline(fields, ci_low, ',');
        std::getline(fields, ci_high, ',');
        const json entry = measure_entry(report, scale);
        CHECK(value == relrisk::io::format_double(entry.at("value").get<double>(), 6));
        CHECK(ci_low == relrisk::io::format_double(entry.at("ci_low").get<double>(), 6));
        CHECK(ci_high == relrisk::io::format_double(entry.at("ci_high").get<double>(), 6));
    }

    // Same invariant on a transport run.
    const json tj = json::parse(run_cli("transport --p0 0.4 --scale grrr --value 0.5").out);
    RunResult tcsv = run_cli("transport --p0 0.4 --scale grrr --value 0.5 --output csv");
    CHECK(tcsv.out.find(relrisk::io::format_double(tj.at("p1").get<double>(), 6)) !=
          std::string::npos);
}

TEST_CASE("top-level command plumbing") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("measure --help").code == 0);
    CHECK(run_cli("").code == 1);
    CHECK(run_cli("bogus-subcommand").code == 1);
    CHECK(run_cli("measure --p0 0.3 --p1 0.1 --scales rr --no-such-flag").code == 1);

    // --out writes the report to the file and keeps stdout quiet.
    const std::string out_path = temp_path("measure_out.json");
    RunResult r = run_cli("measure --p0 0.3 --p1 0.1 --scales rr --out " + out_path);
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(near(json::parse(read_file(out_path))
                   .at("measures")[0]
                   .at("value")
                   .get<double>(),
               1.0 / 3.0));
}
