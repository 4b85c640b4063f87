#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "mviopt/experiment.hpp"
#include "mviopt/trace_io.hpp"

using namespace mviopt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mviopt_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

json game_config(const TempDir& dir, int k) {
    json c;
    c["seed"] = 20240901;
    c["instance"] = {{"kind", "matrix-game"}, {"rows", 5}, {"cols", 5}};
    c["solver"] = {{"p", 1}, {"k", k}, {"oracle", "p1-closed-form"}};
    c["output"] = {{"trace", dir.file("trace.csv")}, {"summary", dir.file("summary.json")}};
    return c;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char ch : text)
        if (ch == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("run: minimal matrix-game config produces trace and summary") {
    TempDir dir;
    const std::string cfg_path = dir.file("cfg.json");
    write_file(cfg_path, game_config(dir, 100).dump());

    CHECK(run_experiment(cfg_path) == kExitOk);

    const std::string trace = read_file(dir.file("trace.csv"));
    CHECK(count_lines(trace) == 102);  // header + 101 rows
    CHECK(trace.rfind("iter,lambda_i,omega_step,oracle_delta,inner_iters,gap_estimate,"
                      "cumulative_oracle_calls,wall_time_ms",
                      0) == 0);

    const json summary = json::parse(read_file(dir.file("summary.json")));
    CHECK(summary.at("final_gap").get<double>() >= 0.0);
    CHECK(summary.at("gap_kind") == "exact-duality");
    CHECK(summary.at("version") == std::string(kVersion));
    CHECK(summary.contains("config_hash"));
    CHECK(summary.at("oracle_calls") == 101);

    // the final gap beats the first recorded gap estimate
    std::istringstream rows(trace);
    std::string line;
    std::getline(rows, line);  // header
    std::getline(rows, line);
    double first_gap = 0.0;
    {
        std::istringstream cells(line);
        std::string cell;
        for (int c = 0; c < 6; ++c) std::getline(cells, cell, ',');
        first_gap = std::stod(cell);
    }
    CHECK(summary.at("final_gap").get<double>() < first_gap);
}

TEST_CASE("run: malformed configs exit 2 without artifacts") {
    TempDir dir;
    SUBCASE("negative K") {
        json c = game_config(dir, 100);
        c["solver"]["k"] = -1;
        const std::string cfg_path = dir.file("bad.json");
        write_file(cfg_path, c.dump());
        CHECK(run_experiment(cfg_path) == kExitConfig);
        CHECK(!fs::exists(dir.file("trace.csv")));
        CHECK(!fs::exists(dir.file("summary.json")));
    }
    SUBCASE("unknown key") {
        json c = game_config(dir, 10);
        c["solver"]["step_size"] = 0.1;
        const std::string cfg_path = dir.file("bad2.json");
        write_file(cfg_path, c.dump());
        CHECK(run_experiment(cfg_path) == kExitConfig);
    }
    SUBCASE("parse error reports the byte offset") {
        const std::string cfg_path = dir.file("bad3.json");
        write_file(cfg_path, "{ not json");
        CHECK(run_experiment(cfg_path) == kExitConfig);
    }
    SUBCASE("missing file is an I/O failure") {
        CHECK(run_experiment(dir.file("nope.json")) == kExitIo);
    }
}

TEST_CASE("determinism: identical config gives byte-identical outputs") {
    TempDir dir;
    const std::string cfg_path = dir.file("cfg.json");
    write_file(cfg_path, game_config(dir, 50).dump());

    REQUIRE(run_experiment(cfg_path) == kExitOk);
    const std::string trace1 = read_file(dir.file("trace.csv"));
    const std::string summary1 = read_file(dir.file("summary.json"));
    REQUIRE(run_experiment(cfg_path) == kExitOk);
    CHECK(read_file(dir.file("trace.csv")) == trace1);
    CHECK(read_file(dir.file("summary.json")) == summary1);
}

TEST_CASE("sweep: gap-vs-K table with fitted exponent") {
    TempDir dir;
    json c = game_config(dir, 0);
    c["solver"].erase("k");
    c["solver"]["k_sweep"] = {8, 16, 32, 64};
    const std::string cfg_path = dir.file("sweep.json");
    write_file(cfg_path, c.dump());

    CHECK(run_sweep(cfg_path) == kExitOk);
    const std::string table = read_file(dir.file("trace.csv"));
    CHECK(count_lines(table) == 5);
    CHECK(table.rfind("k,gap,rate_certificate", 0) == 0);

    const json summary = json::parse(read_file(dir.file("summary.json")));
    const double expo = summary.at("fitted_exponent").get<double>();
    CHECK(expo <= -0.8 + 0.2);  // decaying, roughly 1/K on this small game
    CHECK(summary.at("runs").size() == 4);
}

TEST_CASE("sweep: single-K list is rejected") {
    TempDir dir;
    json c = game_config(dir, 0);
    c["solver"].erase("k");
    c["solver"]["k_sweep"] = {64};
    const std::string cfg_path = dir.file("sweep1.json");
    write_file(cfg_path, c.dump());
    CHECK(run_sweep(cfg_path) == kExitConfig);
}

TEST_CASE("hard-instance run reports the lower bound next to the measured gap") {
    TempDir dir;
    json c;
    c["seed"] = 7;
    c["instance"] = {{"kind", "hard"}, {"t", 1}, {"p", 2}, {"l_f", 1.0}, {"l_a", 1.0}};
    c["solver"] = {{"p", 2}, {"k", 30}, {"oracle", "generic-inner"}, {"delta", 1e-5},
                   {"max_inner", 60000}, {"gap_probes", 64}};
    c["output"] = {{"trace", dir.file("t.csv")}, {"summary", dir.file("s.json")}};
    const std::string cfg_path = dir.file("hard.json");
    write_file(cfg_path, c.dump());

    CHECK(run_experiment(cfg_path) == kExitOk);
    const json summary = json::parse(read_file(dir.file("s.json")));
    CHECK(summary.contains("lower_bound_value"));
    CHECK(summary.contains("final_gap"));
    CHECK(summary.at("lower_bound_value").get<double>() > 0.0);
}

TEST_CASE("p2-synthetic run with the bisection oracle") {
    TempDir dir;
    json c;
    c["seed"] = 11;
    c["instance"] = {{"kind", "p2-synthetic"}, {"dim", 8}, {"l2", 2.0},
                     {"skew_scale", 1.0}, {"mu", 0.1}};
    c["solver"] = {{"p", 2}, {"k", 40}, {"oracle", "p2-bisection"}, {"delta", 1e-10},
                   {"cert_radius", 5.0}, {"eps", 1e-3}};
    c["output"] = {{"trace", dir.file("t.csv")}, {"summary", dir.file("s.json")}};
    const std::string cfg_path = dir.file("p2.json");
    write_file(cfg_path, c.dump());

    CHECK(run_experiment(cfg_path) == kExitOk);
    const json summary = json::parse(read_file(dir.file("s.json")));
    CHECK(summary.at("gap_kind") == "restricted");
    CHECK(summary.at("final_gap").get<double>() < 0.1);
    CHECK(summary.at("theoretical_iteration_bound").is_number());
    CHECK(summary.at("fitted_exponent").get<double>() <= -1.35);
}

TEST_CASE("solver non-convergence exits 3 and flushes the partial trace") {
    TempDir dir;
    json c;
    c["seed"] = 3;
    c["instance"] = {{"kind", "p2-synthetic"}, {"dim", 6}, {"l2", 2.0},
                     {"skew_scale", 1.0}, {"mu", 0.0}};
    // an unreachable certificate with a tiny inner budget
    c["solver"] = {{"p", 2}, {"k", 20}, {"oracle", "generic-inner"}, {"delta", 1e-14},
                   {"max_inner", 32}, {"cert_radius", 5.0}};
    c["output"] = {{"trace", dir.file("t.csv")}, {"summary", dir.file("s.json")}};
    const std::string cfg_path = dir.file("cfg.json");
    write_file(cfg_path, c.dump());

    CHECK(run_experiment(cfg_path) == kExitNoConvergence);
    CHECK(fs::exists(dir.file("t.csv")));       // partial trace flushed
    CHECK(!fs::exists(dir.file("s.json")));     // no summary for a failed run
}

TEST_CASE("hard-instance sweep carries the lower bound and per-K certificates") {
    TempDir dir;
    json c;
    c["seed"] = 21;
    c["instance"] = {{"kind", "hard"}, {"t", 1}, {"p", 2}, {"l_f", 1.0}, {"l_a", 0.0}};
    c["solver"] = {{"p", 2}, {"k_sweep", {2, 4, 8, 16}}, {"oracle", "generic-inner"},
                   {"delta", 1e-4}, {"max_inner", 60000}, {"gap_probes", 32}};
    c["output"] = {{"trace", dir.file("t.csv")}, {"summary", dir.file("s.json")}};
    const std::string cfg_path = dir.file("sweep.json");
    write_file(cfg_path, c.dump());

    CHECK(run_sweep(cfg_path) == kExitOk);
    const json summary = json::parse(read_file(dir.file("s.json")));
    CHECK(summary.contains("lower_bound_value"));
    CHECK(summary.at("runs").size() == 4);
    for (const auto& entry : summary.at("runs")) CHECK(entry.contains("rate_certificate"));
}

TEST_CASE("MVIOPT_OUT_DIR prefixes relative outputs") {
    TempDir dir;
    json c = game_config(dir, 10);
    c["output"] = {{"trace", "rel_trace.csv"}, {"summary", "rel_summary.json"}};
    const std::string cfg_path = dir.file("cfg.json");
    write_file(cfg_path, c.dump());

    ::setenv("MVIOPT_OUT_DIR", dir.path.string().c_str(), 1);
    CHECK(run_experiment(cfg_path) == kExitOk);
    ::unsetenv("MVIOPT_OUT_DIR");
    CHECK(fs::exists(dir.file("rel_trace.csv")));
    CHECK(fs::exists(dir.file("rel_summary.json")));
}

TEST_CASE("schema is valid JSON and documents the verbs") {
    const json schema = json::parse(config_schema());
    CHECK(schema.contains("instance"));
    CHECK(schema.contains("solver"));
    CHECK(schema.contains("output"));
    CHECK(schema.contains("exit_codes"));
}

TEST_CASE("verify: unknown suite exits 2") { CHECK(run_verify("no-such-suite") == kExitConfig); }

TEST_CASE("trace formatting: 17 significant digits, CRLF rows") {
    CHECK(format_g17(1.0 / 3.0) == "0.33333333333333331");
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
}
