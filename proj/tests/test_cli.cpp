#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cpvl/cli.hpp"

namespace fs = std::filesystem;
using cpvl::run_cli;

namespace {

fs::path scratch(const std::string& name) {
    const char* env = std::getenv("CPVL_TEST_TMP");
    fs::path p = fs::path(env ? env : fs::temp_directory_path().string()) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    auto p = dir / "run.toml";
    std::ofstream(p) << text;
    return p;
}

const char* base_config = R"(
[graph]
kind = "cycle"
size = 10

[rates]
family = "power_law"
a = 2

[infection]
lambda = 1

[run]
horizon = 10
replicas = 50
seed = 7
snapshots = [1, 5]
)";

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST_CASE("simulate twice gives identical bytes") {
    auto dir = scratch("determinism");
    auto cfg = write_config(dir, base_config);
    for (const char* sub : {"a", "b"})
        REQUIRE(run({"--config", cfg.string(), "--out", (dir / sub).string(), "--threads", sub[0] == 'a' ? "1" : "3",
                     "simulate"}) == 0);
    for (const char* f : {"simulate.csv", "simulate.json", "snapshots.csv"}) {
        CAPTURE(f);
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
        CHECK_FALSE(slurp(dir / "a" / f).empty());
    }
    REQUIRE(run({"--config", cfg.string(), "--out", (dir / "c").string(), "--seed", "8", "simulate"}) == 0);
    CHECK(slurp(dir / "a" / "simulate.csv") != slurp(dir / "c" / "simulate.csv"));
}

TEST_CASE("artifacts carry metadata") {
    auto dir = scratch("metadata");
    auto cfg = write_config(dir, base_config);
    REQUIRE(run({"--config", cfg.string(), "--out", dir.string(), "simulate"}) == 0);
    std::istringstream csv(slurp(dir / "simulate.csv"));
    std::string first, header;
    std::getline(csv, first);
    std::getline(csv, header);
    CHECK(first.rfind("# schema_version=1 subcommand=simulate config_hash=", 0) == 0);
    CHECK(first.find(" seed=7") != std::string::npos);
    CHECK(header == "replica,extinct,extinction_time,final_infected,final_total_load");
    auto j = nlohmann::json::parse(slurp(dir / "simulate.json"));
    CHECK(j["schema_version"] == 1);
    CHECK(j["subcommand"] == "simulate");
    CHECK(j["seed"] == 7);
    CHECK(first.find(j["config_hash"].get<std::string>()) != std::string::npos);
}

TEST_CASE("criteria verdict") {
    auto dir = scratch("criteria");
    auto cfg = write_config(dir, base_config);
    REQUIRE(run({"--config", cfg.string(), "--out", dir.string(), "--set", "infection.lambda=0.4", "criteria"}) == 0);
    auto j = nlohmann::json::parse(slurp(dir / "criteria.json"));
    CHECK(j["D"] == 2);
    CHECK(j["verdict"] == "guaranteed-extinction");
    CHECK(j["value"].get<double>() == doctest::Approx(0.8).epsilon(1e-8));
}

TEST_CASE("pathwise duality battery") {
    auto dir = scratch("duality");
    auto cfg = write_config(dir, base_config);
    REQUIRE(run({"--config", cfg.string(), "--out", dir.string(), "--set", "duality.cases=30", "duality", "--mode",
                 "pathwise"}) == 0);
    auto j = nlohmann::json::parse(slurp(dir / "duality.json"));
    REQUIRE(j["cases"].size() == 30);
    for (const auto& c : j["cases"]) CHECK(c["constant_flag"] == true);
}

TEST_CASE("exit codes and diagnostics") {
    auto dir = scratch("exits");
    auto cfg = write_config(dir, base_config);
    std::string out, err;
    CHECK(run({"--config", cfg.string(), "--out", dir.string(), "--set", "infction.lambda=2", "simulate"}, &out, &err) ==
          cpvl::exit_validation);
    CHECK(err.find("did you mean 'infection.lambda'") != std::string::npos);
    CHECK(run({"--config", (dir / "missing.toml").string(), "simulate"}, &out, &err) == cpvl::exit_validation);
    CHECK(err.find("cannot read") != std::string::npos);
    CHECK(run({"--config", cfg.string(), "teleport"}, &out, &err) == cpvl::exit_validation);
    CHECK(run({"simulate"}, &out, &err) == cpvl::exit_validation);
    // oracle state space too large for a 10-cycle: fails at run time, not at validation
    CHECK(run({"--config", cfg.string(), "--out", dir.string(), "oracle"}, &out, &err) == cpvl::exit_runtime);
    CHECK_FALSE(err.empty());
    CHECK(run({"--config", cfg.string(), "--out", dir.string(), "--set", "sweep.lambdas=[0.5, 1]", "sweep"}) ==
          cpvl::exit_ok);
}
