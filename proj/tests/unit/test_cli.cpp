#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "dcrp/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Captured {
    int code;
    std::string out;
};

Captured run(std::vector<std::string> args) {
    std::ostringstream out, err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    const int code = dcrp::run_cli(args);
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return {code, out.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("dcrp-cli-" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == 1);
    CHECK(run({"verify-scaling", "--dist", "weibull:alpha=2", "--t", "1000", "--bogus"}).code == 1);
    CHECK(run({"verify-scaling", "--dist", "weibull:alpha=-2", "--t", "1000"}).code == 1);
    CHECK(run({"simulate-discrete", "--dist", "weibull:alpha=2", "--n-max", "10"}).code == 1); // no seed
}

TEST_CASE("verify-scaling prints u_t = 100") {
    const auto r = run({"verify-scaling", "--dist", "weibull:alpha=2", "--t", "1000"});
    CHECK(r.code == 0);
    std::istringstream is(r.out);
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(header == "t,u_t,v_t,w_t,residual");
    CHECK(row.rfind("1000,", 0) == 0);
    const double u = std::stod(row.substr(5, row.find(',', 5) - 5));
    CHECK(u == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("infeasible schedule exits 3") {
    const auto r = run({"--seed", "1", "exp-two-table", "--dist", "weibull:alpha=2", "--kappa", "0.45", "--phi", "0.8",
                        "--eta", "1.0", "--t-max", "100", "--replicas", "2"});
    CHECK(r.code == 3);
}

TEST_CASE("simulate-discrete schema") {
    const auto r = run({"--seed", "2", "simulate-discrete", "--dist", "weibull:alpha=2", "--n-max", "500",
                        "--checkpoints", "10,500", "--replicas", "3"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("replica,n,K_n,s1,s2,s3,share1,share12,leader_birth,leader_weight\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 7);
}

TEST_CASE("simulate-continuous point dump schema") {
    const auto r = run({"--seed", "3", "simulate-continuous", "--dist", "frechet:alpha=1", "--t", "20", "--replicas", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("replica,t,n,tau,W,s,y,z\n", 0) == 0);
}

TEST_CASE("ppp-compare, yule-tail and check-assumptions schemas") {
    auto r = run({"--seed", "4", "ppp-compare", "--dist", "frechet:alpha=1", "--t", "100", "--replicas", "200"});
    CHECK(r.out.find("predicted_mean") != std::string::npos);
    CHECK(r.out.find("empirical_void") != std::string::npos);
    CHECK(r.out.find("z_void") != std::string::npos);
    r = run({"--seed", "4", "yule-tail", "--grid", "1:1:2:2", "--replicas", "200", "--steps", "50"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("lambda,a,b,y,empirical,bound,replicas\n", 0) == 0);
    r = run({"check-assumptions", "--dist", "gumbel-m:a:alpha=2", "--t", "1000", "--points", "5"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("x,phi_t,lower,upper,pass\n", 0) == 0);
    r = run({"check-assumptions", "--dist", "weibull:alpha=2", "--t", "1000"});
    CHECK(r.code == 1);
}

TEST_CASE("manifest round trip reproduces outputs") {
    const auto a = scratch("a");
    const auto b = scratch("b");
    const auto r = run({"--seed", "7", "--out-dir", a.string(), "exp-one-table", "--dist", "frechet:alpha=1",
                        "--t-grid", "20,50", "--replicas", "100"});
    CHECK((r.code == 0 || r.code == 2));
    REQUIRE(fs::exists(a / "manifest.json"));
    const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
    CHECK(m["seed"] == 7);
    CHECK(m["command"] == "exp-one-table");
    CHECK(m["exit_code"] == r.code);
    const auto again = run({"--out-dir", b.string(), "rerun", "--manifest", (a / "manifest.json").string()});
    CHECK(again.code == r.code);
    for (const auto& f : m["outputs"]) {
        const auto name = f.get<std::string>();
        CAPTURE(name);
        CHECK(slurp(a / name) == slurp(b / name));
    }
    CHECK(fs::exists(a / "checks.csv"));

    const auto c = scratch("c");
    run({"--seed", "7", "--format", "jsonl", "--out-dir", c.string(), "exp-one-table", "--dist", "frechet:alpha=1",
         "--t-grid", "20,50", "--replicas", "100"});
    CHECK(fs::exists(c / "exp-one-table.jsonl"));
}

TEST_CASE("config file and subcommand must agree") {
    const auto dir = scratch("cfg");
    fs::create_directories(dir);
    {
        std::ofstream os(dir / "basic.toml");
        os << "experiment = \"basic\"\nseed = 3\nn_grid = [100, 200]\nreplicas = 2\n";
    }
    CHECK(run({"exp-one-table", "--config", (dir / "basic.toml").string()}).code == 1);
    const auto ok = run({"exp-basic", "--config", (dir / "basic.toml").string()});
    CHECK((ok.code == 0 || ok.code == 2));
}
