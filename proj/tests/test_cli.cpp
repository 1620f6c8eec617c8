// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "shearlab/cli.hpp"
#include "shearlab/errors.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace shear;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("shearlab_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    int code;
    std::string log;
    std::string err;
};

Run run(const std::string& cmd, const json& config, const fs::path& out)
{
    std::ostringstream log, err;
    const int code = run_command(cmd, parse_config(config), out, log, err);
    return {code, log.str(), err.str()};
}

ErrorCode config_error_of(const json& j)
{
    try {
        parse_config(j);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("config defaults and round trip")
{
    const RunConfig d = parse_config(json::object());
    CHECK_FALSE(d.profile.has_value());
    CHECK(d.seed == 20240607);
    CHECK(d.format == "csv");
    CHECK(d.criteria.size() == 10);
    const json j = to_json(d);
    CHECK(to_json(parse_config(j)) == j);

    const json full = {{"profile", {{"name", "monomial"}, {"degree", 3}, {"domain", "R"}}},
                       {"nu", 1e-3},
                       {"k", 2.0},
                       {"grid", {{"n_cap", 5000}}},
                       {"sweep", {{"nu_list", {1e-2, 1e-3}}, {"L_list", {5, 10}}}},
                       {"solver", {{"tol", 1e-10}, {"check_truncation", true}}},
                       {"semigroup", {{"method", "ensemble"}}},
                       {"tensor", {{"factors", {"couette", {{"name", "poiseuille"}}}}}},
                       {"checks", {{"window", {-2.0, 2.0}}}},
                       {"acceptance", {{"criteria", {5, 8}}}},
                       {"seed", 18446744073709551615ULL},
                       {"workers", 2},
                       {"format", "gnuplot-data"}};
    const RunConfig c = parse_config(full);
    CHECK(c.profile->params.degree == 3);
    CHECK(c.grid.n_cap == 5000);
    CHECK(c.grid.n_min == 201);
    CHECK(c.solver.check_truncation);
    CHECK(c.tensor.factors.size() == 2);
    CHECK(c.checks.window_lo == -2.0);
    CHECK(c.seed == 18446744073709551615ULL);
    CHECK(to_json(parse_config(to_json(c))) == to_json(c));
}

TEST_CASE("config validation rejects bad input")
{
    for (const json& bad : {json{{"bogus", 1}},
                            json{{"solver", {{"tol", -1.0}}}},
                            json{{"solver", {{"tol", 0.0}}}},
                            json{{"solver", {{"tolerance", 1e-6}}}},
                            json{{"nu", -1.0}},
                            json{{"k", 0.0}},
                            json{{"nu", "small"}},
                            json{{"seed", -3}},
                            json{{"format", "xml"}},
                            json{{"profile", {{"name", "nope"}}}},
                            json{{"profile", {{"degree", 2}}}},
                            json{{"sweep", {{"delta_grid", {0.5, 1.5}}}}},
                            json{{"sweep", {{"L_list", {20, 10}}}}},
                            json{{"acceptance", {{"criteria", {11}}}}},
                            json{{"semigroup", {{"method", "euler"}}}},
                            json{{"checks", {{"window", {1.0}}}}},
                            json::array()})
        CHECK_MESSAGE(config_error_of(bad) == ErrorCode::ConfigError, bad.dump());
}

TEST_CASE("load_config reports unreadable and malformed files")
{
    const auto dir = scratch("load");
    fs::create_directories(dir);
    CHECK_THROWS_AS(load_config(dir / "missing.json"), Error);
    std::ofstream(dir / "broken.json") << "{\"nu\": ";
    CHECK_THROWS_AS(load_config(dir / "broken.json"), Error);
    std::ofstream(dir / "ok.json") << "{\"nu\": 0.5, \"k\": 1}";
    CHECK(load_config(dir / "ok.json").nu == 0.5);
    fs::remove_all(dir);
}

TEST_CASE("output directory precedence")
{
    RunConfig c;
    c.output_dir = "from-config";
    ::unsetenv(kOutDirEnv);
    CHECK(resolve_output_dir(std::nullopt, c) == "from-config");
    ::setenv(kOutDirEnv, "from-env", 1);
    CHECK(resolve_output_dir(std::nullopt, c) == "from-env");
    CHECK(resolve_output_dir(std::string("from-flag"), c) == "from-flag");
    ::unsetenv(kOutDirEnv);
}

TEST_CASE("exit code mapping")
{
    CHECK(exit_code_for(NumericalError(ErrorCode::NoConvergence, "x")) == ExitNonConvergence);
    CHECK(exit_code_for(Error(ErrorCode::SingularMatrix, "x")) == ExitNonConvergence);
    CHECK(exit_code_for(Error(ErrorCode::FactorCheckFailed, "x")) == ExitCriterion);
    CHECK(exit_code_for(Error(ErrorCode::ConfigError, "x")) == ExitConfig);
    CHECK(exit_code_for(std::runtime_error("x")) == ExitConfig);
    const auto d = make_diagnostic("resolvent-psi", 3, "non_convergence", "stalled");
    CHECK(d.at("status") == "non_convergence");
    CHECK(d.at("exit_code") == 3);
}

TEST_CASE("profile-check on taylor_couette fails at infinity")
{
    const auto dir = scratch("tc");
    const auto r = run("profile-check", {{"profile", "taylor_couette"}}, dir);
    CHECK(r.code == ExitCriterion);
    const auto diag = json::parse(r.err);
    CHECK(diag.at("message") == "infinity non-degeneracy failed");
    CHECK(diag.at("exit_code") == 2);
    CHECK(fs::exists(dir / "diagnostic.json"));
    CHECK(json::parse(slurp(dir / "diagnostic.json")) == diag);
    CHECK(fs::exists(dir / "profile_check.json"));
    fs::remove_all(dir);
}

TEST_CASE("profile-check passes for couette")
{
    const auto dir = scratch("couette");
    const auto r = run("profile-check", {{"profile", "couette"}}, dir);
    CHECK(r.code == ExitPass);
    CHECK(r.err.empty());
    CHECK_FALSE(fs::exists(dir / "diagnostic.json"));
    fs::remove_all(dir);
}

TEST_CASE("resolvent-psi without k is a config error")
{
    const auto dir = scratch("nok");
    const auto r = run("resolvent-psi", {{"profile", "couette"}, {"nu", 1e-3}}, dir);
    CHECK(r.code == ExitConfig);
    CHECK(json::parse(r.err).at("status") == "config_error");
    fs::remove_all(dir);
}

TEST_CASE("resolvent-psi writes the scan and the summary")
{
    const auto dir = scratch("psi");
    const auto r = run("resolvent-psi", {{"profile", "poiseuille"}, {"nu", 1e-2}, {"k", 1.0}}, dir);
    REQUIRE(r.code == ExitPass);
    const auto j = json::parse(slurp(dir / "psi.json"));
    CHECK(j.at("psi").get<double>() > 0.0);
    CHECK(j.at("grid_converged") == true);
    const auto csv = slurp(dir / "resolvent.csv");
    CHECK(csv.rfind("lambda,sigma_min\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("identical config and seed give identical bytes")
{
    const json cfg = {{"profile", "kolmogorov"}, {"nu", 1e-2}, {"k", 1.0}, {"semigroup", {{"checkpoints", 12}}}};
    const auto a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(run("semigroup-decay", cfg, a).code == ExitPass);
    REQUIRE(run("semigroup-decay", cfg, b).code == ExitPass);
    for (const char* f : {"decay.csv", "semigroup.json"}) CHECK(slurp(a / f) == slurp(b / f));
    REQUIRE(run("levelset-measure", cfg, a).code == ExitPass);
    REQUIRE(run("levelset-measure", cfg, b).code == ExitPass);
    CHECK(slurp(a / "measure_sweep.csv") == slurp(b / "measure_sweep.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("sweep-scaling reports both regimes")
{
    const auto dir = scratch("sweep");
    const json cfg = {{"profile", "poiseuille"},
                      {"sweep", {{"nu_list", {1.0, 2.0, 4.0}}, {"k_list", {0.05, 0.1, 0.2}}}},
                      {"format", "json"}};
    const auto r = run("sweep-scaling", cfg, dir);
    CHECK(r.code == ExitPass);
    const auto j = json::parse(slurp(dir / "sweep.json"));
    CHECK(j.at("fits").at("taylor").at("exponent_k").get<double>() == doctest::Approx(2.0).epsilon(0.05));
    CHECK(j.at("fits").at("enhanced").is_null());
    CHECK(json::parse(slurp(dir / "rate_table.json")).size() == 9);
    fs::remove_all(dir);
}

TEST_CASE("tensor-check with a failing factor exits 2")
{
    const auto dir = scratch("tensor");
    const auto r = run("tensor-check", {{"nu", 1e-2}, {"k", 1.0}, {"tensor", {{"factors", {"couette", "tanh"}}}}},
                       dir);
    CHECK(r.code == ExitCriterion);
    CHECK(json::parse(r.err).at("error") == "FactorCheckFailed");
    fs::remove_all(dir);
}

TEST_CASE("counterexample on short truncations")
{
    const auto dir = scratch("cex");
    const auto r = run("counterexample", {{"nu", 1e-2}, {"k", 1.0}, {"sweep", {{"L_list", {5.0, 10.0, 20.0}}}}}, dir);
    CHECK(fs::exists(dir / "counterexample.csv"));
    CHECK(fs::exists(dir / "counterexample_control.csv"));
    const auto j = json::parse(slurp(dir / "counterexample_check.json"));
    CHECK(j.at("decreasing") == true);
    CHECK(r.code == (j.at("pass").get<bool>() ? ExitPass : ExitCriterion));
    fs::remove_all(dir);
}

TEST_CASE("verify-all on a cheap selection")
{
    const auto dir = scratch("verify");
    const auto r = run("verify-all", {{"acceptance", {{"criteria", {8}}}}}, dir);
    CHECK(r.code == ExitPass);
    CHECK(r.log.find("PASS  8") != std::string::npos);
    const auto csv = slurp(dir / "acceptance.csv");
    CHECK(csv.rfind("criterion,title,pass,summary\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("unknown command")
{
    std::ostringstream log, err;
    CHECK(run_command("frobnicate", RunConfig{}, scratch("unknown"), log, err) == ExitConfig);
}
