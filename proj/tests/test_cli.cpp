#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "parlab/analytic.hpp"
#include "parlab/config.hpp"
#include "parlab/expr.hpp"
#include "parlab/io.hpp"
#include "parlab/solver.hpp"
#include "test_helpers.hpp"

using namespace parlab;
using nlohmann::json;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("parlab_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("expression grammar") {
    Expr e = Expr::parse("0.5*x1^2 - sin(pi*x2) + 2/(1+t)");
    CHECK(e.eval({2.0, 0.5}, 0.0) == doctest::Approx(2.0 - 1.0 + 2.0));
    CHECK(e.depends_on_t());

    Expr r = Expr::parse("r^2");
    CHECK(r.eval({0.3, 0.4}, -1.0) == doctest::Approx(0.25));
    CHECK(!r.depends_on_t());

    Expr nested = Expr::parse("abs(-3)*sqrt(4) + exp(0)");
    CHECK(nested.eval({0, 0}, 0) == doctest::Approx(7.0));

    // unary minus and right-associative powers
    CHECK(Expr::parse("-2^2").eval({0, 0}, 0) == doctest::Approx(-4.0));
    CHECK(Expr::parse("2^3^1").eval({0, 0}, 0) == doctest::Approx(8.0));

    CHECK_THROWS_AS(Expr::parse("2*+3"), ConfigError);
    CHECK_THROWS_AS(Expr::parse("foo(2)"), ConfigError);
    CHECK_THROWS_AS(Expr::parse("(1+2"), ConfigError);
    CHECK_THROWS_AS(Expr::parse("1 2"), ConfigError);
}

TEST_CASE("field dump and load round-trip bit-exactly") {
    auto dir = temp_dir("io");
    GridSpec g = GridSpec::make(2, 0.125, 0.3, 0.1);
    testutil::Rng rng(31);
    ScalarField f = ScalarField::from_function(
        g, [&](Vec2 x, double t) { return std::sin(9 * x[0]) * x[1] + t / 3.0 +
                                          rng.uniform(-1, 1) * 1e-3; });
    EquationParams eq;
    eq.gamma = 1.5;
    eq.p = 2.5;
    eq.n = 2;
    eq.eps = 0.125;
    std::string path = (dir / "field.csv").string();
    dump_field_csv(f, path, eq, "test");
    ScalarField f2 = load_field_csv(path);
    REQUIRE(f2.slice_count() == f.slice_count());
    CHECK(f2.spec.h == f.spec.h);
    for (int s = 0; s < f.slice_count(); ++s) {
        CHECK(f2.times[s] == f.times[s]); // bit-exact
        for (int i = 0; i < g.node_count(); ++i) CHECK(f2.slices[s][i] == f.slices[s][i]);
    }
}

TEST_CASE("config validation rejects unknown keys and malformed input") {
    json cfg = {{"problem",
                 {{"gamma", 1.0},
                  {"p", 3.0},
                  {"n", 1},
                  {"manufactured", "plane"},
                  {"q", {2.0}},
                  {"grid", {{"h", 0.05}, {"t_depth", 0.2}}}}},
                {"output_dir", "unused"},
                {"seed", 1}};
    CHECK_NOTHROW(validate_config(cfg));

    json bad = cfg;
    bad["problem"]["frobnicate"] = 1;
    CHECK_THROWS_AS(validate_config(bad), ConfigError);

    json bad2 = cfg;
    bad2["probes"] = json::array({{{"kind", "no-such-probe"}}});
    CHECK_THROWS_AS(validate_config(bad2), ConfigError);

    json bad3 = cfg;
    bad3["problem"].erase("grid");
    CHECK_THROWS_AS(validate_config(bad3), ConfigError);

    // custom problems need data expressions
    json bad4 = cfg;
    bad4["problem"].erase("manufactured");
    bad4["problem"].erase("q");
    CHECK_THROWS_AS(validate_config(bad4), ConfigError);

    CHECK_THROWS_AS(run_config_file("/no/such/config.json"), ConfigError);
    auto dir = temp_dir("badjson");
    std::ofstream(dir / "c.json") << "{ not json";
    CHECK_THROWS_AS(run_config_file((dir / "c.json").string()), ConfigError);

    // config errors write nothing
    json nofit = bad;
    nofit["output_dir"] = (dir / "never").string();
    CHECK_THROWS_AS(run_config(nofit), ConfigError);
    CHECK(!std::filesystem::exists(dir / "never"));
}

TEST_CASE("compute errors name the failing stage") {
    auto dir = temp_dir("stage");
    // the certificate needs time depth >= (15/16)^2; t_depth = 0.3 cannot cover it
    json cfg = {{"problem",
                 {{"gamma", 1.0},
                  {"p", 3.0},
                  {"n", 1},
                  {"manufactured", "plane"},
                  {"q", {0.4}},
                  {"grid", {{"h", 0.1}, {"t_depth", 0.3}}},
                  {"store_every", 5}}},
                {"probes", json::array({{{"kind", "certificate"}, {"mode", "holder"}}})},
                {"output_dir", (dir / "out").string()},
                {"seed", 1}};
    try {
        run_config(cfg);
        FAIL("expected ComputeError");
    } catch (const ComputeError& e) {
        CHECK(std::string(e.what()).find("probe_0_certificate") != std::string::npos);
    }
}

TEST_CASE("run executes probes and encodes verdicts in the exit status") {
    auto dir = temp_dir("run");
    // steep plane with a flatness probe: Smooth(0), exit 0
    json cfg = {{"problem",
                 {{"gamma", 1.0},
                  {"p", 3.0},
                  {"n", 1},
                  {"manufactured", "plane"},
                  {"q", {2.0}},
                  {"grid", {{"h", 0.02}, {"t_depth", 1.0}}},
                  {"store_every", 20}}},
                {"probes", json::array({{{"kind", "flatness"},
                                         {"rho", 0.5},
                                         {"delta", 0.05},
                                         {"c2", 1.0},
                                         {"c3", 2.0},
                                         {"kmax", 2}}})},
                {"output_dir", (dir / "out").string()},
                {"seed", 7}};
    int status = run_config(cfg);
    CHECK(status == 0);

    json rep = json::parse(slurp(dir / "out" / "probe_0_flatness.json"));
    CHECK(rep.at("verdict") == "Smooth");
    CHECK(rep.at("verdict_k") == 0);
    CHECK(std::filesystem::exists(dir / "out" / "manifest.json"));
    CHECK(std::filesystem::exists(dir / "out" / "field.csv"));
    CHECK(std::filesystem::exists(dir / "out" / "probe_0_flatness.csv"));

    // unresolved flatness (too-deep iteration on a coarse grid) exits nonzero
    json cfg2 = cfg;
    cfg2["problem"]["manufactured"] = "quadratic-stationary";
    cfg2["problem"].erase("q");
    cfg2["problem"]["grid"]["h"] = 0.1;
    cfg2["probes"][0]["kmax"] = 6;
    cfg2["output_dir"] = (dir / "out2").string();
    CHECK(run_config(cfg2) == 1);
}

TEST_CASE("identical configs and seeds give byte-identical artifacts") {
    auto dir = temp_dir("determinism");
    json cfg = {{"problem",
                 {{"gamma", 1.0},
                  {"p", 3.0},
                  {"n", 1},
                  {"initial", "0.3*cos(1.5*x1)"},
                  {"boundary", "0.3*cos(1.5*x1)"},
                  {"source", "0.05*sin(2*x1)"},
                  {"grid", {{"h", 0.05}, {"t_depth", 0.2}}},
                  {"store_every", 10}}},
                {"probes", json::array({{{"kind", "seminorms"}, {"r", 0.6},
                                         {"alphas", {0.5, 1.0}}},
                                        {{"kind", "oscillation"}, {"r", 0.5}}})},
                {"output_dir", (dir / "a").string()},
                {"seed", 3}};
    CHECK(run_config(cfg) == 0);
    json cfg2 = cfg;
    cfg2["output_dir"] = (dir / "b").string();
    CHECK(run_config(cfg2) == 0);

    for (const char* name :
         {"field.csv", "probe_0_seminorms.json", "probe_1_oscillation.json"})
        CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
    // manifests differ only in config echo (output_dir), so compare probes
    json ma = json::parse(slurp(dir / "a" / "manifest.json"));
    json mb = json::parse(slurp(dir / "b" / "manifest.json"));
    CHECK(ma.at("probes") == mb.at("probes"));
    CHECK(ma.at("dt_history") == mb.at("dt_history"));
}

TEST_CASE("convergence probe reports the fitted order") {
    auto dir = temp_dir("conv");
    json cfg = {{"problem",
                 {{"gamma", 2.0},
                  {"p", 3.0},
                  {"n", 1},
                  {"manufactured", "quadratic-stationary"},
                  {"eps", "h"},
                  {"grid", {{"h", 0.05}, {"t_depth", 0.05}}},
                  {"store_every", 1000}}},
                {"probes", json::array({{{"kind", "convergence"},
                                         {"h", {0.05, 0.025, 0.0125}},
                                         {"min_order", 1.5}}})},
                {"output_dir", (dir / "out").string()},
                {"seed", 1}};
    int status = run_config(cfg);
    json rep = json::parse(slurp(dir / "out" / "probe_0_convergence.json"));
    CAPTURE(rep.dump());
    CHECK(status == 0);
    CHECK(rep.at("order").get<double>() >= 1.5);
}
