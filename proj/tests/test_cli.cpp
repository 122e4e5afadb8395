#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "pmf/config.hpp"
#include "pmf/dispatch.hpp"
#include "pmf/io.hpp"

using namespace pmf;

namespace {

const char* kMinimalTumor = R"(
# standard tumor sandwich at desk scale
[model]
kind = tumor
m = 2
p_m = 1

[grid]
kind = radial
n_dim = 2
h = 0.05
extent = 6

[initial]
kind = barrier-sub
alpha0 = 0.5
beta0 = 0.1

[experiment]
kind = sandwich-sub
t_end = 2
snapshot_count = 5
output_dir = out
)";

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("minimal tumor config parses and the gates pass") {
    ParseResult r = parse_config(kMinimalTumor);
    REQUIRE(r.ok());
    CHECK(r.config->model.kind == ModelKind::TumorGrowth);
    CHECK(r.config->experiment == ExperimentKind::SandwichSub);
    CHECK(r.config->grid.cells == 120);
    REQUIRE(r.config->dg.has_value());
    CHECK(*r.config->dg == doctest::Approx(1.0));
    CHECK(check_gate_sub(r.config->sub_params()).pass);
}

TEST_CASE("gate violation is reported with the gate name") {
    std::string text = kMinimalTumor;
    text.replace(text.find("alpha0 = 0.5"), 12, "alpha0 = 0.65");
    ParseResult r = parse_config(text);
    REQUIRE(!r.ok());
    bool mentions_gate = false;
    for (const ConfigError& e : r.errors)
        if (e.reason.find("ini1") != std::string::npos) mentions_gate = true;
    CHECK(mentions_gate);
}

TEST_CASE("unknown keys are errors with line numbers") {
    std::string text = kMinimalTumor;
    text.replace(text.find("beta0 = 0.1"), 11, "betaO = 0.1");
    ParseResult r = parse_config(text);
    REQUIRE(!r.ok());
    bool found = false;
    for (const ConfigError& e : r.errors) {
        if (e.key == "betaO") {
            found = true;
            CHECK(e.line > 0);
            CHECK(e.reason.find("unknown key") != std::string::npos);
        }
    }
    CHECK(found);

    // unknown section
    ParseResult r2 = parse_config("[modle]\nkind = tumor\n");
    CHECK(!r2.ok());
}

TEST_CASE("config round trip: serialize then reparse reproduces the config") {
    ParseResult first = parse_config(kMinimalTumor);
    REQUIRE(first.ok());
    std::string canon = serialize_config(*first.config);
    ParseResult second = parse_config(canon);
    REQUIRE(second.ok());
    CHECK(serialize_config(*second.config) == canon);
}

TEST_CASE("fisher-kpp config derives p_m and rejects overrides") {
    std::string text = R"(
[model]
kind = fisher-kpp
m = 2

[grid]
kind = radial
n_dim = 2
h = 0.1
extent = 4

[initial]
kind = barrier-sub
alpha0 = 1.0
beta0 = 0.1

[experiment]
kind = simulate
t_end = 0.5
)";
    ParseResult r = parse_config(text);
    REQUIRE(r.ok());
    CHECK(r.config->model.p_m == doctest::Approx(2.0));
    CHECK(*r.config->dg == doctest::Approx(0.5));

    std::string with_pm = text;
    with_pm.replace(with_pm.find("m = 2"), 5, "m = 2\np_m = 3");
    CHECK(!parse_config(with_pm).ok());
}

TEST_CASE("custom g table parses and feeds the gates") {
    std::string text = R"(
[model]
kind = custom
m = 2
p_m = 1
p_h = 1
custom_g_table = 0:1,0.5:0.5,1:0

[grid]
kind = radial
n_dim = 2
h = 0.1
extent = 4

[initial]
kind = barrier-sub
alpha0 = 0.5
beta0 = 0.1

[experiment]
kind = simulate
t_end = 0.1
)";
    ParseResult r = parse_config(text);
    REQUIRE(r.ok());
    CHECK(r.config->model.kind == ModelKind::Custom);
    CHECK(*r.config->dg == doctest::Approx(1.0));
}

TEST_CASE("dispatch barriers: artifacts exist, status 0, bit-identical reruns") {
    TempDir dir("pmf_test_barriers");
    std::string text = R"(
[model]
kind = tumor
m = 2
p_m = 1

[grid]
kind = radial
n_dim = 2
h = 0.05
extent = 6

[initial]
kind = barrier-sub
alpha0 = 0.5
beta0 = 0.1

[experiment]
kind = barriers
t_end = 50
dt_ode = 0.01
output_dir = )" + (dir.path / "a").string() +
                       "\n";
    ParseResult r = parse_config(text);
    REQUIRE(r.ok());
    DispatchResult d1 = dispatch(*r.config);
    CHECK(d1.status == 0);
    CHECK(std::filesystem::exists(d1.output_dir / "trajectory.csv"));
    CHECK(std::filesystem::exists(d1.output_dir / "bounds.csv"));
    CHECK(std::filesystem::exists(d1.output_dir / "report.json"));
    CHECK(std::filesystem::exists(d1.output_dir / "summary.txt"));
    CHECK(read_file(d1.output_dir / "summary.txt").find("overall: PASS") != std::string::npos);

    // determinism: identical config, byte-identical artifacts
    RunConfig again = *r.config;
    again.output_dir = (dir.path / "b").string();
    DispatchResult d2 = dispatch(again);
    CHECK(read_file(d1.output_dir / "trajectory.csv") ==
          read_file(d2.output_dir / "trajectory.csv"));
    CHECK(read_file(d1.output_dir / "bounds.csv") == read_file(d2.output_dir / "bounds.csv"));
    CHECK(read_file(d1.output_dir / "report.json") == read_file(d2.output_dir / "report.json"));
}

TEST_CASE("PMFRONTIER_OUT overrides the configured output directory") {
    TempDir dir("pmf_test_envdir");
    ParseResult r = parse_config(kMinimalTumor);
    REQUIRE(r.ok());
    RunConfig c = *r.config;
    c.experiment = ExperimentKind::Barriers;
    c.t_end = 10.0;
    c.dt_ode = 0.01;
    c.output_dir = (dir.path / "ignored").string();

    std::string env_dir = (dir.path / "env").string();
    setenv("PMFRONTIER_OUT", env_dir.c_str(), 1);
    DispatchResult d = dispatch(c);
    unsetenv("PMFRONTIER_OUT");
    CHECK(d.output_dir == std::filesystem::path(env_dir));
    CHECK(std::filesystem::exists(std::filesystem::path(env_dir) / "report.json"));
    CHECK(!std::filesystem::exists(dir.path / "ignored"));
}

TEST_CASE("guard-band breach surfaces as a failing dispatch with a record") {
    TempDir dir("pmf_test_breach");
    std::string text = kMinimalTumor;
    text.replace(text.find("extent = 6"), 10, "extent = 3");
    text.replace(text.find("t_end = 2"), 9, "t_end = 9");
    ParseResult r = parse_config(text);
    REQUIRE(r.ok());
    RunConfig c = *r.config;
    c.output_dir = (dir.path / "run").string();
    DispatchResult d = dispatch(c);
    CHECK(d.status != 0);
    std::string report = read_file(d.output_dir / "report.json");
    CHECK(report.find("domain too small") != std::string::npos);
    CHECK(report.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("table initial data round-trips through a snapshot CSV") {
    TempDir dir("pmf_test_table");
    std::string text = kMinimalTumor;
    text.replace(text.find("kind = sandwich-sub"), 19, "kind = simulate");
    text.replace(text.find("t_end = 2"), 9, "t_end = 1");
    ParseResult r = parse_config(text);
    REQUIRE(r.ok());
    RunConfig first = *r.config;
    first.output_dir = (dir.path / "a").string();
    DispatchResult d1 = dispatch(first);
    REQUIRE(d1.status == 0);

    // restart from the final snapshot as tabulated data
    RunConfig second = first;
    second.initial = InitialKind::Table;
    second.table_path = (d1.output_dir / "snapshot_004.csv").string();
    second.output_dir = (dir.path / "b").string();
    DispatchResult d2 = dispatch(second);
    CHECK(d2.status == 0);
    CHECK(std::filesystem::exists(d2.output_dir / "diagnostics.csv"));

    // a short path or wrong cell count is a hard error
    RunConfig broken = second;
    broken.table_path = (dir.path / "missing.csv").string();
    DispatchResult d3 = dispatch(broken);
    CHECK(d3.status != 0);
}

TEST_CASE("csv and report formatting: 17 significant digits, LF endings") {
    CHECK(format_float(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_float(0.0) == "0");

    Csv csv;
    csv.add("a", {1.0, 2.5});
    csv.add("b", {0.1, -3.0});
    std::string s = csv.to_string();
    CHECK(s == "a,b\n1,0.10000000000000001\n2.5,-3\n");
    CHECK(s.find('\r') == std::string::npos);

    Report rep;
    rep.set("x", 2.0);
    rep.set("name", "value");
    rep.set("ok", true);
    std::string json = rep.to_json();
    CHECK(json.find("\"x\": 2") != std::string::npos);
    CHECK(json.find("\"name\": \"value\"") != std::string::npos);
    CHECK(json.find("\"ok\": true") != std::string::npos);
}
