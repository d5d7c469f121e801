#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "helmlab/cli.hpp"
#include "helmlab/errors.hpp"

using namespace helmlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("helmlab_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string run(const std::string& text, const fs::path& out) {
    ExperimentConfig c = parse_config(text);
    c.output = out.string();
    std::ostringstream os;
    run_experiment(c, os);
    return os.str();
}

int shell(const std::string& cmd) {
    const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

}  // namespace

TEST_CASE("geometry-check on two_squares") {
    const auto dir = scratch("geom");
    const std::string out = run("[run]\nkind = geometry-check\n[geometry]\ntype = two_squares\n", dir);
    CHECK(out.find("classification  parallel_trapping") != std::string::npos);
    CHECK(out.find("strongly_R0R1   R0=") != std::string::npos);
    CHECK(out.find("parallel        a=0.5") != std::string::npos);
    CHECK(fs::exists(dir / "geometry.json"));
    CHECK(fs::exists(dir / "config.ini"));
}

TEST_CASE("constants table") {
    const auto dir = scratch("const");
    const std::string out = run("[run]\nkind = constants\n", dir);
    CHECK(out.find("k_threshold") != std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "constants.json"));
    CHECK(j["c_chi"].get<double>() < 4.0);
    CHECK(j["q"].get<double>() > 0.0);
}

TEST_CASE("identity suite") {
    IdentitiesSpec s;
    s.fields = 4;
    s.friedrichs_fields = 4;
    s.flux_superpositions = 4;
    const auto r = identity_suite(s, 3);
    CHECK(r.cases.size() == 4 * 2 + 4 + 4);
    for (const char* t : {"morawetz", "morawetz_ludwig", "friedrichs", "flux"}) CHECK(r.pass(t));
    CHECK(r.min_order("morawetz") >= 1.9);
    const auto r2 = identity_suite(s, 3);
    for (std::size_t i = 0; i < r.cases.size(); ++i) CHECK(r.cases[i].a == r2.cases[i].a);
}

TEST_CASE("sweep, quasimode and scatter runs; manifest") {
    const auto dir = scratch("runs");
    const std::string sweep = "[geometry]\ntype = circle\n[wavenumbers]\nmode = list\nlist = 2, 3, 4, 5\n"
                              "[discretization]\nppw = 20\n";
    run(sweep, dir / "sweep");
    const std::string first = slurp(dir / "sweep" / "sweep.csv");
    run(sweep, dir / "sweep");
    CHECK(slurp(dir / "sweep" / "sweep.csv") == first);
    CHECK(first.rfind("geometry,label,k,eta,n_nodes,sigma_max,sigma_min,cond,norm_S,norm_Dp", 0) == 0);
    CHECK(std::count(first.begin(), first.end(), '\n') == 5);
    const auto s = nlohmann::json::parse(slurp(dir / "sweep" / "summary.json"));
    CHECK(s["kind"] == "sweep");
    CHECK(s["fits"].is_array());

    run("[run]\nkind = quasimode\n[geometry]\ntype = two_squares\n[wavenumbers]\nmode = quantized\nm_min = 1\n"
        "m_max = 4\n[discretization]\nppw = 15\ncorner_depth = 6\n[operator]\nkernel_norms = false\n",
        dir / "quasi");
    const std::string q = slurp(dir / "quasi" / "quasimode.csv");
    CHECK(q.find("two_squares") != std::string::npos);

    run("[run]\nkind = scatter\n[geometry]\ntype = circle\n[wavenumbers]\nmode = list\nlist = 2, 3, 4, 5\n"
        "[discretization]\nppw = 20\n[scatter]\nfield_grid = true\ngrid_points = 5\n",
        dir / "scatter");
    CHECK(slurp(dir / "scatter" / "scatter.csv").rfind("geometry,k,eta,n_nodes,neumann_norm", 0) == 0);

    std::vector<std::string> warnings;
    const auto path = emit_plot_inputs(dir.string(), &warnings);
    CHECK(warnings.empty());
    const auto m = nlohmann::json::parse(slurp(path));
    bool cond_ref = false, residual_ref = false;
    for (const auto& e : m["entries"]) {
        CHECK(fs::exists(dir / e["csv"].get<std::string>()));
        if (e["kind"] == "sweep" && e["quantity"] == "cond") {
            cond_ref = e["references"][0]["slope"].get<double>() == doctest::Approx(1.0 / 3.0);
        }
        if (e["kind"] == "quasimode" && e["quantity"] == "residual") {
            residual_ref = e["references"][0]["slope"].get<double>() == -1.0;
        }
    }
    CHECK(cond_ref);
    CHECK(residual_ref);

    fs::remove(dir / "scatter" / "scatter.csv");
    warnings.clear();
    emit_plot_inputs(dir.string(), &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("scatter.csv") != std::string::npos);
    CHECK_THROWS_AS(emit_plot_inputs(scratch("empty").string()), InvalidInput);
}

TEST_CASE("exit codes of the command-line tool") {
    const std::string exe = HELMLAB_CLI;
    const auto dir = scratch("exit");
    std::ofstream(dir / "bad.ini") << "[run]\nkind = sweep\n[discretization]\nppw = 3\n";
    std::ofstream(dir / "cap.ini") << "[wavenumbers]\nmode = list\nlist = 400\n[discretization]\nnode_cap = 100\n";
    std::ofstream(dir / "ok.ini") << "[geometry]\ntype = two_squares\n";
    CHECK(shell(exe + " geometry-check --config " + (dir / "ok.ini").string() + " --out " + (dir / "g").string()) == 0);
    CHECK(shell(exe + " sweep --config " + (dir / "bad.ini").string() + " --out " + (dir / "b").string()) == 2);
    CHECK(shell(exe + " sweep --config " + (dir / "missing.ini").string()) == 2);
    CHECK(shell(exe + " sweep --config " + (dir / "cap.ini").string() + " --out " + (dir / "c").string()) != 0);
    CHECK(shell(exe + " bogus") == 2);
    CHECK(shell(exe + " plot-manifest --out " + (dir / "nothing").string()) != 0);
}
