#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <string>

#include "helmlab/config.hpp"
#include "helmlab/errors.hpp"

using namespace helmlab;

namespace {

std::string message_of(const std::string& text) {
    try {
        validate(parse_config(text));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("defaults") {
    const auto c = parse_config("");
    CHECK(c.kind == ExperimentKind::sweep);
    CHECK(c.eta_coefficient == 1.0);
    CHECK(c.geometry.type == "circle");
    CHECK(c.ks.mode == KSpec::Mode::log);
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("parsing every section") {
    const auto c = parse_config(R"(# comment
[run]
kind = quasimode
output = runs/q
seed = 42

[geometry]
type = two_squares
side = 1
gap = 0.5

[wavenumbers]
mode = quantized
m_min = 2
m_max = 12

[discretization]
ppw = 25
corner_depth = 8
node_cap = 9000

[operator]
eta_coefficient = 0.5
kernel_norms = false

[constants]
R0 = 1
R1 = 1.5
eps_fraction = 0.25

[scatter]
direction_angle = 0.3
field_grid = true

[identities]
fields = 4
)");
    CHECK(c.kind == ExperimentKind::quasimode);
    CHECK(c.output == "runs/q");
    CHECK(c.seed == 42);
    CHECK(c.geometry.type == "two_squares");
    CHECK(c.ks.mode == KSpec::Mode::quantized);
    CHECK(c.ks.m_max == 12);
    CHECK(c.ppw == 25.0);
    CHECK(c.corner_depth == 8);
    CHECK(c.node_cap == 9000);
    CHECK(c.eta_coefficient == 0.5);
    CHECK_FALSE(c.kernel_norms);
    CHECK(c.constants.R1 == 1.5);
    CHECK(c.constants.eps_fraction == 0.25);
    CHECK(c.scatter.direction_angle == 0.3);
    CHECK(c.scatter.field_grid);
    CHECK(c.identities.fields == 4);
    const auto ks = resolve_ks(c, make_geometry(c.geometry));
    REQUIRE(ks.size() == 11);
    CHECK(ks.front() == doctest::Approx(4.0 * std::numbers::pi));
}

TEST_CASE("round trip is byte identical") {
    const char* texts[] = {
        "",
        "[run]\nkind = scatter\n[geometry]\ntype = two_squares\ngap = 0.7\n[wavenumbers]\nmode = list\nlist = 5, 10.25, 20\n",
        "[geometry]\ntype = polygon\nvertices = 0 0; 2 0; 1 1.5\n[wavenumbers]\nmode = quantized\ngap = 0.5\n",
        "[geometry]\ntype = u_cavity\na2 = 3.5\nwall_height = 0.75\n[operator]\neta_coefficient = -2\n",
        "[geometry]\ntype = elliptic_cavity\nhalf_angle_deg = 40\n[constants]\nR0 = 2\nR1 = 3.1\n",
        "[run]\nkind = identities\nseed = 99\n[identities]\nfields = 3\nfriedrichs_fields = 7\n",
        "[geometry]\ntype = circle\nradius = 0.1\ncenter = 0.3, -1e-7\n[wavenumbers]\nkmin = 1.1\nkmax = 3.3\ncount = 7\n",
    };
    for (const char* t : texts) {
        const std::string a = serialize_config(parse_config(t));
        const std::string b = serialize_config(parse_config(a));
        CHECK(a == b);
        CHECK(serialize_config(parse_config(b)) == b);
    }
    const auto c = parse_config(texts[2]);
    CHECK(c.geometry.vertices.size() == 3);
    CHECK(c.geometry.vertices[2].y() == 1.5);
}

TEST_CASE("errors name the line or the field") {
    CHECK(message_of("[run]\nkind = sweep\n[broken\n").find("line 3") != std::string::npos);
    CHECK(message_of("[run]\ncolour = red\n").find("run.colour") != std::string::npos);
    CHECK(message_of("[nowhere]\nx = 1\n").find("nowhere") != std::string::npos);
    CHECK(message_of("[discretization]\nppw = fast\n").find("discretization.ppw") != std::string::npos);
    CHECK(message_of("[discretization]\nppw = 5\n").find("discretization.ppw") != std::string::npos);
    CHECK(message_of("[discretization]\ncorner_depth = 2.5\n").find("discretization.corner_depth") != std::string::npos);
    CHECK(message_of("[run]\nkind = dance\n").find("run.kind") != std::string::npos);
    CHECK(message_of("[operator]\neta_coefficient = 0\n").find("operator.eta_coefficient") != std::string::npos);
    CHECK(message_of("[operator]\nkernel_norms = maybe\n").find("operator.kernel_norms") != std::string::npos);
    CHECK(message_of("[wavenumbers]\nkmin = 0.5\n").find("wavenumbers.kmin") != std::string::npos);
    CHECK(message_of("[wavenumbers]\nmode = list\nlist = 3, x\n").find("wavenumbers.list") != std::string::npos);
    CHECK(message_of("[geometry]\ncenter = 1\n").find("geometry.center") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/helmlab.ini"), ConfigError);
}

TEST_CASE("experiment kind names") {
    for (auto k : {ExperimentKind::sweep, ExperimentKind::quasimode, ExperimentKind::coercivity, ExperimentKind::scatter,
                   ExperimentKind::constants, ExperimentKind::geometry_check, ExperimentKind::identities}) {
        CHECK(parse_kind(to_string(k)) == k);
    }
    CHECK(to_string(ExperimentKind::geometry_check) == "geometry-check");
}

TEST_CASE("quantized wavenumbers without a facing gap") {
    auto c = parse_config("[wavenumbers]\nmode = quantized\n");
    CHECK_THROWS_AS(resolve_ks(c, make_circle(1.0)), ConfigError);
    c.ks.gap = 1.0;
    CHECK(resolve_ks(c, make_circle(1.0)).front() == doctest::Approx(2.0 * std::numbers::pi));
}
