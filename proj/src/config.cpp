#include "helmlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "helmlab/errors.hpp"
#include "helmlab/spectra.hpp"

namespace helmlab {
namespace {

namespace pt = boost::property_tree;

std::string num(double v) { return fmt::format("{}", v); }

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

class Reader {
public:
    explicit Reader(const pt::ptree& t) : t_(t) {}

    std::string str(const std::string& key, const std::string& def) const {
        return trim(t_.get<std::string>(pt::ptree::path_type(key, '.'), def));
    }

    double real(const std::string& key, double def) const {
        const auto v = t_.get_optional<std::string>(key);
        if (!v) return def;
        try {
            std::size_t pos = 0;
            const double d = std::stod(trim(*v), &pos);
            if (pos != trim(*v).size()) throw std::invalid_argument("trailing");
            return d;
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("field {}: '{}' is not a number", key, *v));
        }
    }

    long long integer(const std::string& key, long long def) const {
        const auto v = t_.get_optional<std::string>(key);
        if (!v) return def;
        try {
            std::size_t pos = 0;
            const long long d = std::stoll(trim(*v), &pos);
            if (pos != trim(*v).size()) throw std::invalid_argument("trailing");
            return d;
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("field {}: '{}' is not an integer", key, *v));
        }
    }

    bool boolean(const std::string& key, bool def) const {
        const auto v = t_.get_optional<std::string>(key);
        if (!v) return def;
        const std::string s = trim(*v);
        if (s == "true") return true;
        if (s == "false") return false;
        throw ConfigError(fmt::format("field {}: expected true or false, got '{}'", key, s));
    }

    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        const auto v = t_.get_optional<std::string>(key);
        if (!v) return out;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ConfigError(fmt::format("field {}: '{}' is not a number", key, item));
            }
        }
        return out;
    }

private:
    const pt::ptree& t_;
};

std::string mode_name(KSpec::Mode m) {
    switch (m) {
        case KSpec::Mode::list: return "list";
        case KSpec::Mode::log: return "log";
        case KSpec::Mode::quantized: return "quantized";
    }
    return "log";
}

}  // namespace

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::sweep: return "sweep";
        case ExperimentKind::quasimode: return "quasimode";
        case ExperimentKind::coercivity: return "coercivity";
        case ExperimentKind::scatter: return "scatter";
        case ExperimentKind::constants: return "constants";
        case ExperimentKind::geometry_check: return "geometry-check";
        case ExperimentKind::identities: return "identities";
    }
    return "sweep";
}

ExperimentKind parse_kind(const std::string& s) {
    for (auto k : {ExperimentKind::sweep, ExperimentKind::quasimode, ExperimentKind::coercivity, ExperimentKind::scatter,
                   ExperimentKind::constants, ExperimentKind::geometry_check, ExperimentKind::identities}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError(fmt::format("field run.kind: unknown experiment kind '{}'", s));
}

ExperimentConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
    }
    static const std::vector<std::pair<std::string, std::vector<std::string>>> known = {
        {"run", {"kind", "output", "seed"}},
        {"geometry",
         {"type", "radius", "center", "side", "gap", "vertices", "semi_x", "semi_y", "half_angle_deg", "thickness",
          "left", "right", "bottom", "top", "a1", "a2", "wall_height"}},
        {"wavenumbers", {"mode", "list", "kmin", "kmax", "count", "m_min", "m_max", "gap"}},
        {"discretization", {"ppw", "corner_depth", "node_cap"}},
        {"operator", {"eta_coefficient", "kernel_norms"}},
        {"constants", {"R0", "R1", "eps_fraction", "k", "R"}},
        {"scatter", {"direction_angle", "field_grid", "grid_half_width", "grid_points"}},
        {"identities", {"fields", "friedrichs_fields", "flux_superpositions"}},
    };
    for (const auto& [section, body] : tree) {
        auto it = std::find_if(known.begin(), known.end(), [&](const auto& p) { return p.first == section; });
        if (it == known.end()) throw ConfigError(fmt::format("unknown section [{}]", section));
        if (body.empty() && !body.data().empty()) throw ConfigError(fmt::format("key '{}' outside a section", section));
        for (const auto& kv : body) {
            if (std::find(it->second.begin(), it->second.end(), kv.first) == it->second.end()) {
                throw ConfigError(fmt::format("field {}.{}: unknown key", section, kv.first));
            }
        }
    }

    ExperimentConfig c;
    const Reader r(tree);
    c.kind = parse_kind(r.str("run.kind", to_string(c.kind)));
    c.output = r.str("run.output", c.output);
    const long long seed = r.integer("run.seed", 1);
    if (seed < 0) throw ConfigError("field run.seed: must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);

    auto& g = c.geometry;
    g.type = r.str("geometry.type", g.type);
    g.radius = r.real("geometry.radius", g.radius);
    const auto center = r.list("geometry.center");
    if (!center.empty()) {
        if (center.size() != 2) throw ConfigError("field geometry.center: expected two numbers");
        g.center = Vec2(center[0], center[1]);
    }
    g.side = r.real("geometry.side", g.side);
    g.gap = r.real("geometry.gap", g.gap);
    const std::string verts = r.str("geometry.vertices", "");
    if (!verts.empty()) {
        std::stringstream ss(verts);
        std::string item;
        while (std::getline(ss, item, ';')) {
            std::istringstream p(item);
            double x, y;
            if (!(p >> x >> y)) throw ConfigError(fmt::format("field geometry.vertices: bad vertex '{}'", trim(item)));
            g.vertices.emplace_back(x, y);
        }
    }
    g.ellipse.semi_x = r.real("geometry.semi_x", g.ellipse.semi_x);
    g.ellipse.semi_y = r.real("geometry.semi_y", g.ellipse.semi_y);
    g.ellipse.half_angle_deg = r.real("geometry.half_angle_deg", g.ellipse.half_angle_deg);
    g.ellipse.thickness = r.real("geometry.thickness", g.ellipse.thickness);
    g.ucav.left = r.real("geometry.left", g.ucav.left);
    g.ucav.right = r.real("geometry.right", g.ucav.right);
    g.ucav.bottom = r.real("geometry.bottom", g.ucav.bottom);
    g.ucav.top = r.real("geometry.top", g.ucav.top);
    g.ucav.a1 = r.real("geometry.a1", g.ucav.a1);
    g.ucav.a2 = r.real("geometry.a2", g.ucav.a2);
    g.ucav.wall_height = r.real("geometry.wall_height", g.ucav.wall_height);

    const std::string mode = r.str("wavenumbers.mode", "log");
    if (mode == "list") c.ks.mode = KSpec::Mode::list;
    else if (mode == "log") c.ks.mode = KSpec::Mode::log;
    else if (mode == "quantized") c.ks.mode = KSpec::Mode::quantized;
    else throw ConfigError(fmt::format("field wavenumbers.mode: unknown mode '{}'", mode));
    c.ks.list = r.list("wavenumbers.list");
    c.ks.kmin = r.real("wavenumbers.kmin", c.ks.kmin);
    c.ks.kmax = r.real("wavenumbers.kmax", c.ks.kmax);
    c.ks.count = static_cast<int>(r.integer("wavenumbers.count", c.ks.count));
    c.ks.m_min = static_cast<int>(r.integer("wavenumbers.m_min", c.ks.m_min));
    c.ks.m_max = static_cast<int>(r.integer("wavenumbers.m_max", c.ks.m_max));
    c.ks.gap = r.real("wavenumbers.gap", c.ks.gap);

    c.ppw = r.real("discretization.ppw", c.ppw);
    c.corner_depth = static_cast<int>(r.integer("discretization.corner_depth", c.corner_depth));
    c.node_cap = static_cast<int>(r.integer("discretization.node_cap", c.node_cap));
    c.eta_coefficient = r.real("operator.eta_coefficient", c.eta_coefficient);
    c.kernel_norms = r.boolean("operator.kernel_norms", c.kernel_norms);

    c.constants.R0 = r.real("constants.R0", c.constants.R0);
    c.constants.R1 = r.real("constants.R1", c.constants.R1);
    c.constants.eps_fraction = r.real("constants.eps_fraction", c.constants.eps_fraction);
    c.constants.k = r.real("constants.k", c.constants.k);
    c.constants.R = r.real("constants.R", c.constants.R);

    c.scatter.direction_angle = r.real("scatter.direction_angle", c.scatter.direction_angle);
    c.scatter.field_grid = r.boolean("scatter.field_grid", c.scatter.field_grid);
    c.scatter.grid_half_width = r.real("scatter.grid_half_width", c.scatter.grid_half_width);
    c.scatter.grid_points = static_cast<int>(r.integer("scatter.grid_points", c.scatter.grid_points));

    c.identities.fields = static_cast<int>(r.integer("identities.fields", c.identities.fields));
    c.identities.friedrichs_fields =
        static_cast<int>(r.integer("identities.friedrichs_fields", c.identities.friedrichs_fields));
    c.identities.flux_superpositions =
        static_cast<int>(r.integer("identities.flux_superpositions", c.identities.flux_superpositions));
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& field, const std::string& msg) {
        throw ConfigError(fmt::format("field {}: {}", field, msg));
    };
    if (c.output.empty()) fail("run.output", "must not be empty");
    if (!(c.ppw >= 10.0)) fail("discretization.ppw", "must be >= 10");
    if (c.corner_depth < 0) fail("discretization.corner_depth", "must be >= 0");
    if (c.node_cap <= 0) fail("discretization.node_cap", "must be positive");
    if (c.eta_coefficient == 0.0) fail("operator.eta_coefficient", "must be nonzero");
    switch (c.ks.mode) {
        case KSpec::Mode::list:
            for (double k : c.ks.list)
                if (!(k >= 1.0)) fail("wavenumbers.list", "every k must be >= 1");
            break;
        case KSpec::Mode::log:
            if (!(c.ks.kmin >= 1.0)) fail("wavenumbers.kmin", "must be >= 1");
            if (!(c.ks.kmax >= c.ks.kmin)) fail("wavenumbers.kmax", "must be >= kmin");
            if (c.ks.count < 1) fail("wavenumbers.count", "must be >= 1");
            break;
        case KSpec::Mode::quantized:
            if (c.ks.m_min < 1 || c.ks.m_max < c.ks.m_min) fail("wavenumbers.m_min", "need 1 <= m_min <= m_max");
            if (c.ks.gap < 0.0) fail("wavenumbers.gap", "must be >= 0");
            break;
    }
    if (c.scatter.grid_points < 2) fail("scatter.grid_points", "must be >= 2");
    if (c.identities.fields < 0 || c.identities.friedrichs_fields < 0 || c.identities.flux_superpositions < 0) {
        fail("identities", "counts must be nonnegative");
    }
}

std::string serialize_config(const ExperimentConfig& c) {
    std::string s;
    auto kv = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    s += "[run]\n";
    kv("kind", to_string(c.kind));
    kv("output", c.output);
    kv("seed", std::to_string(c.seed));

    const auto& g = c.geometry;
    s += "\n[geometry]\n";
    kv("type", g.type);
    if (g.type == "circle") {
        kv("radius", num(g.radius));
        kv("center", num(g.center.x()) + ", " + num(g.center.y()));
    } else if (g.type == "two_squares") {
        kv("side", num(g.side));
        kv("gap", num(g.gap));
    } else if (g.type == "two_discs") {
        kv("radius", num(g.radius));
        kv("gap", num(g.gap));
    } else if (g.type == "polygon") {
        std::string v;
        for (std::size_t i = 0; i < g.vertices.size(); ++i) {
            v += (i ? "; " : "") + num(g.vertices[i].x()) + " " + num(g.vertices[i].y());
        }
        kv("vertices", v);
    } else if (g.type == "elliptic_cavity") {
        kv("semi_x", num(g.ellipse.semi_x));
        kv("semi_y", num(g.ellipse.semi_y));
        kv("half_angle_deg", num(g.ellipse.half_angle_deg));
        kv("thickness", num(g.ellipse.thickness));
    } else if (g.type == "u_cavity") {
        kv("left", num(g.ucav.left));
        kv("right", num(g.ucav.right));
        kv("bottom", num(g.ucav.bottom));
        kv("top", num(g.ucav.top));
        kv("a1", num(g.ucav.a1));
        kv("a2", num(g.ucav.a2));
        kv("wall_height", num(g.ucav.wall_height));
    }

    s += "\n[wavenumbers]\n";
    kv("mode", mode_name(c.ks.mode));
    switch (c.ks.mode) {
        case KSpec::Mode::list: kv("list", join(c.ks.list)); break;
        case KSpec::Mode::log:
            kv("kmin", num(c.ks.kmin));
            kv("kmax", num(c.ks.kmax));
            kv("count", std::to_string(c.ks.count));
            break;
        case KSpec::Mode::quantized:
            kv("m_min", std::to_string(c.ks.m_min));
            kv("m_max", std::to_string(c.ks.m_max));
            kv("gap", num(c.ks.gap));
            break;
    }

    s += "\n[discretization]\n";
    kv("ppw", num(c.ppw));
    kv("corner_depth", std::to_string(c.corner_depth));
    kv("node_cap", std::to_string(c.node_cap));

    s += "\n[operator]\n";
    kv("eta_coefficient", num(c.eta_coefficient));
    kv("kernel_norms", c.kernel_norms ? "true" : "false");

    s += "\n[constants]\n";
    kv("R0", num(c.constants.R0));
    kv("R1", num(c.constants.R1));
    kv("eps_fraction", num(c.constants.eps_fraction));
    kv("k", num(c.constants.k));
    kv("R", num(c.constants.R));

    s += "\n[scatter]\n";
    kv("direction_angle", num(c.scatter.direction_angle));
    kv("field_grid", c.scatter.field_grid ? "true" : "false");
    kv("grid_half_width", num(c.scatter.grid_half_width));
    kv("grid_points", std::to_string(c.scatter.grid_points));

    s += "\n[identities]\n";
    kv("fields", std::to_string(c.identities.fields));
    kv("friedrichs_fields", std::to_string(c.identities.friedrichs_fields));
    kv("flux_superpositions", std::to_string(c.identities.flux_superpositions));
    return s;
}

std::vector<double> resolve_ks(const ExperimentConfig& c, const Boundary& b) {
    switch (c.ks.mode) {
        case KSpec::Mode::list: return c.ks.list;
        case KSpec::Mode::log: return log_spaced(c.ks.kmin, c.ks.kmax, c.ks.count);
        case KSpec::Mode::quantized: {
            double a = c.ks.gap;
            if (a == 0.0) {
                if (!b.facing()) throw ConfigError("field wavenumbers.gap: geometry has no facing segments; set gap");
                a = b.facing()->gap();
            }
            return quantized_ks(a, c.ks.m_min, c.ks.m_max);
        }
    }
    return {};
}

}  // namespace helmlab
