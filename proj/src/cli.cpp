#include "helmlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "helmlab/errors.hpp"
#include "helmlab/morawetz.hpp"
#include "helmlab/quasimode.hpp"
#include "helmlab/scattering.hpp"
#include "helmlab/spectra.hpp"

namespace helmlab {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    out << content;
}

class RunLog {
public:
    explicit RunLog(const fs::path& p) : out_(p) {
        if (!out_) throw ConfigError("cannot write '" + p.string() + "'");
    }
    template <class... A>
    void line(fmt::format_string<A...> f, A&&... a) {
        out_ << fmt::format(f, std::forward<A>(a)...) << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
};

fs::path prepare_output(const ExperimentConfig& cfg) {
    const fs::path dir(cfg.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("field run.output: cannot create '" + cfg.output + "'");
    write_file(dir / "config.ini", serialize_config(cfg));
    return dir;
}

json fit_json(const Fit& f) {
    return json{{"slope", f.slope}, {"intercept", f.intercept}, {"half_width", f.half_width}, {"points", f.points}};
}

json prediction_json(const std::string& quantity, const Fit& f, std::optional<double> lo, std::optional<double> hi,
                     const std::string& verdict) {
    json j{{"quantity", quantity}, {"fit", fit_json(f)}};
    j["window"] = json{{"lo", lo ? json(*lo) : json(nullptr)}, {"hi", hi ? json(*hi) : json(nullptr)}};
    j["verdict"] = verdict;
    return j;
}

// Fit over k >= 10 with an optional one-sided or two-sided window.
json windowed_fit(const std::string& quantity, const std::vector<double>& ks, const std::vector<double>& v,
                  std::optional<double> lo, std::optional<double> hi) {
    try {
        const Fit f = fit_growth_above(ks, v);
        const bool pass = (!lo || f.slope >= *lo) && (!hi || f.slope <= *hi);
        return prediction_json(quantity, f, lo, hi, (!lo && !hi) ? "NO_PREDICTION" : (pass ? "PASS" : "FAIL"));
    } catch (const InvalidInput&) {
        return prediction_json(quantity, Fit{}, lo, hi, "INSUFFICIENT_DATA");
    }
}

std::shared_ptr<const Boundary> boundary_of(const ExperimentConfig& cfg) {
    return std::make_shared<const Boundary>(make_geometry(cfg.geometry));
}

SweepOptions sweep_options(const ExperimentConfig& cfg) {
    SweepOptions o;
    o.eta_coefficient = cfg.eta_coefficient;
    o.ppw = cfg.ppw;
    o.corner_depth = cfg.corner_depth;
    o.node_cap = cfg.node_cap;
    o.kernel_norms = cfg.kernel_norms;
    return o;
}

json summary_head(const ExperimentConfig& cfg, const std::string& geometry, const std::string& label) {
    return json{{"kind", to_string(cfg.kind)}, {"geometry", geometry}, {"label", label}, {"seed", cfg.seed}};
}

// Runs a sweep, saving partial CSV output if it aborts.
SweepResult logged_sweep(const ExperimentConfig& cfg, std::shared_ptr<const Boundary> b, const SweepOptions& opt,
                         const fs::path& dir, const std::string& csv_name, RunLog& log, std::ostream& console) {
    const auto ks = resolve_ks(cfg, *b);
    SweepResult partial;
    SweepResult res;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        res = k_sweep(b, ks, opt, &partial);
    } catch (...) {
        write_file(dir / csv_name, sweep_csv(partial));
        log.line("aborted after {} of {} wavenumbers", partial.records.size(), ks.size());
        throw;
    }
    for (const auto& r : res.records) {
        log.line("k={:.6f} n_nodes={} sigma_min={:.6e} seconds={:.2f}", r.k, r.n_nodes, r.sigma_min, r.seconds);
        console << fmt::format("k={:9.4f}  N={:5d}  sigma_max={:.6e}  sigma_min={:.6e}  cond={:.6e}\n", r.k, r.n_nodes,
                               r.sigma_max, r.sigma_min, r.cond);
    }
    log.line("total seconds={:.2f}", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    write_file(dir / csv_name, sweep_csv(res));
    return res;
}

std::vector<double> column(const SweepResult& r, const std::optional<double> SweepRecord::*m) {
    std::vector<double> v;
    for (const auto& rec : r.records) v.push_back((rec.*m).value_or(std::numeric_limits<double>::quiet_NaN()));
    return v;
}

std::vector<double> ks_of(const SweepResult& r) {
    std::vector<double> v;
    for (const auto& rec : r.records) v.push_back(rec.k);
    return v;
}

std::vector<double> inverse_norms(const SweepResult& r) {
    std::vector<double> v;
    for (const auto& rec : r.records) v.push_back(1.0 / rec.sigma_min);
    return v;
}

json table1_json(const SweepResult& res) {
    json rows = json::array();
    for (const auto& rep : summarize_vs_table1({res})) {
        for (const auto& p : rep.rows) rows.push_back(prediction_json(p.quantity, p.fit, p.lo, p.hi, p.verdict));
    }
    return rows;
}

void print_fits(std::ostream& console, const json& fits) {
    for (const auto& f : fits) {
        console << fmt::format("{:<18} slope={:+.4f} +/- {:.4f}  {}\n", f["quantity"].get<std::string>(),
                               f["fit"]["slope"].get<double>(), f["fit"]["half_width"].get<double>(),
                               f["verdict"].get<std::string>());
    }
}

void run_sweep(const ExperimentConfig& cfg, const fs::path& dir, RunLog& log, std::ostream& console) {
    auto b = boundary_of(cfg);
    const SweepResult res = logged_sweep(cfg, b, sweep_options(cfg), dir, "sweep.csv", log, console);
    json s = summary_head(cfg, res.geometry, res.label);
    s["artifacts"] = {"sweep.csv"};
    s["fits"] = table1_json(res);
    print_fits(console, s["fits"]);
    write_file(dir / "summary.json", s.dump(2) + "\n");
}

void run_quasimode(const ExperimentConfig& cfg, const fs::path& dir, RunLog& log, std::ostream& console,
                   bool coercivity) {
    auto b = boundary_of(cfg);
    if (!b->facing()) throw ConfigError("field geometry.type: geometry has no facing segments for a quasimode");
    SweepOptions opt = sweep_options(cfg);
    opt.on_record = [&](SweepRecord& rec, const DiscreteOperator& ap) {
        const QuasimodeDensity phi = build_quasimode(*ap.mesh, *b, rec.k);
        const QuasimodeResult q = quasimode_residual(ap, phi);
        rec.phi_norm = q.phi_norm;
        rec.residual = q.residual;
        rec.lower_bound = q.lower_bound;
        if (coercivity) rec.coercivity_probe = coercivity_probe(ap, phi);
    };
    const std::string csv = coercivity ? "coercivity.csv" : "quasimode.csv";
    const SweepResult res = logged_sweep(cfg, b, opt, dir, csv, log, console);
    const auto ks = ks_of(res);
    json s = summary_head(cfg, res.geometry, res.label);
    s["artifacts"] = {csv};
    json fits = table1_json(res);
    if (coercivity) {
        fits.push_back(windowed_fit("coercivity_probe", ks, column(res, &SweepRecord::coercivity_probe), std::nullopt, -0.7));
        fits.push_back(windowed_fit("inverse_norm_bounded", ks, inverse_norms(res), std::nullopt, 0.2));
    } else {
        fits.push_back(windowed_fit("residual", ks, column(res, &SweepRecord::residual), std::nullopt, -0.8));
    }
    bool consistent = true;
    for (const auto& r : res.records) consistent = consistent && *r.lower_bound <= (1.0 / r.sigma_min) * (1.0 + 1e-6);
    s["fits"] = fits;
    s["lower_bound_consistent"] = consistent;
    print_fits(console, fits);
    console << "lower_bound <= 1/sigma_min at every k: " << (consistent ? "yes" : "NO") << '\n';
    write_file(dir / "summary.json", s.dump(2) + "\n");
}

void run_scatter(const ExperimentConfig& cfg, const fs::path& dir, RunLog& log, std::ostream& console) {
    auto b = boundary_of(cfg);
    const auto ks = resolve_ks(cfg, *b);
    const double rg = r_gamma(*b);
    std::ostringstream csv;
    csv << "geometry,k,eta,n_nodes,neumann_norm,relative_residual,energy_flux\n";
    std::vector<double> norms;
    json s = summary_head(cfg, b->label(), to_string(classify_trapping(*b, 2000).label));
    json artifacts = json::array({"scatter.csv"});
    for (double k : ks) {
        const auto t0 = std::chrono::steady_clock::now();
        const double eta = cfg.eta_coefficient * k;
        auto mesh = build_mesh(b, k, cfg.ppw, cfg.corner_depth, cfg.node_cap);
        const auto w = IncidentWave::from_angle(k, cfg.scatter.direction_angle);
        const SoundSoftSolution sol = solve_soundsoft(w, eta, mesh);
        const double nn = sol.neumann.l2_norm();
        const double flux = scattered_energy_flux(sol, 2.0 * rg);
        norms.push_back(nn);
        csv << b->label() << ',' << format_number(k) << ',' << format_number(eta) << ',' << mesh->size() << ','
            << format_number(nn) << ',' << format_number(sol.relative_residual) << ',' << format_number(flux) << '\n';
        if (cfg.scatter.field_grid) {
            const std::string name = fmt::format("field_k{:.4f}.txt", k);
            std::ostringstream grid;
            const int n = cfg.scatter.grid_points;
            const double hw = cfg.scatter.grid_half_width;
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    const Vec2 x(-hw + 2.0 * hw * i / (n - 1), -hw + 2.0 * hw * j / (n - 1));
                    try {
                        const cplx u = evaluate_field(sol, {x}).front();
                        grid << format_number(x.x()) << ' ' << format_number(x.y()) << ' ' << format_number(u.real())
                             << ' ' << format_number(u.imag()) << '\n';
                    } catch (const InvalidInput&) {
                    }
                }
            }
            write_file(dir / name, grid.str());
            artifacts.push_back(name);
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log.line("k={:.6f} n_nodes={} neumann_norm={:.6e} residual={:.2e} flux={:.3e} seconds={:.2f}", k, mesh->size(),
                 nn, sol.relative_residual, flux, sec);
        console << fmt::format("k={:9.4f}  N={:5d}  ||dn u||={:.6e}  residual={:.2e}  Re flux={:+.3e}\n", k,
                               mesh->size(), nn, sol.relative_residual, flux);
    }
    write_file(dir / "scatter.csv", csv.str());
    s["artifacts"] = artifacts;
    s["fits"] = json::array({windowed_fit("neumann_norm", ks, norms, std::nullopt, 2.1)});
    print_fits(console, s["fits"]);
    write_file(dir / "summary.json", s.dump(2) + "\n");
}

void run_constants(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& console) {
    const auto& c = cfg.constants;
    const double e0 = epsilon0(c.R0, c.R1);
    const double eps = c.eps_fraction * e0;
    const CutoffProfile p = build_cutoff(c.R0, c.R1, eps);
    const MultiplierConstants m = threshold_constants(p);
    const double rc = m.resolvent_constant(c.k, c.R);
    const std::vector<std::pair<std::string, double>> rows = {
        {"R0", c.R0},         {"R1", c.R1},           {"eps0", e0},
        {"eps", eps},         {"c_chi", m.c_chi},     {"q", m.q},
        {"M_alpha", m.M_alpha}, {"R_star", m.R_star}, {"chi(R_star)", m.chi_R_star},
        {"chi(2R0)", m.chi_2R0}, {"alpha_inf", m.alpha_inf}, {"k_threshold", m.k_threshold},
        {"k", c.k},           {"R", c.R},             {"resolvent_constant", rc}};
    json j = json::object();
    for (const auto& [name, v] : rows) {
        console << fmt::format("{:<20} {:.12e}\n", name, v);
        j[name] = v;
    }
    json s{{"kind", "constants"}, {"constants", j}, {"artifacts", json::array()}};
    write_file(dir / "constants.json", j.dump(2) + "\n");
    write_file(dir / "summary.json", s.dump(2) + "\n");
}

void run_geometry_check(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& console) {
    const Boundary b = make_geometry(cfg.geometry);
    const TrappingClass tc = classify_trapping(b);
    const auto strong = classify_strongly_R0R1(b, 10000);
    const auto par = detect_parallel_trapping(b);
    json j{{"geometry", b.label()},
           {"loops", b.num_loops()},
           {"arcs", b.arcs().size()},
           {"corners", b.corner_params().size()},
           {"length", b.total_length()},
           {"r_gamma", r_gamma(b)},
           {"classification", to_string(tc.label)}};
    console << fmt::format("geometry        {}\n", b.label());
    console << fmt::format("loops           {}\narcs            {}\ncorners         {}\n", b.num_loops(), b.arcs().size(),
                           b.corner_params().size());
    console << fmt::format("length          {:.10g}\nR_Gamma         {:.10g}\n", b.total_length(), r_gamma(b));
    console << fmt::format("classification  {}\n", to_string(tc.label));
    if (strong) {
        console << fmt::format("strongly_R0R1   R0={:.10g} R1={:.10g}\n", strong->R0, strong->R1);
        j["strongly_R0R1"] = {{"R0", strong->R0}, {"R1", std::isinf(strong->R1) ? json("inf") : json(strong->R1)}};
    } else {
        console << "strongly_R0R1   no\n";
        j["strongly_R0R1"] = nullptr;
    }
    if (par) {
        console << fmt::format("parallel        a={:.10g}\n", *par);
        j["parallel_gap"] = *par;
    } else {
        j["parallel_gap"] = nullptr;
    }
    write_file(dir / "geometry.json", j.dump(2) + "\n");
    json s{{"kind", "geometry-check"}, {"geometry", b.label()}, {"label", to_string(tc.label)},
           {"artifacts", json::array()}};
    write_file(dir / "summary.json", s.dump(2) + "\n");
}

void run_identities(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& console) {
    const IdentityReport rep = identity_suite(cfg.identities, cfg.seed);
    std::ostringstream csv;
    csv << "test,index,a,b,order,pass\n";
    for (const auto& c : rep.cases) {
        csv << c.test << ',' << c.index << ',' << format_number(c.a) << ',' << format_number(c.b) << ','
            << format_number(c.order) << ',' << (c.pass ? 1 : 0) << '\n';
    }
    write_file(dir / "identities.csv", csv.str());
    json s{{"kind", "identities"}, {"seed", cfg.seed}, {"artifacts", json::array()}};
    for (const char* t : {"morawetz", "morawetz_ludwig", "friedrichs", "flux"}) {
        const bool ok = rep.pass(t);
        s["results"][t] = ok ? "PASS" : "FAIL";
        console << fmt::format("{:<16} {}", t, ok ? "PASS" : "FAIL");
        if (std::string(t).starts_with("morawetz")) console << fmt::format("  min order {:.3f}", rep.min_order(t));
        console << '\n';
    }
    write_file(dir / "summary.json", s.dump(2) + "\n");
}

}  // namespace

bool IdentityReport::pass(const std::string& test) const {
    bool any = false;
    for (const auto& c : cases) {
        if (c.test != test) continue;
        any = true;
        if (!c.pass) return false;
    }
    return any;
}

double IdentityReport::min_order(const std::string& test) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : cases)
        if (c.test == test) m = std::min(m, c.order);
    return m;
}

IdentityReport identity_suite(const IdentitiesSpec& spec, std::uint64_t seed) {
    IdentityReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::normal_distribution<double> N(0.0, 1.0);
    auto cnormal = [&] { return cplx(N(rng), N(rng)); };
    auto unit = [&] {
        const double t = 2.0 * kPi * U(rng);
        return Vec2(std::cos(t), std::sin(t));
    };
    auto random_field = [&](double k, double src_radius) -> TestField {
        switch (static_cast<int>(3.0 * U(rng))) {
            case 0: {
                const int n = 2 + static_cast<int>(2.0 * U(rng));
                std::vector<Vec2> ds;
                std::vector<cplx> as;
                for (int j = 0; j < n; ++j) {
                    ds.push_back(unit());
                    as.push_back(cnormal());
                }
                return plane_wave_superposition(k, ds, as);
            }
            case 1: {
                std::array<cplx, 10> c;
                for (auto& z : c) z = cnormal();
                return cubic_field(c);
            }
            default: {
                const int n = 1 + static_cast<int>(3.0 * U(rng));
                std::vector<Vec2> ys;
                std::vector<cplx> as;
                for (int j = 0; j < n; ++j) {
                    ys.push_back(src_radius * std::sqrt(U(rng)) * unit());
                    as.push_back(cnormal());
                }
                return point_source_field(k, ys, as);
            }
        }
    };

    const double h = 2e-3;
    auto order_case = [&](const std::string& test, int i, double r1, double r2) {
        IdentityCase c{test, i, r1, r2, std::log2(r1 / r2), false};
        c.pass = c.order >= 1.9 || (r1 < 1e-10 && r2 < 1e-10);
        rep.cases.push_back(c);
    };

    const CutoffProfile prof = build_cutoff(1.0, 1.4, epsilon0(1.0, 1.4));
    const double q = q_param(c_chi(prof));
    for (int i = 0; i < spec.fields; ++i) {
        const double k = 1.0 + 7.0 * U(rng);
        const TestField v = random_field(k, 0.3);
        const Multiplier m = (i % 2 == 0) ? profile_multiplier(prof, q, 3.0 * U(rng))
                                          : radial_multiplier(2.0 * U(rng), 3.0 * U(rng));
        const Vec2 x = (1.0 + 0.4 * U(rng)) * unit();
        order_case("morawetz", i, morawetz_residual(v, m, k, x, h), morawetz_residual(v, m, k, x, h / 2));
    }
    for (int i = 0; i < spec.fields; ++i) {
        const double k = 1.0 + 7.0 * U(rng);
        const TestField v = random_field(k, 0.2);
        const double alpha = 2.0 * U(rng);
        const Vec2 x = (0.5 + 2.5 * U(rng)) * unit();
        order_case("morawetz_ludwig", i, morawetz_ludwig_residual(v, alpha, k, x, h),
                   morawetz_ludwig_residual(v, alpha, k, x, h / 2));
    }
    for (int i = 0; i < spec.friedrichs_fields; ++i) {
        const double R = 1.0;
        const int nb = 1 + static_cast<int>(4.0 * U(rng));
        std::vector<Vec2> cs, ss;
        std::vector<cplx> as;
        for (int j = 0; j < nb; ++j) {
            cs.push_back(3.0 * R * std::sqrt(U(rng)) * unit());
            ss.emplace_back(0.25 + 1.25 * U(rng), 0.25 + 1.25 * U(rng));
            as.push_back(cnormal());
        }
        auto f = [&](const Vec2& x) {
            cplx s = 0.0;
            for (int j = 0; j < nb; ++j) {
                const double u = std::hypot((x.x() - cs[j].x()) / ss[j].x(), (x.y() - cs[j].y()) / ss[j].y());
                if (u < 1.0) s += as[j] * std::exp(-1.0 / (1.0 - u * u));
            }
            return s;
        };
        const FriedrichsSides fr = friedrichs_check(sample_field(f, R, 128), R);
        rep.cases.push_back({"friedrichs", i, fr.lhs, fr.rhs, 0.0, fr.lhs <= fr.rhs * (1.0 + 1e-3)});
    }
    for (int i = 0; i < spec.flux_superpositions; ++i) {
        const double k = 1.0 + 19.0 * U(rng);
        const double R = 1.0 + 3.0 * U(rng);
        const int n = 1 + static_cast<int>(5.0 * U(rng));
        std::vector<Vec2> ys;
        std::vector<cplx> as;
        for (int j = 0; j < n; ++j) {
            ys.push_back(0.45 * R * std::sqrt(U(rng)) * unit());
            as.push_back(cnormal());
        }
        const FluxCheck fc = radiating_flux_check(k, ys, as, R);
        rep.cases.push_back({"flux", i, fc.re_flux, fc.lhs_21, 0.0, fc.re_flux <= 1e-8 && fc.lhs_21 <= 1e-8});
    }
    return rep;
}

void run_experiment(const ExperimentConfig& cfg, std::ostream& console) {
    validate(cfg);
    const fs::path dir = prepare_output(cfg);
    RunLog log(dir / "run.log");
    log.line("kind={} geometry={} ppw={} corner_depth={} eta_coefficient={}", to_string(cfg.kind), cfg.geometry.type,
             cfg.ppw, cfg.corner_depth, cfg.eta_coefficient);
    switch (cfg.kind) {
        case ExperimentKind::sweep: run_sweep(cfg, dir, log, console); break;
        case ExperimentKind::quasimode: run_quasimode(cfg, dir, log, console, false); break;
        case ExperimentKind::coercivity: run_quasimode(cfg, dir, log, console, true); break;
        case ExperimentKind::scatter: run_scatter(cfg, dir, log, console); break;
        case ExperimentKind::constants: run_constants(cfg, dir, console); break;
        case ExperimentKind::geometry_check: run_geometry_check(cfg, dir, console); break;
        case ExperimentKind::identities: run_identities(cfg, dir, console); break;
    }
    log.line("done");
}

namespace {

struct Series {
    std::string column, quantity, transform;
    json reference;
};

std::vector<Series> series_for(const std::string& kind, const std::string& geometry, const std::string& label) {
    auto slope = [](double s, const std::string& lbl) { return json{{"slope", s}, {"label", lbl}}; };
    auto band = [](double lo, double hi, const std::string& lbl) {
        return json{{"band", {lo, hi}}, {"label", lbl}};
    };
    std::vector<Series> out;
    if (kind == "scatter") {
        out.push_back({"neumann_norm", "neumann_norm", "", json::array({slope(2.0, "k^2 upper bound")})});
        return out;
    }
    const bool circle = geometry == "circle" || label == "star_shaped_ball";
    const bool parallel = label == "parallel_trapping";
    if (circle) {
        out.push_back({"cond", "cond", "", json::array({slope(1.0 / 3.0, "k^(1/3)")})});
        out.push_back({"sigma_max", "sigma_max", "", json::array({slope(1.0 / 3.0, "k^(1/3)")})});
        out.push_back({"sigma_min", "inverse_norm", "reciprocal", json::array({slope(0.0, "bounded")})});
        out.push_back({"norm_S", "norm_S", "", json::array({slope(-2.0 / 3.0, "k^(-2/3)")})});
        out.push_back({"norm_Dp", "norm_Dp", "", json::array({slope(1.0 / 6.0, "k^(1/6)")})});
    } else if (parallel) {
        out.push_back({"sigma_min", "inverse_norm", "reciprocal", json::array({band(1.0, 2.0, "between k and k^2")})});
        out.push_back({"cond", "cond", "", json::array({slope(1.5, "k^(3/2) lower bound")})});
    } else {
        out.push_back({"sigma_min", "inverse_norm", "reciprocal", json::array()});
        out.push_back({"cond", "cond", "", json::array()});
    }
    if (kind == "quasimode") out.push_back({"residual", "residual", "", json::array({slope(-1.0, "k^(-1)")})});
    if (kind == "coercivity") {
        out.push_back({"coercivity_probe", "coercivity_probe", "", json::array({slope(-1.0, "k^(-1)")})});
    }
    return out;
}

}  // namespace

std::string emit_plot_inputs(const std::string& dir_s, std::vector<std::string>* warnings) {
    const fs::path dir(dir_s);
    if (!fs::is_directory(dir)) throw InvalidInput("plot-manifest: '" + dir_s + "' is not a directory");
    std::vector<fs::path> summaries;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().filename() == "summary.json") summaries.push_back(e.path());
    }
    std::sort(summaries.begin(), summaries.end());
    if (summaries.empty()) throw InvalidInput("plot-manifest: no completed runs under '" + dir_s + "'");
    json entries = json::array();
    for (const auto& sp : summaries) {
        std::ifstream in(sp);
        json s;
        try {
            s = json::parse(in);
        } catch (const json::parse_error&) {
            if (warnings) warnings->push_back("unreadable " + sp.string());
            continue;
        }
        const std::string kind = s.value("kind", "");
        const std::string geometry = s.value("geometry", "");
        const std::string label = s.value("label", "");
        for (const auto& a : s.value("artifacts", json::array())) {
            const std::string name = a.get<std::string>();
            if (!name.ends_with(".csv")) continue;
            const fs::path csv = sp.parent_path() / name;
            if (!fs::exists(csv)) {
                if (warnings) warnings->push_back("missing " + csv.string() + ", skipped");
                continue;
            }
            const std::string rel = fs::relative(csv, dir).generic_string();
            const std::string stem = fs::relative(sp.parent_path(), dir).generic_string();
            for (const auto& ser : series_for(kind, geometry, label)) {
                std::string base = (stem == "." ? std::string() : stem + "_") + kind + "_" + ser.quantity;
                std::replace(base.begin(), base.end(), '/', '_');
                entries.push_back(json{{"csv", rel},
                                       {"x", "k"},
                                       {"y", ser.column},
                                       {"transform", ser.transform.empty() ? json(nullptr) : json(ser.transform)},
                                       {"quantity", ser.quantity},
                                       {"geometry", geometry},
                                       {"kind", kind},
                                       {"references", ser.reference},
                                       {"title", fmt::format("{} {}: {} vs k", geometry, kind, ser.quantity)},
                                       {"figure", base + ".png"}});
            }
        }
    }
    json m{{"entries", entries}};
    const fs::path out = dir / "manifest.json";
    write_file(out, m.dump(2) + "\n");
    return out.string();
}

}  // namespace helmlab
