// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "helmlab/cli.hpp"
#include "helmlab/errors.hpp"
#include "helmlab/morawetz.hpp"
#include "helmlab/quasimode.hpp"
#include "helmlab/scattering.hpp"
#include "helmlab/spectra.hpp"

using namespace helmlab;

namespace {

constexpr double kCircleOracleTol = 1e-6;
constexpr double kInverseCircleLo = -0.15, kInverseCircleHi = 0.15;
constexpr double kCondCircleLo = 1.0 / 3.0 - 0.1, kCondCircleHi = 1.0 / 3.0 + 0.1;
constexpr double kNormSLo = -2.0 / 3.0 - 0.15, kNormSHi = -2.0 / 3.0 + 0.15;
constexpr double kNormDpLo = 1.0 / 6.0 - 0.1, kNormDpHi = 1.0 / 6.0 + 0.1;
constexpr double kTrapInverseLo = 0.7, kTrapInverseHi = 2.0;
constexpr double kTrapCondLo = 1.2;
constexpr double kResidualSlopeMax = -0.8;
constexpr double kLowerBoundSlack = 1e-6;
constexpr double kProbeSlopeMax = -0.7;
constexpr double kCavityInverseMax = 0.2;
constexpr double kOrderMin = 1.9;
constexpr double kZdotNMin = -1e-10;
constexpr int kProfileSamples = 10000;
constexpr int kBoundarySamples = 10000;
constexpr double kNeumannSlopeMax = 2.1;
constexpr double kSeriesTol = 1e-5;
constexpr double kCircleSelfTol = 1e-6;
constexpr double kSquaresSelfTol = 1e-4;

struct Outcome {
    int id;
    bool pass;
    std::string detail;
};

std::vector<Outcome> outcomes;

void report(int id, bool pass, const std::string& detail) {
    outcomes.push_back({id, pass, detail});
    std::printf("CRITERION %d %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

void progress(const std::string& s) {
    std::printf("  .. %s\n", s.c_str());
    std::fflush(stdout);
}

void guarded(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("error: ") + e.what());
    }
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::shared_ptr<const Boundary> shared(Boundary b) { return std::make_shared<const Boundary>(std::move(b)); }

std::vector<double> column(const SweepResult& r, const std::function<double(const SweepRecord&)>& f) {
    std::vector<double> v;
    for (const auto& rec : r.records) v.push_back(f(rec));
    return v;
}

std::vector<double> ks_of(const SweepResult& r) {
    return column(r, [](const SweepRecord& x) { return x.k; });
}

void record_line(const SweepRecord& r) {
    progress(fmt::format("k={:.4f} N={} sigma_max={:.6e} sigma_min={:.6e} {:.0f}s", r.k, r.n_nodes, r.sigma_max,
                         r.sigma_min, r.seconds));
}

// Oracle extremes of A' on the unit circle: |lambda_n| decreases to 1/2 as n grows.
Extremes circle_oracle(double k) {
    const auto lam = circle_eigenvalues(k, k, 1.0, static_cast<int>(20.0 * k) + 400);
    double hi = 0.0, lo = 0.5;
    for (const cplx& l : lam) hi = std::max(hi, std::abs(l)), lo = std::min(lo, std::abs(l));
    return {hi, lo};
}

void criterion1() {
    guarded(1, [] {
        const auto b = shared(make_circle(1.0));
        double worst = 0.0;
        std::string d;
        for (double k : {5.0, 20.0}) {
            const auto e = operator_extremes(assemble_combined(OperatorKind::Ap, k, k, build_mesh(b, k, 30.0, 10)));
            const auto o = circle_oracle(k);
            const double a = rel(e.sigma_max, o.sigma_max), c = rel(e.sigma_min, o.sigma_min);
            worst = std::max({worst, a, c});
            d += fmt::format("k={}: sigma_max {:.10f} vs {:.10f} (rel {:.2e}), sigma_min {:.10f} vs {:.10f} (rel {:.2e}); ",
                             k, e.sigma_max, o.sigma_max, a, e.sigma_min, o.sigma_min, c);
        }
        report(1, worst <= kCircleOracleTol, d + fmt::format("tol {:.0e}", kCircleOracleTol));
    });
}

void criteria2and3() {
    SweepResult res;
    try {
        SweepOptions opt;
        opt.ppw = 30.0;
        opt.kernel_norms = true;
        opt.on_record = [](SweepRecord& r, const DiscreteOperator&) { record_line(r); };
        res = k_sweep(shared(make_circle(1.0)), log_spaced(10.0, 80.0, 12), opt);
    } catch (const std::exception& e) {
        report(2, false, std::string("error: ") + e.what());
        report(3, false, std::string("error: ") + e.what());
        return;
    }
    const auto ks = ks_of(res);
    const Fit inv = fit_growth(ks, column(res, [](const SweepRecord& r) { return 1.0 / r.sigma_min; }));
    const Fit cond = fit_growth(ks, column(res, [](const SweepRecord& r) { return r.cond; }));
    report(2, within(inv.slope, kInverseCircleLo, kInverseCircleHi) && within(cond.slope, kCondCircleLo, kCondCircleHi),
           fmt::format("1/sigma_min slope {:+.4f} (+/-{:.4f}) in [{}, {}]; cond slope {:+.4f} (+/-{:.4f}) in [{:.4f}, {:.4f}]",
                       inv.slope, inv.half_width, kInverseCircleLo, kInverseCircleHi, cond.slope, cond.half_width,
                       kCondCircleLo, kCondCircleHi));
    const Fit s = fit_growth(ks, column(res, [](const SweepRecord& r) { return *r.norm_S; }));
    const Fit d = fit_growth(ks, column(res, [](const SweepRecord& r) { return *r.norm_Dp; }));
    report(3, within(s.slope, kNormSLo, kNormSHi) && within(d.slope, kNormDpLo, kNormDpHi),
           fmt::format("||S|| slope {:+.4f} in [{:.4f}, {:.4f}]; ||D'|| slope {:+.4f} in [{:.4f}, {:.4f}] "
                       "(||D'|| {:.4f} at k=10, {:.4f} at k=80)",
                       s.slope, kNormSLo, kNormSHi, d.slope, kNormDpLo, kNormDpHi, *res.records.front().norm_Dp,
                       *res.records.back().norm_Dp));
}

void criteria4to5and9() {
    const auto b = shared(make_two_squares(1.0, 0.5));
    std::vector<double> neumann;
    SweepResult res;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        SweepOptions opt;
        opt.ppw = 25.0;
        opt.corner_depth = 8;
        opt.kernel_norms = false;
        opt.on_record = [&](SweepRecord& r, const DiscreteOperator& ap) {
            const auto q = build_quasimode(*ap.mesh, *b, r.k);
            const auto qr = quasimode_residual(ap, q);
            r.phi_norm = qr.phi_norm;
            r.residual = qr.residual;
            r.lower_bound = qr.lower_bound;
            const auto sol = solve_soundsoft(IncidentWave::from_angle(r.k, 0.0), r.eta, ap);
            neumann.push_back(sol.neumann.l2_norm());
            record_line(r);
            progress(fmt::format("residual={:.6e} lower_bound={:.6e} 1/sigma_min={:.6e} ||dn u||={:.6e}", qr.residual,
                                 qr.lower_bound, 1.0 / r.sigma_min, neumann.back()));
        };
        res = k_sweep(b, quantized_ks(0.5, 2, 12), opt);
    } catch (const std::exception& e) {
        for (int id : {4, 5, 9}) report(id, false, std::string("error: ") + e.what());
        return;
    }
    const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
    const auto ks = ks_of(res);
    int max_n = 0;
    for (const auto& r : res.records) max_n = std::max(max_n, r.n_nodes);
    const Fit inv = fit_growth(ks, column(res, [](const SweepRecord& r) { return 1.0 / r.sigma_min; }));
    const Fit cond = fit_growth(ks, column(res, [](const SweepRecord& r) { return r.cond; }));
    report(4, within(inv.slope, kTrapInverseLo, kTrapInverseHi) && cond.slope >= kTrapCondLo,
           fmt::format("1/sigma_min slope {:+.4f} (+/-{:.4f}) in [{}, {}]; cond slope {:+.4f} (+/-{:.4f}) >= {}; "
                       "max N {}; {:.1f} min",
                       inv.slope, inv.half_width, kTrapInverseLo, kTrapInverseHi, cond.slope, cond.half_width,
                       kTrapCondLo, max_n, minutes));

    const Fit resid = fit_growth(ks, column(res, [](const SweepRecord& r) { return *r.residual; }));
    bool consistent = true;
    for (const auto& r : res.records) consistent = consistent && *r.lower_bound <= (1.0 / r.sigma_min) * (1.0 + kLowerBoundSlack);
    report(5, resid.slope <= kResidualSlopeMax && consistent,
           fmt::format("residual slope {:+.4f} (+/-{:.4f}) <= {}; residual {:.4f} at k={:.2f}, {:.4f} at k={:.2f}; "
                       "lower_bound <= (1/sigma_min)(1+{:.0e}) at every k: {}",
                       resid.slope, resid.half_width, kResidualSlopeMax, *res.records.front().residual, ks.front(),
                       *res.records.back().residual, ks.back(), kLowerBoundSlack, consistent ? "yes" : "no"));

    guarded(9, [&] {
        const Fit nf = fit_growth(ks, neumann);
        const double k = 5.0;
        const auto mesh = build_mesh(shared(make_circle(1.0)), k, 30.0, 10);
        const auto sol = solve_soundsoft(IncidentWave::from_angle(k, 0.0), k, mesh);
        std::vector<double> th;
        for (const Vec2& x : mesh->x) th.push_back(std::atan2(x.y(), x.x()));
        const auto exact = circle_neumann_series(k, 1.0, 0.0, th);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < mesh->size(); ++i) {
            num += mesh->weight[i] * std::norm(sol.neumann.values[i] - exact[i]);
            den += mesh->weight[i] * std::norm(exact[i]);
        }
        const double err = std::sqrt(num / den);
        report(9, nf.slope <= kNeumannSlopeMax && err <= kSeriesTol,
               fmt::format("||dn u^t|| slope {:+.4f} (+/-{:.4f}) <= {}; circle series rel L2 error {:.2e} <= {:.0e}",
                           nf.slope, nf.half_width, kNeumannSlopeMax, err, kSeriesTol));
    });
}

void criterion6() {
    const auto b = shared(make_u_cavity());
    std::vector<double> ks;
    for (int m = 13; m <= 49; m += 4) ks.push_back(quantized_ks(b->facing()->gap(), m, m)[0]);
    SweepResult res;
    try {
        SweepOptions opt;
        opt.ppw = 25.0;
        opt.corner_depth = 8;
        opt.kernel_norms = false;
        opt.on_record = [&](SweepRecord& r, const DiscreteOperator& ap) {
            r.coercivity_probe = coercivity_probe(ap, build_quasimode(*ap.mesh, *b, r.k));
            record_line(r);
            progress(fmt::format("probe={:.6e}", *r.coercivity_probe));
        };
        res = k_sweep(b, ks, opt);
    } catch (const std::exception& e) {
        report(6, false, std::string("error: ") + e.what());
        return;
    }
    const Fit probe = fit_growth(ks, column(res, [](const SweepRecord& r) { return *r.coercivity_probe; }));
    const Fit inv = fit_growth(ks, column(res, [](const SweepRecord& r) { return 1.0 / r.sigma_min; }));
    report(6, probe.slope <= kProbeSlopeMax && inv.slope <= kCavityInverseMax,
           fmt::format("probe slope {:+.4f} (+/-{:.4f}) <= {}; 1/sigma_min slope {:+.4f} (+/-{:.4f}) <= {}; "
                       "probe {:.4f} at k={:.2f}, {:.4f} at k={:.2f}",
                       probe.slope, probe.half_width, kProbeSlopeMax, inv.slope, inv.half_width, kCavityInverseMax,
                       *res.records.front().coercivity_probe, ks.front(), *res.records.back().coercivity_probe,
                       ks.back()));
}

void criterion7() {
    guarded(7, [] {
        IdentitiesSpec spec;
        spec.fields = 20;
        spec.friedrichs_fields = 100;
        spec.flux_superpositions = 20;
        const auto rep = identity_suite(spec, 1);
        const double om = rep.min_order("morawetz"), ol = rep.min_order("morawetz_ludwig");
        const bool ok = rep.pass("morawetz") && rep.pass("morawetz_ludwig") && rep.pass("friedrichs") && rep.pass("flux");
        double worst_flux = -1e300, worst_ratio = 0.0;
        for (const auto& c : rep.cases) {
            if (c.test == "flux") worst_flux = std::max({worst_flux, c.a, c.b});
            if (c.test == "friedrichs" && c.b > 0.0) worst_ratio = std::max(worst_ratio, c.a / c.b);
        }
        report(7, ok && om >= kOrderMin && ol >= kOrderMin,
               fmt::format("min order morawetz {:.3f}, morawetz_ludwig {:.3f} (>= {}); friedrichs max lhs/rhs {:.4f}; "
                           "flux max {:.2e} (<= 1e-8); {} cases",
                           om, ol, kOrderMin, worst_ratio, worst_flux, rep.cases.size()));
    });
}

void criterion8() {
    guarded(8, [] {
        const double R0 = 1.0, R1 = 1.4;
        const auto p = build_cutoff(R0, R1, 0.5 * epsilon0(R0, R1));
        const auto check = verify_profile(p, kProfileSamples);
        const double c = c_chi(p);
        const double q = q_param(c);
        const auto mc = threshold_constants(p, q);
        const Boundary sq = make_two_squares(1.0, 0.5);
        const auto cls = classify_strongly_R0R1(sq, kBoundarySamples);
        if (!cls) throw NumericalFailure("two_squares not classified strongly (R0,R1)");
        const auto radii = concrete_radii(*cls, r_gamma(sq));
        const auto ps = build_cutoff(radii.R0, radii.R1, 0.5 * epsilon0(radii.R0, radii.R1));
        const double zn = min_z_dot_n(ps, sq, kBoundarySamples);
        const bool ok = check.ok && c < 4.0 && q > 0.0 && std::isfinite(mc.k_threshold) && zn >= kZdotNMin;
        std::string fails;
        for (const auto& f : check.failures) fails += " " + f;
        report(8, ok,
               fmt::format("profile {}{}; c_chi {:.10f} < 4; q {:.10f} > 0; k_threshold {:.4e}; two_squares R0={:.6f} "
                           "R1={:.6f} min Z.n {:.3e} >= {:.0e}",
                           check.ok ? "ok" : "FAILED", fails, c, q, mc.k_threshold, radii.R0, radii.R1, zn, kZdotNMin));
    });
}

void criterion10() {
    guarded(10, [] {
        const double k = 40.0;
        std::string d;
        bool ok = true;
        auto compare = [&](const std::shared_ptr<const Boundary>& b, int depth, double tol) {
            const auto a = operator_extremes(assemble_combined(OperatorKind::Ap, k, k, build_mesh(b, k, 30.0, depth)));
            const auto m60 = build_mesh(b, k, 60.0, depth);
            const auto c = operator_extremes(assemble_combined(OperatorKind::Ap, k, k, m60));
            const double dmax = rel(a.sigma_max, c.sigma_max), dmin = rel(a.sigma_min, c.sigma_min);
            ok = ok && dmax <= tol && dmin <= tol;
            d += fmt::format("{}: sigma_max {:.10f}/{:.10f} (rel {:.2e}), sigma_min {:.10f}/{:.10f} (rel {:.2e}), tol {:.0e}, "
                             "N60={}; ",
                             b->label(), a.sigma_max, c.sigma_max, dmax, a.sigma_min, c.sigma_min, dmin, tol, m60->size());
            progress(d);
        };
        compare(shared(make_circle(1.0)), 10, kCircleSelfTol);
        compare(shared(make_two_squares(1.0, 0.5)), 12, kSquaresSelfTol);
        report(10, ok, d);
    });
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion1();
    criteria2and3();
    criterion7();
    criterion8();
    criterion10();
    criteria4to5and9();
    criterion6();
    std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
    std::printf("\nSUMMARY (%.1f min)\n",
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0);
    int failed = 0;
    for (const auto& o : outcomes) {
        std::printf("CRITERION %d %s\n", o.id, o.pass ? "PASS" : "FAIL");
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria pass\n", static_cast<int>(outcomes.size()) - failed, outcomes.size());
    return failed == 0 ? 0 : 1;
}
