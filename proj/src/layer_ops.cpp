#include "helmlab/layer_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>

#include "helmlab/errors.hpp"
#include "helmlab/quadrature.hpp"

namespace helmlab {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxNearDepth = 60;
// A panel counts as near when the target is within this many panel lengths of its center.
constexpr double kNearFactor = 1.2;

double panel_arclength(const Arc& a, double t0, double t1) {
    if (a.straight()) return a.speed(0.0) * (t1 - t0);
    const GaussRule& g = gauss_legendre(kPanelOrder);
    double L = 0.0;
    for (int i = 0; i < kPanelOrder; ++i) {
        L += g.weights[i] * a.speed(t0 + 0.5 * (g.nodes[i] + 1.0) * (t1 - t0));
    }
    return 0.5 * (t1 - t0) * L;
}

std::vector<double> arc_breakpoints(const Arc& a, double L, double k, double ppw, int depth, bool c0,
                                    bool c1) {
    int n = static_cast<int>(std::ceil(ppw * k * L / (kTwoPi * kPanelOrder)));
    n = std::max(n, a.straight() ? 1 : 4);
    if (c0 && c1) n = std::max(n, 2);
    for (;;) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            worst = std::max(worst, panel_arclength(a, static_cast<double>(i) / n, static_cast<double>(i + 1) / n));
        }
        if (k * worst <= kMaxPanelKh) break;
        n = std::max(n + 1, static_cast<int>(std::ceil(n * k * worst / kMaxPanelKh)));
    }
    // Dyadic breakpoints 2^-depth, ..., G from each corner (G the largest power of two <= 1/n), the
    // same for every ppw and k; uniform panels of length <= 1/n in between.
    const double h = 1.0 / n;
    const double G = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(h) + 1e-12)));
    std::vector<double> graded;
    if (c0 || c1) {
        for (double g = std::min(std::ldexp(1.0, -depth), G); g <= G * (1.0 + 1e-12); g *= 2.0) graded.push_back(g);
    }
    const double lo = c0 && !graded.empty() ? graded.back() : 0.0;
    const double hi = c1 && !graded.empty() ? 1.0 - graded.back() : 1.0;
    std::vector<double> bp{0.0};
    if (c0) bp.insert(bp.end(), graded.begin(), graded.end());
    const int m = std::max(0, static_cast<int>(std::ceil((hi - lo) / h - 1e-9)));
    for (int i = 1; i < m; ++i) bp.push_back(lo + (hi - lo) * i / m);
    if (c1) {
        for (auto it = graded.rbegin(); it != graded.rend(); ++it) {
            if (1.0 - *it > bp.back()) bp.push_back(1.0 - *it);
        }
    }
    if (bp.back() < 1.0) bp.push_back(1.0);
    return bp;
}

// Splits panels that meet the x2-interval [y0, y1] of a vertical segment into pieces of
// arclength <= h.
void refine_band(std::vector<double>& bp, const Arc& a, double y0, double y1, double h) {
    const double ya = a.point(0.0).y(), yb = a.point(1.0).y();
    const double L = a.length();
    std::vector<double> out{bp.front()};
    for (std::size_t q = 0; q + 1 < bp.size(); ++q) {
        const double t0 = bp[q], t1 = bp[q + 1];
        const double p0 = ya + t0 * (yb - ya), p1 = ya + t1 * (yb - ya);
        const int pieces = std::max(std::min(p0, p1), y0) < std::min(std::max(p0, p1), y1)
                               ? static_cast<int>(std::ceil((t1 - t0) * L / h - 1e-9))
                               : 1;
        for (int i = 1; i < pieces; ++i) out.push_back(t0 + (t1 - t0) * i / pieces);
        out.push_back(t1);
    }
    bp = std::move(out);
}

struct KernelOut {
    cplx s, dp;        // full kernels
    double sl, dpl;    // coefficients of log r
};

inline void eval_kernel(double k, const Vec2& x, const Vec2& nx, const Vec2& y, KernelOut& o) {
    const Vec2 diff = x - y;
    const double r = diff.norm();
    const BesselSet b = bessel01(k * r);
    const cplx h0(b.j0, b.y0), h1(b.j1, b.y1);
    const double px = nx.dot(diff) / r;
    const cplx ik4(0.0, 0.25 * k);
    o.s = cplx(0.0, 0.25) * h0;
    o.dp = -ik4 * h1 * px;
    o.sl = -b.j0 / kTwoPi;
    o.dpl = k * b.j1 * px / kTwoPi;
}

struct Want {
    bool S, Dp;
};

using PanelRow = std::array<cplx, kPanelOrder>;

struct RowWeights {
    PanelRow s{}, dp{};
};

void far_weights(double k, const Mesh& m, int i, const Panel& P, RowWeights& w) {
    KernelOut o;
    for (int j = 0; j < kPanelOrder; ++j) {
        const int c = P.first_node + j;
        eval_kernel(k, m.x[i], m.n[i], m.x[c], o);
        w.s[j] = o.s * m.weight[c];
        w.dp[j] = o.dp * m.weight[c];
    }
}

void near_weights(double k, const Mesh& m, int i, const Panel& P, RowWeights& w) {
    const Arc& arc = m.boundary->arcs()[P.arc];
    const GaussRule& g = gauss_legendre(kPanelOrder);
    w = RowWeights{};
    struct Interval {
        double a, b;
        int depth;
    };
    std::vector<Interval> stack{{-1.0, 1.0, 0}};
    const Vec2& x = m.x[i];
    KernelOut o;
    while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (iv.a + iv.b);
        const double half = 0.5 * (iv.b - iv.a);
        const Vec2 c = arc.point(P.t0 + 0.5 * (mid + 1.0) * (P.t1 - P.t0));
        const double len = P.length * half;
        if ((x - c).norm() < kNearFactor * len) {
            if (iv.depth >= kMaxNearDepth) {
                throw NumericalFailure("near-singular quadrature did not converge");
            }
            stack.push_back({iv.a, mid, iv.depth + 1});
            stack.push_back({mid, iv.b, iv.depth + 1});
            continue;
        }
        for (int q = 0; q < kPanelOrder; ++q) {
            const double sig = mid + half * g.nodes[q];
            const double t = P.t0 + 0.5 * (sig + 1.0) * (P.t1 - P.t0);
            const Vec2 y = arc.point(t);
            const double jac = arc.speed(t) * 0.5 * (P.t1 - P.t0);
            eval_kernel(k, x, m.n[i], y, o);
            const double wq = half * g.weights[q] * jac;
            const auto L = panel_lagrange(sig);
            for (int j = 0; j < kPanelOrder; ++j) {
                const double f = wq * L[j];
                w.s[j] += f * o.s;
                w.dp[j] += f * o.dp;
            }
        }
    }
}

void self_weights(double k, const Mesh& m, int i, const Panel& P, RowWeights& w) {
    const GaussRule& g = gauss_legendre(kPanelOrder);
    const PanelMatrix& W = panel_log_weights();
    const int li = i - P.first_node;
    KernelOut o;
    for (int j = 0; j < kPanelOrder; ++j) {
        const int c = P.first_node + j;
        cplx ss, sdp;
        double ls, ldp;
        if (j == li) {
            ls = -1.0 / kTwoPi;
            ldp = 0.0;
            ss = cplx(-(std::log(0.5 * k) + std::numbers::egamma + std::log(m.jac[i])) / kTwoPi, 0.25);
            sdp = -m.curvature[i] / (4.0 * kPi);
        } else {
            eval_kernel(k, m.x[i], m.n[i], m.x[c], o);
            const double lg = std::log(std::abs(g.nodes[li] - g.nodes[j]));
            ls = o.sl;
            ldp = o.dpl;
            ss = o.s - o.sl * lg;
            sdp = o.dp - o.dpl * lg;
        }
        const double wl = W[li][j] * m.jac[c];
        const double ws = g.weights[j] * m.jac[c];
        w.s[j] = wl * ls + ws * ss;
        w.dp[j] = wl * ldp + ws * sdp;
    }
}

void assemble_impl(double k, const Mesh& m, Want want, Eigen::MatrixXcd* S, Eigen::MatrixXcd* Dp) {
    const int N = m.size();
    if (!(k > 0.0)) throw InvalidInput("assemble: k must be positive");
    if (k * m.max_panel_length() > kMaxPanelKh * (1.0 + 1e-12)) {
        throw NumericalFailure("assemble: panel length * k exceeds " + std::to_string(kMaxPanelKh) +
                               "; rebuild the mesh for this k");
    }
    if (want.S) S->resize(N, N);
    if (want.Dp) Dp->resize(N, N);
    bool failed = false;
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < N; ++i) {
        try {
            RowWeights w;
            for (int p = 0; p < static_cast<int>(m.panels.size()); ++p) {
                const Panel& P = m.panels[p];
                if (p == m.panel_of[i]) self_weights(k, m, i, P, w);
                else if ((m.x[i] - P.center).norm() < kNearFactor * P.length) near_weights(k, m, i, P, w);
                else far_weights(k, m, i, P, w);
                for (int j = 0; j < kPanelOrder; ++j) {
                    const int c = P.first_node + j;
                    if (want.S) (*S)(i, c) = w.s[j];
                    if (want.Dp) (*Dp)(i, c) = w.dp[j];
                }
            }
        } catch (...) {
#pragma omp atomic write
            failed = true;
        }
    }
    if (failed) throw NumericalFailure("assemble: kernel quadrature failed");
}

// M_ij = (w_j / w_i) K_ji, so that the L2-scaled M is the transpose of the L2-scaled K.
Eigen::MatrixXcd weighted_transpose(const Mesh& m, const Eigen::MatrixXcd& K) {
    const int N = m.size();
    Eigen::MatrixXcd M(N, N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) M(i, j) = m.weight[j] / m.weight[i] * K(j, i);
    return M;
}

}  // namespace

double Mesh::max_panel_length() const {
    double v = 0.0;
    for (const Panel& p : panels) v = std::max(v, p.length);
    return v;
}

std::shared_ptr<const Mesh> build_mesh(std::shared_ptr<const Boundary> b, double k, double ppw, int corner_depth,
                                       int node_cap) {
    if (!b) throw InvalidInput("build_mesh: null boundary");
    if (!(k > 0.0)) throw InvalidInput("build_mesh: k must be positive");
    if (!(ppw >= 10.0)) throw InvalidInput("build_mesh: ppw must be at least 10");
    if (b->has_corners() && corner_depth < 6) throw InvalidInput("build_mesh: corner_depth must be at least 6");
    auto m = std::make_shared<Mesh>();
    m->boundary = b;
    m->ppw = ppw;
    m->k_design = k;
    m->corner_depth = corner_depth;
    const auto& arcs = b->arcs();
    std::vector<std::vector<double>> bps(arcs.size());
    std::size_t panels = 0;
    for (std::size_t a = 0; a < arcs.size(); ++a) {
        const double L = arcs[a].length();
        m->boundary_length += L;
        bps[a] = arc_breakpoints(arcs[a], L, k, ppw, corner_depth, b->corner_at_start(static_cast<int>(a)),
                                 b->corner_at_end(static_cast<int>(a)));
    }
    // The quasimode bump on facing segments gets panels of at most half its half-width, so
    // its L2 norm is resolved to about 1e-8 independently of ppw and k.
    if (const auto& f = b->facing()) {
        const double c = f->bump_center(), w = f->bump_half_width();
        for (int a : {f->arc1, f->arc2}) refine_band(bps[a], arcs[a], c - w, c + w, 0.5 * w);
    }
    for (const auto& bp : bps) panels += bp.size() - 1;
    const std::size_t n_nodes = panels * kPanelOrder;
    if (n_nodes > static_cast<std::size_t>(node_cap)) {
        throw InvalidInput("build_mesh: " + std::to_string(n_nodes) + " nodes exceed the cap of " +
                           std::to_string(node_cap) + "; reduce k, ppw or corner_depth");
    }
    const GaussRule& g = gauss_legendre(kPanelOrder);
    m->x.reserve(n_nodes);
    for (std::size_t a = 0; a < arcs.size(); ++a) {
        const Arc& arc = arcs[a];
        for (std::size_t q = 0; q + 1 < bps[a].size(); ++q) {
            Panel P;
            P.arc = static_cast<int>(a);
            P.t0 = bps[a][q];
            P.t1 = bps[a][q + 1];
            P.first_node = m->size();
            P.length = panel_arclength(arc, P.t0, P.t1);
            P.center = arc.point(0.5 * (P.t0 + P.t1));
            const int pid = static_cast<int>(m->panels.size());
            for (int j = 0; j < kPanelOrder; ++j) {
                const double t = P.t0 + 0.5 * (g.nodes[j] + 1.0) * (P.t1 - P.t0);
                const double jac = arc.speed(t) * 0.5 * (P.t1 - P.t0);
                m->x.push_back(arc.point(t));
                m->n.push_back(arc.normal(t));
                m->jac.push_back(jac);
                m->weight.push_back(g.weights[j] * jac);
                m->curvature.push_back(arc.curvature(t));
                m->panel_of.push_back(pid);
            }
            m->panels.push_back(P);
        }
    }
    return m;
}

std::string to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::S: return "S";
        case OperatorKind::D: return "D";
        case OperatorKind::Dp: return "Dp";
        case OperatorKind::A: return "A";
        case OperatorKind::Ap: return "Ap";
        case OperatorKind::custom: return "custom";
    }
    return "custom";
}

LayerSet assemble_layers(double k, std::shared_ptr<const Mesh> mesh, bool with_D) {
    LayerSet out;
    assemble_impl(k, *mesh, Want{true, true}, &out.S.m, &out.Dp.m);
    if (with_D) out.D.m = weighted_transpose(*mesh, out.Dp.m);
    for (auto [op, kind] : {std::pair{&out.S, OperatorKind::S}, std::pair{&out.Dp, OperatorKind::Dp},
                            std::pair{&out.D, OperatorKind::D}}) {
        op->mesh = mesh;
        op->kind = kind;
        op->k = k;
    }
    return out;
}

DiscreteOperator assemble(OperatorKind kind, double k, std::shared_ptr<const Mesh> mesh) {
    if (kind != OperatorKind::S && kind != OperatorKind::D && kind != OperatorKind::Dp) {
        throw InvalidInput("assemble: kind must be S, D or Dp");
    }
    DiscreteOperator op;
    op.mesh = mesh;
    op.kind = kind;
    op.k = k;
    assemble_impl(k, *mesh, Want{kind == OperatorKind::S, kind != OperatorKind::S}, &op.m, &op.m);
    if (kind == OperatorKind::D) op.m = weighted_transpose(*mesh, op.m);
    return op;
}

DiscreteOperator l2_scale(DiscreteOperator op) {
    if (op.l2_scaled) return op;
    const auto& w = op.mesh->weight;
    const int N = static_cast<int>(op.m.rows());
    for (int j = 0; j < N; ++j) {
        const double sj = std::sqrt(w[j]);
        for (int i = 0; i < N; ++i) op.m(i, j) *= std::sqrt(w[i]) / sj;
    }
    op.l2_scaled = true;
    return op;
}

DiscreteOperator combine(const DiscreteOperator& S, const DiscreteOperator& Dx, double eta) {
    if (eta == 0.0) throw InvalidInput("combined operator requires eta != 0");
    if (S.l2_scaled != Dx.l2_scaled) throw InvalidInput("combine: mixed scaling");
    DiscreteOperator op;
    op.mesh = S.mesh;
    op.k = S.k;
    op.eta = eta;
    op.kind = Dx.kind == OperatorKind::D ? OperatorKind::A : OperatorKind::Ap;
    op.m = Dx.m - cplx(0.0, eta) * S.m;
    op.m.diagonal().array() += 0.5;
    op.l2_scaled = S.l2_scaled;
    return l2_scale(std::move(op));
}

DiscreteOperator assemble_combined(OperatorKind variant, double k, double eta, std::shared_ptr<const Mesh> mesh) {
    if (variant != OperatorKind::A && variant != OperatorKind::Ap) {
        throw InvalidInput("assemble_combined: variant must be A or Ap");
    }
    if (eta == 0.0) throw InvalidInput("combined operator requires eta != 0");
    DiscreteOperator S, Dx;
    const bool adj = variant == OperatorKind::Ap;
    assemble_impl(k, *mesh, Want{true, true}, &S.m, &Dx.m);
    if (!adj) {
        // A is the discrete real adjoint of A': both layer blocks are weighted transposes.
        Dx.m = weighted_transpose(*mesh, Dx.m);
        S.m = weighted_transpose(*mesh, S.m);
    }
    S.mesh = Dx.mesh = mesh;
    S.k = Dx.k = k;
    S.kind = OperatorKind::S;
    Dx.kind = adj ? OperatorKind::Dp : OperatorKind::D;
    return combine(S, Dx, eta);
}

namespace {

// Products J_n H_n, J_n' H_n and J_n H_n' at z, n = 0..n_max.
struct CircleBessel {
    std::vector<cplx> jh, jph, jhp;
};

CircleBessel circle_bessel(double z, int n_max) {
    if (!(z > 0.0)) throw InvalidInput("circle eigenvalues: k and R must be positive");
    CircleBessel c{std::vector<cplx>(n_max + 1), std::vector<cplx>(n_max + 1), std::vector<cplx>(n_max + 1)};
    const auto J = bessel_j_orders(n_max + 1, z);
    // Forward recurrence for Y until it gets large; past that only products are formed.
    std::vector<double> Y{bessel01(z).y0, bessel01(z).y1};
    while (static_cast<int>(Y.size()) <= n_max + 1 && std::abs(Y.back()) < 1e150) {
        const int n = static_cast<int>(Y.size()) - 1;
        Y.push_back((2.0 * n / z) * Y[n] - Y[n - 1]);
    }
    const int direct = std::min(n_max, static_cast<int>(Y.size()) - 2);
    for (int n = 0; n <= direct; ++n) {
        const cplx h(J[n], Y[n]);
        // f_n' = f_{n-1} - (n/z) f_n, with f_{-1} = -f_1.
        const double jm = n == 0 ? -J[1] : J[n - 1];
        const double ym = n == 0 ? -Y[1] : Y[n - 1];
        const double jp = jm - n / z * J[n];
        c.jh[n] = J[n] * h;
        c.jph[n] = jp * h;
        c.jhp[n] = J[n] * cplx(jp, ym - n / z * Y[n]);
    }
    if (direct == n_max) return c;
    // Ratios rho_n = J_n/J_{n-1} (backward continued fraction) and sigma_n = Y_n/Y_{n-1}
    // (forward); the Wronskian J_{n+1}Y_n - J_nY_{n+1} = 2/(pi z) gives J_nY_n.
    const int top = n_max + 40 + static_cast<int>(2.0 * z);
    std::vector<double> rho(top + 2, 0.0);
    for (int m = top; m >= 1; --m) rho[m] = 1.0 / (2.0 * m / z - rho[m + 1]);
    double sigma = Y[direct + 1] / Y[direct];
    for (int n = direct + 1; n <= n_max; ++n) {
        const double sigma_next = 2.0 * n / z - 1.0 / sigma;  // Y_{n+1}/Y_n
        const double jy = 2.0 / (kPi * z * (rho[n + 1] - sigma_next));
        const double jj = J[n] * J[n];
        const double lj = 1.0 / rho[n] - n / z;  // J_n'/J_n
        const double ly = 1.0 / sigma - n / z;   // Y_n'/Y_n
        c.jh[n] = cplx(jj, jy);
        c.jph[n] = lj * c.jh[n];
        c.jhp[n] = cplx(lj * jj, ly * jy);
        sigma = sigma_next;
    }
    return c;
}

}  // namespace

std::vector<cplx> circle_symbols_S(double k, double R, int n_max) {
    const CircleBessel c = circle_bessel(k * R, n_max);
    std::vector<cplx> out(n_max + 1);
    for (int n = 0; n <= n_max; ++n) out[n] = cplx(0.0, 0.5 * kPi * R) * c.jh[n];
    return out;
}

std::vector<cplx> circle_symbols_Dp(double k, double R, int n_max) {
    const double z = k * R;
    const CircleBessel c = circle_bessel(z, n_max);
    std::vector<cplx> out(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        out[n] = cplx(0.0, 0.25 * kPi * z) * (c.jph[n] + c.jhp[n]);
    }
    return out;
}

std::vector<cplx> circle_eigenvalues(double k, double eta, double R, int n_max) {
    const double z = k * R;
    const CircleBessel c = circle_bessel(z, n_max);
    std::vector<cplx> out(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        out[n] = cplx(0.0, 0.5 * kPi * z) * c.jph[n] + 0.5 * kPi * eta * R * c.jh[n];
    }
    return out;
}

void write_matrix_dump(const DiscreteOperator& op, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open " + path + " for writing");
    const std::int64_t n = op.m.rows();
    const std::int32_t kind = static_cast<std::int32_t>(op.kind);
    f.write("HLMX", 4);
    f.write(reinterpret_cast<const char*>(&n), sizeof n);
    f.write(reinterpret_cast<const char*>(&op.k), sizeof op.k);
    f.write(reinterpret_cast<const char*>(&op.eta), sizeof op.eta);
    f.write(reinterpret_cast<const char*>(&kind), sizeof kind);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            const double v[2] = {op.m(i, j).real(), op.m(i, j).imag()};
            f.write(reinterpret_cast<const char*>(v), sizeof v);
        }
    }
}

DiscreteOperator read_matrix_dump(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    char magic[4];
    if (!f.read(magic, 4) || std::string(magic, 4) != "HLMX") throw InvalidInput("not a matrix dump: " + path);
    std::int64_t n;
    std::int32_t kind;
    DiscreteOperator op;
    f.read(reinterpret_cast<char*>(&n), sizeof n);
    f.read(reinterpret_cast<char*>(&op.k), sizeof op.k);
    f.read(reinterpret_cast<char*>(&op.eta), sizeof op.eta);
    f.read(reinterpret_cast<char*>(&kind), sizeof kind);
    op.kind = static_cast<OperatorKind>(kind);
    op.m.resize(n, n);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j < n; ++j) {
            double v[2];
            f.read(reinterpret_cast<char*>(v), sizeof v);
            op.m(i, j) = cplx(v[0], v[1]);
        }
    }
    if (!f) throw InvalidInput("truncated matrix dump: " + path);
    return op;
}

}  // namespace helmlab
