#include "helmlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "helmlab/errors.hpp"
#include "helmlab/quadrature.hpp"

namespace helmlab {
namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const double d1 = cross(q2 - q1, p1 - q1);
    const double d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1);
    const double d4 = cross(p2 - p1, q2 - p1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    auto on_seg = [](const Vec2& a, const Vec2& b, const Vec2& p) {
        return std::abs(cross(b - a, p - a)) < 1e-14 * (1.0 + (b - a).squaredNorm()) &&
               std::min(a.x(), b.x()) - 1e-14 <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-14 &&
               std::min(a.y(), b.y()) - 1e-14 <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-14;
    };
    return on_seg(q1, q2, p1) || on_seg(q1, q2, p2) || on_seg(p1, p2, q1) || on_seg(p1, p2, q2);
}

std::vector<Vec2> polyline(const Arc& a, int n) {
    std::vector<Vec2> p(n + 1);
    for (int i = 0; i <= n; ++i) p[i] = a.point(static_cast<double>(i) / n);
    return p;
}

int polyline_resolution(const Arc& a) { return a.straight() ? 1 : 512; }

}  // namespace

Vec2 Arc::point(double t) const {
    if (const auto* s = std::get_if<Segment>(&g_)) return s->a + t * (s->b - s->a);
    const auto& e = std::get<EllipticArc>(g_);
    const double th = e.th0 + t * (e.th1 - e.th0);
    return e.c + Vec2(e.A * std::cos(th), e.B * std::sin(th));
}

Vec2 Arc::d1(double t) const {
    if (const auto* s = std::get_if<Segment>(&g_)) return s->b - s->a;
    const auto& e = std::get<EllipticArc>(g_);
    const double dth = e.th1 - e.th0;
    const double th = e.th0 + t * dth;
    return dth * Vec2(-e.A * std::sin(th), e.B * std::cos(th));
}

Vec2 Arc::d2(double t) const {
    if (std::holds_alternative<Segment>(g_)) return Vec2::Zero();
    const auto& e = std::get<EllipticArc>(g_);
    const double dth = e.th1 - e.th0;
    const double th = e.th0 + t * dth;
    return dth * dth * Vec2(-e.A * std::cos(th), -e.B * std::sin(th));
}

Vec2 Arc::normal(double t) const {
    const Vec2 d = d1(t);
    return Vec2(d.y(), -d.x()) / d.norm();
}

double Arc::curvature(double t) const {
    if (straight()) return 0.0;
    const Vec2 a = d1(t), b = d2(t);
    return cross(a, b) / std::pow(a.norm(), 3);
}

double Arc::length() const {
    if (const auto* s = std::get_if<Segment>(&g_)) return (s->b - s->a).norm();
    const GaussRule& g = gauss_legendre(32);
    const int pieces = 64;
    double L = 0.0;
    for (int p = 0; p < pieces; ++p) {
        for (int i = 0; i < 32; ++i) {
            const double t = (p + 0.5 * (g.nodes[i] + 1.0)) / pieces;
            L += 0.5 * g.weights[i] / pieces * speed(t);
        }
    }
    return L;
}

Boundary::Boundary(std::string label, std::vector<std::vector<Arc>> loops) : label_(std::move(label)) {
    if (loops.empty()) throw InvalidInput("boundary needs at least one loop");
    for (std::size_t l = 0; l < loops.size(); ++l) {
        const auto& loop = loops[l];
        if (loop.empty()) throw InvalidInput("empty loop");
        loop_start_.push_back(static_cast<int>(arcs_.size()));
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Arc& cur = loop[i];
            const Arc& nxt = loop[(i + 1) % loop.size()];
            const double scale = 1.0 + cur.point(1.0).norm();
            if ((cur.point(1.0) - nxt.point(0.0)).norm() > 1e-12 * scale) {
                throw InvalidInput("loop does not close");
            }
            for (double t : {0.0, 0.5, 1.0}) {
                if (!(cur.speed(t) > 0.0)) throw InvalidInput("degenerate arc parametrization");
            }
            arcs_.push_back(cur);
            loop_of_.push_back(static_cast<int>(l));
        }
    }
    const std::size_t n = arcs_.size();
    corner_start_.assign(n, false);
    corner_end_.assign(n, false);
    for (int l = 0; l < num_loops(); ++l) {
        const int b = loop_start_[l], m = loop_size(l);
        for (int i = 0; i < m; ++i) {
            const int cur = b + i, nxt = b + (i + 1) % m;
            const Vec2 t1 = arcs_[cur].d1(1.0).normalized();
            const Vec2 t2 = arcs_[nxt].d1(0.0).normalized();
            if (std::abs(cross(t1, t2)) > 1e-9 || t1.dot(t2) < 0.0) {
                corner_end_[cur] = true;
                corner_start_[nxt] = true;
            }
        }
    }
    // Loops must be disjoint: no polyline crossings between different loops.
    if (num_loops() > 1) {
        std::vector<std::vector<Vec2>> polys(num_loops());
        for (std::size_t i = 0; i < n; ++i) {
            auto p = polyline(arcs_[i], polyline_resolution(arcs_[i]) / 4 + 1);
            auto& dst = polys[loop_of_[i]];
            dst.insert(dst.end(), p.begin(), p.end() - 1);
        }
        for (int a = 0; a < num_loops(); ++a) {
            for (int c = a + 1; c < num_loops(); ++c) {
                const auto& P = polys[a];
                const auto& Q = polys[c];
                for (std::size_t i = 0; i < P.size(); ++i) {
                    for (std::size_t j = 0; j < Q.size(); ++j) {
                        if (segments_intersect(P[i], P[(i + 1) % P.size()], Q[j], Q[(j + 1) % Q.size()])) {
                            throw InvalidInput("boundary loops intersect");
                        }
                    }
                }
            }
        }
    }
}

int Boundary::loop_size(int loop) const {
    const int end = loop + 1 < num_loops() ? loop_start_[loop + 1] : static_cast<int>(arcs_.size());
    return end - loop_start_[loop];
}

std::vector<CornerParam> Boundary::corner_params() const {
    std::vector<CornerParam> c;
    for (int i = 0; i < static_cast<int>(arcs_.size()); ++i) {
        if (corner_start_[i]) c.push_back({i, 0.0});
        if (corner_end_[i]) c.push_back({i, 1.0});
    }
    return c;
}

bool Boundary::has_corners() const {
    return std::any_of(corner_start_.begin(), corner_start_.end(), [](bool v) { return v; });
}

double Boundary::total_length() const {
    double L = 0.0;
    for (const Arc& a : arcs_) L += a.length();
    return L;
}

bool Boundary::inside(const Vec2& x) const {
    double winding = 0.0;
    for (const Arc& a : arcs_) {
        const auto p = polyline(a, polyline_resolution(a));
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            const Vec2 u = p[i] - x, v = p[i + 1] - x;
            winding += std::atan2(cross(u, v), u.dot(v));
        }
    }
    return std::abs(winding) > kPi;
}

Boundary make_circle(double R, const Vec2& center) {
    if (!(R > 0.0)) throw InvalidInput("circle radius must be positive");
    return Boundary("circle", {{Arc(EllipticArc{center, R, R, 0.0, 2.0 * kPi})}});
}

Boundary make_polygon(std::vector<Vec2> v, const std::string& label) {
    const std::size_t n = v.size();
    if (n < 3) throw InvalidInput("polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i) {
        if ((v[(i + 1) % n] - v[i]).norm() <= 0.0) throw InvalidInput("polygon has a zero-length edge");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
                throw InvalidInput("polygon is self-intersecting");
            }
        }
    }
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) area2 += cross(v[i], v[(i + 1) % n]);
    if (area2 < 0.0) std::reverse(v.begin(), v.end());
    std::vector<Arc> loop;
    for (std::size_t i = 0; i < n; ++i) loop.emplace_back(Segment{v[i], v[(i + 1) % n]});
    return Boundary(label, {loop});
}

namespace {

std::vector<Arc> rectangle(double x0, double y0, double x1, double y1) {
    const Vec2 p0(x0, y0), p1(x1, y0), p2(x1, y1), p3(x0, y1);
    return {Arc(Segment{p0, p1}), Arc(Segment{p1, p2}), Arc(Segment{p2, p3}), Arc(Segment{p3, p0})};
}

}  // namespace

Boundary make_two_squares(double side, double gap) {
    if (!(side > 0.0) || !(gap > 0.0)) throw InvalidInput("two_squares: side and gap must be positive");
    const double s = side, g = gap;
    Boundary b("two_squares", {rectangle(0.0, 0.0, s, s), rectangle(s + g, -0.5 * s, 2.0 * s + g, 0.5 * s)});
    FacingSegments f;
    f.arc1 = 1;  // right side of the first square, normal +e1
    f.arc2 = 7;  // left side of the second square, normal -e1
    f.a1 = s;
    f.a2 = s + g;
    f.lo = 0.0;
    f.hi = 0.5 * s;
    f.trapping = true;
    b.set_facing(f);
    return b;
}

Boundary make_two_discs(double radius, double gap) {
    if (!(radius > 0.0) || !(gap > 0.0)) throw InvalidInput("two_discs: radius and gap must be positive");
    const double c = radius + 0.5 * gap;
    return Boundary("two_discs", {{Arc(EllipticArc{Vec2(-c, 0.0), radius, radius, 0.0, 2.0 * kPi})},
                                  {Arc(EllipticArc{Vec2(c, 0.0), radius, radius, 0.0, 2.0 * kPi})}});
}

Boundary make_elliptic_cavity(const EllipticCavityParams& p) {
    if (!(p.semi_x > 0.0) || !(p.semi_y > 0.0) || !(p.thickness > 0.0) || !(p.half_angle_deg > 0.0) ||
        !(p.half_angle_deg < 90.0)) {
        throw InvalidInput("elliptic_cavity: invalid parameters");
    }
    const double A = p.semi_x, B = p.semi_y, phi = p.half_angle_deg * kPi / 180.0, T = p.thickness;
    auto e = [&](double th) { return Vec2(A * std::cos(th), B * std::sin(th)); };
    // Left body: concave face is the arc around theta = pi, run downward in theta.
    const Vec2 lb = e(kPi + phi), lt = e(kPi - phi);
    std::vector<Arc> left{Arc(EllipticArc{Vec2::Zero(), A, B, kPi + phi, kPi - phi}),
                          Arc(Segment{lt, lt - Vec2(T, 0.0)}), Arc(Segment{lt - Vec2(T, 0.0), lb - Vec2(T, 0.0)}),
                          Arc(Segment{lb - Vec2(T, 0.0), lb})};
    const Vec2 rt = e(phi), rb = e(-phi);
    std::vector<Arc> right{Arc(EllipticArc{Vec2::Zero(), A, B, phi, -phi}),
                           Arc(Segment{rb, rb + Vec2(T, 0.0)}), Arc(Segment{rb + Vec2(T, 0.0), rt + Vec2(T, 0.0)}),
                           Arc(Segment{rt + Vec2(T, 0.0), rt})};
    return Boundary("elliptic_cavity", {left, right});
}

Boundary make_u_cavity(const UCavityParams& p) {
    const double h = p.wall_height;
    if (!(p.left < p.a1) || !(p.a1 < p.a2) || !(p.a2 < p.right) || !(p.bottom < p.top - h) || !(h > 0.0)) {
        throw InvalidInput("u_cavity: invalid parameters");
    }
    const double floor_y = p.top - h;
    const double mid = 0.5 * (p.a1 + p.a2);
    // Wedge floor peaking at the top level blocks every horizontal ray between the walls.
    std::vector<Vec2> v{{p.left, p.bottom}, {p.right, p.bottom}, {p.right, p.top}, {p.a2, p.top},
                        {p.a2, floor_y},     {mid, p.top},        {p.a1, floor_y}, {p.a1, p.top},
                        {p.left, p.top}};
    Boundary b = make_polygon(v, "u_cavity");
    FacingSegments f;
    f.arc1 = 6;  // (a1, floor) -> (a1, top), normal +e1
    f.arc2 = 3;  // (a2, top) -> (a2, floor), normal -e1
    f.a1 = p.a1;
    f.a2 = p.a2;
    f.lo = floor_y;
    f.hi = p.top;
    f.trapping = false;
    b.set_facing(f);
    return b;
}

Boundary make_geometry(const GeometrySpec& s) {
    if (s.type == "circle") return make_circle(s.radius, s.center);
    if (s.type == "polygon") return make_polygon(s.vertices);
    if (s.type == "two_squares") return make_two_squares(s.side, s.gap);
    if (s.type == "two_discs") return make_two_discs(s.radius, s.gap);
    if (s.type == "elliptic_cavity") return make_elliptic_cavity(s.ellipse);
    if (s.type == "u_cavity") return make_u_cavity(s.ucav);
    throw InvalidInput("unknown geometry type '" + s.type + "'");
}

std::vector<BoundarySample> sample_boundary(const Boundary& b, int count) {
    const auto& arcs = b.arcs();
    std::vector<double> len(arcs.size());
    double total = 0.0;
    for (std::size_t i = 0; i < arcs.size(); ++i) total += (len[i] = arcs[i].length());
    std::vector<BoundarySample> out;
    out.reserve(count + arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        const int m = std::max(1, static_cast<int>(std::lround(count * len[i] / total)));
        for (int j = 0; j < m; ++j) {
            const double t = (j + 0.5) / m;
            out.push_back({arcs[i].point(t), arcs[i].normal(t), static_cast<int>(i), t});
        }
    }
    return out;
}

std::optional<StronglyR0R1> classify_strongly_R0R1(const Boundary& b, int samples) {
    const double tol = 1e-10 * (1.0 + r_gamma(b));
    double R0 = 0.0;
    double R1 = std::numeric_limits<double>::infinity();
    for (const auto& s : sample_boundary(b, samples)) {
        const double r = s.x.norm();
        if (s.x.dot(s.n) < -tol) R0 = std::max(R0, r);
        if (s.x.y() * s.n.y() < -tol) R1 = std::min(R1, r);
    }
    if (!(R1 > std::exp(0.25) * R0)) return std::nullopt;
    return StronglyR0R1{R0, R1};
}

std::optional<double> detect_parallel_trapping(const Boundary& b) {
    if (b.facing() && b.facing()->trapping) return b.facing()->gap();
    return std::nullopt;
}

double r_gamma(const Boundary& b) {
    double best = 0.0;
    for (const Arc& a : b.arcs()) {
        best = std::max({best, a.point(0.0).norm(), a.point(1.0).norm()});
        if (a.straight()) continue;  // |x| on a segment is maximal at an end
        const int n = 2048;
        int ibest = 0;
        double vbest = -1.0;
        for (int i = 0; i <= n; ++i) {
            const double v = a.point(static_cast<double>(i) / n).norm();
            if (v > vbest) vbest = v, ibest = i;
        }
        // Golden-section refinement on the bracketing cells.
        double lo = std::max(0.0, (ibest - 1.0) / n), hi = std::min(1.0, (ibest + 1.0) / n);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        for (int it = 0; it < 80; ++it) {
            if (a.point(c).norm() > a.point(d).norm()) hi = d;
            else lo = c;
            c = hi - gr * (hi - lo);
            d = lo + gr * (hi - lo);
        }
        best = std::max({best, vbest, a.point(0.5 * (lo + hi)).norm()});
    }
    return best;
}

TrappingClass classify_trapping(const Boundary& b, int samples) {
    TrappingClass c;
    const auto strong = classify_strongly_R0R1(b, samples);
    if (strong) {
        c.R0 = strong->R0;
        c.R1 = strong->R1;
    }
    if (auto a = detect_parallel_trapping(b)) {
        c.label = TrappingLabel::parallel_trapping;
        c.a = *a;
        return c;
    }
    if (b.num_loops() == 1) {
        double min_xn = std::numeric_limits<double>::infinity();
        for (const auto& s : sample_boundary(b, samples)) min_xn = std::min(min_xn, s.x.dot(s.n));
        if (min_xn > 1e-10 && b.inside(Vec2::Zero())) {
            c.label = TrappingLabel::star_shaped_ball;
            return c;
        }
    }
    c.label = strong ? TrappingLabel::strongly_R0R1 : TrappingLabel::unclassified;
    return c;
}

std::string to_string(TrappingLabel l) {
    switch (l) {
        case TrappingLabel::star_shaped_ball: return "star_shaped_ball";
        case TrappingLabel::strongly_R0R1: return "strongly_R0R1";
        case TrappingLabel::R0R1: return "R0R1";
        case TrappingLabel::parallel_trapping: return "parallel_trapping";
        case TrappingLabel::unclassified: return "unclassified";
    }
    return "unclassified";
}

StronglyR0R1 concrete_radii(const StronglyR0R1& feasible, double rg, double ratio) {
    StronglyR0R1 r;
    r.R0 = feasible.R0 > 0.0 ? feasible.R0 : rg;
    r.R1 = std::isinf(feasible.R1) ? ratio * r.R0 : feasible.R1;
    if (!(r.R1 > std::exp(0.25) * r.R0)) throw InvalidInput("concrete_radii: ratio must exceed e^{1/4}");
    return r;
}

}  // namespace helmlab
