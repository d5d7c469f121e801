#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "helmlab/special_functions.hpp"

namespace helmlab {

struct Segment {
    Vec2 a, b;
};

/// c + (A cos th, B sin th), th running linearly from th0 to th1.
struct EllipticArc {
    Vec2 c;
    double A, B;
    double th0, th1;
};

class Arc {
public:
    explicit Arc(Segment s) : g_(s) {}
    explicit Arc(EllipticArc e) : g_(e) {}

    Vec2 point(double t) const;
    Vec2 d1(double t) const;
    Vec2 d2(double t) const;
    /// Outward normal for counterclockwise loops.
    Vec2 normal(double t) const;
    /// Signed curvature, positive where the loop is locally convex.
    double curvature(double t) const;
    double speed(double t) const { return d1(t).norm(); }
    double length() const;
    bool straight() const { return std::holds_alternative<Segment>(g_); }
    const std::variant<Segment, EllipticArc>& shape() const { return g_; }

private:
    std::variant<Segment, EllipticArc> g_;
};

/// Ratio of the quasimode bump half-width to the half-height of the facing overlap.
inline constexpr double kBumpFraction = 0.4;

/// Pair of facing flat segments {x1 = a1} and {x1 = a2}, a1 < a2, normals +e1 and -e1,
/// sharing the x2-interval [lo, hi].
struct FacingSegments {
    int arc1 = -1, arc2 = -1;
    double a1 = 0.0, a2 = 0.0;
    double lo = 0.0, hi = 0.0;
    /// True when the segment joining them lies in the exterior (parallel trapping).
    bool trapping = false;
    double gap() const { return a2 - a1; }
    double bump_center() const { return 0.5 * (lo + hi); }
    double bump_half_width() const { return kBumpFraction * 0.5 * (hi - lo); }
};

struct CornerParam {
    int arc;
    double t;  // 0 or 1
};

class Boundary {
public:
    Boundary(std::string label, std::vector<std::vector<Arc>> loops);

    const std::string& label() const { return label_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    int loop_of(int arc) const { return loop_of_[arc]; }
    int num_loops() const { return static_cast<int>(loop_start_.size()); }
    int loop_begin(int loop) const { return loop_start_[loop]; }
    int loop_size(int loop) const;
    bool corner_at_start(int arc) const { return corner_start_[arc]; }
    bool corner_at_end(int arc) const { return corner_end_[arc]; }
    std::vector<CornerParam> corner_params() const;
    bool has_corners() const;
    double total_length() const;

    const std::optional<FacingSegments>& facing() const { return facing_; }
    void set_facing(const FacingSegments& f) { facing_ = f; }

    /// Winding-number test against a fine polygonal approximation.
    bool inside(const Vec2& x) const;

private:
    std::string label_;
    std::vector<Arc> arcs_;
    std::vector<int> loop_of_;
    std::vector<int> loop_start_;
    std::vector<bool> corner_start_, corner_end_;
    std::optional<FacingSegments> facing_;
};

struct EllipticCavityParams {
    double semi_x = 0.25;
    double semi_y = 0.5;
    double half_angle_deg = 50.0;
    double thickness = 0.25;
};

struct UCavityParams {
    double left = -1.0, right = 5.0, bottom = -2.0, top = 2.0;
    double a1 = 0.0, a2 = 4.0;
    double wall_height = 1.0;
};

Boundary make_circle(double R, const Vec2& center = Vec2::Zero());
Boundary make_polygon(std::vector<Vec2> vertices, const std::string& label = "polygon");
Boundary make_two_squares(double side, double gap);
Boundary make_two_discs(double radius, double gap);
Boundary make_elliptic_cavity(const EllipticCavityParams& p = {});
Boundary make_u_cavity(const UCavityParams& p = {});

/// Config-facing description of a geometry.
struct GeometrySpec {
    std::string type = "circle";  // circle | polygon | two_squares | two_discs | elliptic_cavity | u_cavity
    double radius = 1.0;
    Vec2 center = Vec2::Zero();
    double side = 1.0;
    double gap = 0.5;
    std::vector<Vec2> vertices;
    EllipticCavityParams ellipse;
    UCavityParams ucav;
};

Boundary make_geometry(const GeometrySpec& spec);

struct BoundarySample {
    Vec2 x, n;
    int arc;
    double t;
};

/// Points at midpoints of equal parameter cells, count split by arc length; never at arc ends.
std::vector<BoundarySample> sample_boundary(const Boundary& b, int count);

struct StronglyR0R1 {
    double R0;  // 0 when x.n >= 0 holds everywhere
    double R1;  // +inf when x2 n2 >= 0 holds everywhere
};

std::optional<StronglyR0R1> classify_strongly_R0R1(const Boundary& b, int samples);
std::optional<double> detect_parallel_trapping(const Boundary& b);
double r_gamma(const Boundary& b);

enum class TrappingLabel { star_shaped_ball, strongly_R0R1, R0R1, parallel_trapping, unclassified };

struct TrappingClass {
    TrappingLabel label = TrappingLabel::unclassified;
    std::optional<double> R0, R1, a;
};

TrappingClass classify_trapping(const Boundary& b, int samples = 10000);
std::string to_string(TrappingLabel l);

/// Concrete radii for multiplier constructions: R0 as classified (R_Gamma when any
/// positive value works), R1 as classified or ratio * R0 when unbounded.
StronglyR0R1 concrete_radii(const StronglyR0R1& feasible, double r_gamma, double ratio = 1.4);

}  // namespace helmlab
