#include "helmlab/morawetz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "helmlab/errors.hpp"

namespace helmlab {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kChebDegree = 48;
constexpr int kRadialScan = 2048;

double smoothstep(double t) { return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t); }
double smoothstep1(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }
double smoothstep2(double t) { return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }

double ramp_integral(const std::function<double(double)>& f, double a, double b) {
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 15, 1e-13);
}

// Local maximum of f near a grid maximum at x, with neighbours at x -/+ dx.
std::pair<double, double> refine_max(const std::function<double(double)>& f, double lo, double hi) {
    auto [x, fx] = boost::math::tools::brent_find_minima([&](double t) { return -f(t); }, lo, hi, 52);
    return {x, -fx};
}

// Maximum of f over [a, b]: uniform scan then Brent refinement around every grid maximum.
double scan_max(const std::function<double(double)>& f, double a, double b, int n) {
    std::vector<double> v(n + 1);
    for (int i = 0; i <= n; ++i) v[i] = f(a + (b - a) * i / n);
    double best = *std::max_element(v.begin(), v.end());
    for (int i = 1; i < n; ++i) {
        if (v[i] >= v[i - 1] && v[i] >= v[i + 1]) {
            best = std::max(best, refine_max(f, a + (b - a) * (i - 1) / n, a + (b - a) * (i + 1) / n).second);
        }
    }
    return best;
}

}  // namespace

double epsilon0(double R0, double R1) {
    const double e = std::exp(0.25);
    if (!(R0 > 0.0) || !(R1 >= e * R0)) {
        throw InvalidInput(fmt::format("epsilon0: infeasible radii R0={}, R1={} (need R1 >= e^(1/4) R0)", R0, R1));
    }
    return (R1 - R0 * e) / (e + 1.0);
}

ChebyshevInterpolant::ChebyshevInterpolant(double a, double b, const std::function<double(double)>& f, int degree)
    : a_(a), b_(b), nodes_(degree + 1), values_(degree + 1) {
    for (int j = 0; j <= degree; ++j) {
        nodes_[j] = std::cos(kPi * j / degree);
        values_[j] = f(0.5 * (a + b) + 0.5 * (b - a) * nodes_[j]);
    }
}

double ChebyshevInterpolant::operator()(double x) const {
    const double t = (2.0 * x - a_ - b_) / (b_ - a_);
    const int n = static_cast<int>(nodes_.size()) - 1;
    double num = 0.0, den = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double d = t - nodes_[j];
        if (d == 0.0) return values_[j];
        double w = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == n) w *= 0.5;
        num += w / d * values_[j];
        den += w / d;
    }
    return num / den;
}

CutoffProfile::CutoffProfile(double R0, double R1, double eps) : R0_(R0), R1_(R1), eps_(eps) {
    const double e0 = epsilon0(R0, R1);
    if (!(eps > 0.0) || !(eps <= e0)) {
        throw InvalidInput(fmt::format("build_cutoff: eps={} outside (0, eps0={}]", eps, e0));
    }
    const double a = R0 + eps, b = R1 - eps;
    auto integrand = [this](double s) { return bump(s)[0] / s; };
    // On the first ramp the integral behaves like t^4, so A/t^4 is interpolated to keep chi relatively accurate near R0.
    lo_ = ChebyshevInterpolant(
        R0, a,
        [&](double r) {
            const double t = (r - R0) / eps;
            if (t == 0.0) return 2.5 * eps / R0;
            return ramp_integral(integrand, R0, r) / (t * t * t * t);
        },
        kChebDegree);
    hi_ = ChebyshevInterpolant(b, R1, [&](double r) { return ramp_integral(integrand, b, r); }, kChebDegree);
    A1_ = ramp_integral(integrand, R0, a);
    A2_ = A1_ + std::log(b / a);
    I_ = A2_ + ramp_integral(integrand, b, R1);
}

std::array<double, 3> CutoffProfile::bump(double r) const {
    if (r <= R0_ || r >= R1_) return {0.0, 0.0, 0.0};
    if (r < R0_ + eps_) {
        const double t = (r - R0_) / eps_;
        return {smoothstep(t), smoothstep1(t) / eps_, smoothstep2(t) / (eps_ * eps_)};
    }
    if (r > R1_ - eps_) {
        const double t = (R1_ - r) / eps_;
        return {smoothstep(t), -smoothstep1(t) / eps_, smoothstep2(t) / (eps_ * eps_)};
    }
    return {1.0, 0.0, 0.0};
}

double CutoffProfile::unnormalized(double r) const {
    if (r < R0_ + eps_) {
        const double t = (r - R0_) / eps_;
        return t * t * t * t * lo_(r);
    }
    if (r <= R1_ - eps_) return A1_ + std::log(r / (R0_ + eps_));
    return A2_ + hi_(r);
}

double CutoffProfile::chi(double r) const {
    if (r <= R0_) return 0.0;
    if (r >= R1_) return 1.0;
    return std::clamp(unnormalized(r) / I_, 0.0, 1.0);
}

CutoffProfile::Derivatives CutoffProfile::derivatives(double r) const {
    if (r <= R0_) return {0.0, 0.0, 0.0, 0.0};
    if (r >= R1_) return {1.0, 0.0, 0.0, 0.0};
    const auto [p, p1, p2] = bump(r);
    return {chi(r), p / (r * I_), (p1 / r - p / (r * r)) / I_,
            (p2 / r - 2.0 * p1 / (r * r) + 2.0 * p / (r * r * r)) / I_};
}

CutoffProfile build_cutoff(double R0, double R1, double eps) { return CutoffProfile(R0, R1, eps); }

ProfileCheck verify_profile(const CutoffProfile& p, int samples) {
    ProfileCheck c;
    const double R0 = p.R0(), R1 = p.R1();
    c.min_r_chi1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double r = 2.0 * R1 * (i + 0.5) / samples;
        const auto d = p.derivatives(r);
        const double rc = r * d.c1;
        c.max_r_chi1 = std::max(c.max_r_chi1, rc);
        c.min_r_chi1 = std::min(c.min_r_chi1, rc);
        if (r <= R0 && d.c0 != 0.0) c.failures.push_back(fmt::format("chi({}) != 0", r));
        if (r >= R1 && d.c0 != 1.0) c.failures.push_back(fmt::format("chi({}) != 1", r));
        if (r > R0 && r < R1) {
            c.min_interior_chi = std::min(c.min_interior_chi, d.c0);
            c.max_interior_chi = std::max(c.max_interior_chi, d.c0);
            if (!(d.c0 > 0.0 && d.c0 < 1.0)) c.failures.push_back(fmt::format("chi({}) = {} not in (0,1)", r, d.c0));
        }
    }
    if (p.chi(R0) != 0.0 || p.chi(R1) != 1.0) c.failures.push_back("endpoint values");
    if (c.min_r_chi1 < 0.0) c.failures.push_back("r chi' negative");
    if (!(c.max_r_chi1 < 4.0)) c.failures.push_back("sup r chi' >= 4");
    const double tiny = 1e-9 * p.eps();
    for (double r : {R0, R1}) {
        const auto in = p.derivatives(r - tiny), out = p.derivatives(r + tiny);
        c.max_jump = std::max({c.max_jump, std::abs(in.c2 - out.c2), std::abs(in.c3 - out.c3) * tiny});
    }
    if (c.max_jump > 1e-8) c.failures.push_back("C3 matching at R0/R1");
    c.ok = c.failures.empty();
    return c;
}

double c_chi(const CutoffProfile& p) {
    auto f = [&](double r) { return r * p.derivatives(r).c1; };
    return scan_max(f, p.R0(), p.R1(), 4096);
}

double q_param(double c) {
    if (!(c >= 0.0 && c < 4.0)) throw InvalidInput(fmt::format("q_param: c_chi={} outside [0,4)", c));
    return (4.0 - c) / 8.0;
}

Vec2 vector_field_Z(const CutoffProfile& p, const Vec2& x) {
    const double c = p.chi(x.norm());
    return Vec2(x.x() * c, x.y());
}

Eigen::Matrix2d vector_field_dZ(const CutoffProfile& p, const Vec2& x) {
    const double r = x.norm();
    const auto d = p.derivatives(r);
    Eigen::Matrix2d m = d.c0 * Eigen::Matrix2d::Identity();
    if (d.c1 != 0.0) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m(i, j) += x[j] * d.c1 * x[i] / r;
        for (int i = 0; i < 2; ++i) m(i, 1) -= x.y() * d.c1 * x[i] / r;
    }
    m(1, 1) += 1.0 - d.c0;
    return m;
}

AlphaValues alpha_and_laplacian(const CutoffProfile& p, double q, const Vec2& x) {
    const double r = x.norm();
    const auto d = p.derivatives(r);
    AlphaValues a{0.5 * (1.0 + (1.0 - q) * d.c0), Vec2::Zero(), 0.0};
    if (d.c1 == 0.0 && d.c2 == 0.0 && d.c3 == 0.0) return a;
    const double x1 = x.x(), x2 = x.y();
    const double g = x1 * x1 / r;
    a.alpha += 0.5 * d.c1 * g;
    const Vec2 xh = x / r;
    const Vec2 grad_g(2.0 * x1 / r - x1 * x1 * x1 / (r * r * r), -x1 * x1 * x2 / (r * r * r));
    a.grad = 0.5 * ((1.0 - q) * d.c1 * xh + d.c2 * g * xh + d.c1 * grad_g);
    const double s = x2 * x2 / (r * r);
    a.laplacian = 0.5 * (d.c1 * (-q / r + 3.0 * s / r) + d.c2 * (4.0 - q - 3.0 * s) + d.c3 * r * (1.0 - s));
    return a;
}

double laplacian_alpha_angular_max(const CutoffProfile& p, double q, double r) {
    if (r <= 0.0) return 0.0;
    const auto d = p.derivatives(r);
    const double s0 = 0.5 * (d.c1 * (-q / r) + d.c2 * (4.0 - q) + d.c3 * r);
    const double s1 = 0.5 * (d.c1 * (2.0 - q) / r + d.c2 * (1.0 - q));
    return std::max(s0, s1);
}

double m_alpha(const CutoffProfile& p, double q, double r) {
    if (r <= p.R0()) return 0.0;
    const double top = std::min(r, p.R1());
    const int n = std::max(16, static_cast<int>(kRadialScan * (top - p.R0()) / (p.R1() - p.R0())));
    return std::max(0.0, scan_max([&](double s) { return laplacian_alpha_angular_max(p, q, s); }, p.R0(), top, n));
}

double MultiplierConstants::resolvent_constant(double k, double R) const {
    return 2.0 * q * q * R0 * R0 / 81.0 + 128.0 * R0 * R0 * (k * k * R * R + alpha_inf * alpha_inf) + 4.0 * R * R +
           R1 * R1;
}

MultiplierConstants threshold_constants(const CutoffProfile& p) { return threshold_constants(p, q_param(c_chi(p))); }

MultiplierConstants threshold_constants(const CutoffProfile& p, double q) {
    MultiplierConstants c;
    c.R0 = p.R0();
    c.R1 = p.R1();
    c.c_chi = c_chi(p);
    c.q = q;
    const double a = p.R0(), b = p.R1();
    auto f = [&](double r) { return laplacian_alpha_angular_max(p, q, r); };

    std::vector<double> v(kRadialScan + 1);
    for (int i = 0; i <= kRadialScan; ++i) v[i] = f(a + (b - a) * i / kRadialScan);
    const double bound = q / (128.0 * a * a);

    // Running maximum over [R0, r] crosses the bound either at a grid value or inside a refined peak.
    double M = std::max(0.0, *std::max_element(v.begin(), v.end()));
    double cross_lo = b, cross_hi = b;
    bool crossed = false;
    for (int i = 1; i <= kRadialScan && !crossed; ++i) {
        const double r_prev = a + (b - a) * (i - 1) / kRadialScan, r_i = a + (b - a) * i / kRadialScan;
        if (v[i] > bound) {
            cross_lo = r_prev, cross_hi = r_i, crossed = true;
        } else if (i < kRadialScan && v[i] >= v[i - 1] && v[i] >= v[i + 1]) {
            const auto [xm, fm] = refine_max(f, r_prev, a + (b - a) * (i + 1) / kRadialScan);
            if (fm > bound) cross_lo = r_prev, cross_hi = xm, crossed = true;
        }
    }
    for (int i = 1; i < kRadialScan; ++i) {
        if (v[i] >= v[i - 1] && v[i] >= v[i + 1]) {
            M = std::max(M, refine_max(f, a + (b - a) * (i - 1) / kRadialScan, a + (b - a) * (i + 1) / kRadialScan).second);
        }
    }
    c.M_alpha = M;
    if (crossed) {
        auto g = [&](double r) { return f(r) - bound; };
        boost::math::tools::eps_tolerance<double> tol(50);
        std::uintmax_t it = 200;
        const auto [lo, hi] = boost::math::tools::bisect(g, cross_lo, cross_hi, tol, it);
        c.R_star = lo;
    } else {
        c.R_star = b;
    }
    c.chi_R_star = p.chi(c.R_star);
    if (!(c.R_star > a) || !(c.chi_R_star > 0.0)) {
        throw NumericalFailure(fmt::format(
            "threshold_constants: no feasible R* in (R0,R1) = ({}, {}); try a smaller eps or a larger R1/R0", a, b));
    }
    c.chi_2R0 = p.chi(2.0 * a);
    c.alpha_inf = 0.5 * scan_max(
                            [&](double r) {
                                const auto d = p.derivatives(r);
                                return 1.0 + (1.0 - q) * d.c0 + r * d.c1;
                            },
                            a, b, kRadialScan);
    c.alpha_inf = std::max(c.alpha_inf, 0.5 * (2.0 - q));
    const double t1 = 4.0 * c.M_alpha / (q * c.chi_R_star);
    const double t2 = 9.0 / (4.0 * a * a * c.chi_2R0);
    c.k_threshold = std::sqrt(std::max(t1, t2));
    return c;
}

double min_z_dot_n(const CutoffProfile& p, const Boundary& b, int samples) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : sample_boundary(b, samples)) m = std::min(m, vector_field_Z(p, s.x).dot(s.n));
    return m;
}

TestField plane_wave_field(double k, const Vec2& direction) {
    return plane_wave_superposition(k, {direction}, {cplx(1.0, 0.0)});
}

TestField plane_wave_superposition(double k, std::vector<Vec2> directions, std::vector<cplx> amplitudes) {
    if (directions.size() != amplitudes.size()) throw InvalidInput("plane_wave_superposition: size mismatch");
    for (Vec2& d : directions) d.normalize();
    TestField f;
    f.value = [k, directions, amplitudes](const Vec2& x) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < directions.size(); ++j) s += amplitudes[j] * std::exp(cplx(0.0, k * x.dot(directions[j])));
        return s;
    };
    f.grad = [k, directions, amplitudes](const Vec2& x) {
        Eigen::Vector2cd g = Eigen::Vector2cd::Zero();
        for (std::size_t j = 0; j < directions.size(); ++j) {
            const cplx e = cplx(0.0, k) * amplitudes[j] * std::exp(cplx(0.0, k * x.dot(directions[j])));
            g += Eigen::Vector2cd(e * directions[j].x(), e * directions[j].y());
        }
        return g;
    };
    const auto value = f.value;
    f.laplacian = [k, value](const Vec2& x) { return -k * k * value(x); };
    return f;
}

TestField point_source_field(double k, std::vector<Vec2> sources, std::vector<cplx> amplitudes) {
    if (sources.size() != amplitudes.size()) throw InvalidInput("point_source_field: size mismatch");
    auto val = [k, sources, amplitudes](const Vec2& x) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < sources.size(); ++j) s += amplitudes[j] * fundamental_solution(k, x, sources[j]);
        return s;
    };
    TestField f;
    f.value = val;
    f.grad = [k, sources, amplitudes](const Vec2& x) {
        Eigen::Vector2cd g = Eigen::Vector2cd::Zero();
        for (std::size_t j = 0; j < sources.size(); ++j) {
            const Vec2 d = x - sources[j];
            const double r = d.norm();
            const cplx h1 = hankel1(1, k * r);
            const cplx c = amplitudes[j] * cplx(0.0, -0.25 * k) * h1 / r;
            g[0] += c * d.x();
            g[1] += c * d.y();
        }
        return g;
    };
    f.laplacian = [k, val](const Vec2& x) { return -k * k * val(x); };
    return f;
}

TestField cubic_field(const std::array<cplx, 10>& c) {
    TestField f;
    f.value = [c](const Vec2& p) {
        const double x = p.x(), y = p.y();
        return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y + c[6] * x * x * x +
               c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y;
    };
    f.grad = [c](const Vec2& p) {
        const double x = p.x(), y = p.y();
        return Eigen::Vector2cd(c[1] + 2.0 * c[3] * x + c[4] * y + 3.0 * c[6] * x * x + 2.0 * c[7] * x * y + c[8] * y * y,
                                c[2] + c[4] * x + 2.0 * c[5] * y + c[7] * x * x + 2.0 * c[8] * x * y + 3.0 * c[9] * y * y);
    };
    f.laplacian = [c](const Vec2& p) {
        const double x = p.x(), y = p.y();
        return 2.0 * c[3] + 2.0 * c[5] + 6.0 * c[6] * x + 2.0 * c[7] * y + 2.0 * c[8] * x + 6.0 * c[9] * y;
    };
    return f;
}

Multiplier profile_multiplier(const CutoffProfile& p, double q, double beta) {
    Multiplier m;
    m.Z = [p](const Vec2& x) { return vector_field_Z(p, x); };
    m.dZ = [p](const Vec2& x) { return vector_field_dZ(p, x); };
    m.alpha = [p, q](const Vec2& x) { return alpha_and_laplacian(p, q, x); };
    m.beta = beta;
    return m;
}

Multiplier radial_multiplier(double alpha, double beta) {
    Multiplier m;
    m.Z = [](const Vec2& x) { return x; };
    m.dZ = [](const Vec2&) { return Eigen::Matrix2d::Identity().eval(); };
    m.alpha = [alpha](const Vec2&) { return AlphaValues{alpha, Vec2::Zero(), 0.0}; };
    m.beta = beta;
    return m;
}

namespace {

double re(cplx z) { return z.real(); }

double grad_sq(const Eigen::Vector2cd& g) { return std::norm(g[0]) + std::norm(g[1]); }

template <class Flux>
double central_divergence(const Flux& F, const Vec2& x, double h) {
    const Vec2 ex(h, 0.0), ey(0.0, h);
    return (F(x + ex)[0] - F(x - ex)[0] + F(x + ey)[1] - F(x - ey)[1]) / (2.0 * h);
}

}  // namespace

double morawetz_residual(const TestField& v, const Multiplier& m, double k, const Vec2& x, double h) {
    auto zv = [&](const Vec2& y, cplx u, const Eigen::Vector2cd& g) {
        const Vec2 Z = m.Z(y);
        return Z.x() * g[0] + Z.y() * g[1] - cplx(0.0, k * m.beta) * u + m.alpha(y).alpha * u;
    };
    auto flux = [&](const Vec2& y) {
        const cplx u = v.value(y);
        const Eigen::Vector2cd g = v.grad(y);
        const cplx cz = std::conj(zv(y, u, g));
        const double lag = k * k * std::norm(u) - grad_sq(g);
        const Vec2 Z = m.Z(y), ga = m.alpha(y).grad;
        return Vec2(2.0 * re(cz * g[0]) + lag * Z.x() - ga.x() * std::norm(u),
                    2.0 * re(cz * g[1]) + lag * Z.y() - ga.y() * std::norm(u));
    };
    const cplx u = v.value(x);
    const Eigen::Vector2cd g = v.grad(x);
    const cplx Lu = v.laplacian(x) + k * k * u;
    const double lhs = 2.0 * re(std::conj(zv(x, u, g)) * Lu);
    const Eigen::Matrix2d dZ = m.dZ(x);
    const AlphaValues a = m.alpha(x);
    double quad = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) quad += dZ(i, j) * re(g[i] * std::conj(g[j]));
    const double lag = k * k * std::norm(u) - grad_sq(g);
    const double rhs = central_divergence(flux, x, h) + (2.0 * a.alpha - dZ.trace()) * lag - 2.0 * quad +
                       a.laplacian * std::norm(u);
    return std::abs(lhs - rhs);
}

double morawetz_ludwig_P(const TestField& v, double alpha, double k, const Vec2& x) {
    const double r = x.norm();
    const cplx u = v.value(x);
    const Eigen::Vector2cd g = v.grad(x);
    const cplx ur = (x.x() * g[0] + x.y() * g[1]) / r;
    const cplx Mv = r * ur - cplx(0.0, k * r) * u + alpha * u;
    const cplx Lu = v.laplacian(x) + k * k * u;
    const double lag = k * k * std::norm(u) - grad_sq(g);
    return 2.0 * re(std::conj(Mv) * Lu) - (2.0 * alpha - 1.0) * lag + (grad_sq(g) - std::norm(ur)) +
           std::norm(ur - cplx(0.0, k) * u);
}

double morawetz_ludwig_residual(const TestField& v, double alpha, double k, const Vec2& x, double h) {
    auto flux = [&](const Vec2& y) {
        const double r = y.norm();
        const cplx u = v.value(y);
        const Eigen::Vector2cd g = v.grad(y);
        const cplx Mv = y.x() * g[0] + y.y() * g[1] - cplx(0.0, k * r) * u + alpha * u;
        const double lag = k * k * std::norm(u) - grad_sq(g);
        return Vec2(2.0 * re(std::conj(Mv) * g[0]) + lag * y.x(), 2.0 * re(std::conj(Mv) * g[1]) + lag * y.y());
    };
    return std::abs(central_divergence(flux, x, h) - morawetz_ludwig_P(v, alpha, k, x));
}

GriddedField sample_field(const std::function<cplx(const Vec2&)>& f, double R, int cells_across_2R) {
    GriddedField g;
    g.h = 4.0 * R / cells_across_2R;
    const double half = std::sqrt(13.0) * R + g.h;
    const int n = 2 * static_cast<int>(std::ceil(half / g.h)) + 1;
    g.nx = g.ny = n;
    g.x0 = g.y0 = -g.h * (n - 1) / 2;
    g.values.resize(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g.values[static_cast<std::size_t>(j) * n + i] = f(Vec2(g.x0 + i * g.h, g.y0 + j * g.h));
    return g;
}

FriedrichsSides friedrichs_check(const GriddedField& v, double R) {
    if (!(R > 0.0)) throw InvalidInput("friedrichs_check: R must be positive");
    if (4.0 * R / v.h < 64.0) throw InvalidInput("friedrichs_check: grid too coarse (fewer than 64 cells across B_2R)");
    const double outer = std::sqrt(13.0) * R;
    if (v.x0 > -outer || v.y0 > -outer || v.x0 + (v.nx - 1) * v.h < outer || v.y0 + (v.ny - 1) * v.h < outer) {
        throw InvalidInput("friedrichs_check: grid does not cover B_{sqrt(13) R}");
    }
    FriedrichsSides s;
    double ring = 0.0, dy = 0.0;
    const double cell = v.h * v.h;
    for (int j = 0; j < v.ny; ++j) {
        for (int i = 0; i < v.nx; ++i) {
            const double r = std::hypot(v.x0 + i * v.h, v.y0 + j * v.h);
            if (r >= outer) continue;
            const double a2 = std::norm(v.at(i, j));
            if (r < 2.0 * R) s.lhs += a2 * cell;
            else ring += a2 * cell;
            cplx d;
            if (j == 0) d = (v.at(i, 1) - v.at(i, 0)) / v.h;
            else if (j == v.ny - 1) d = (v.at(i, j) - v.at(i, j - 1)) / v.h;
            else d = (v.at(i, j + 1) - v.at(i, j - 1)) / (2.0 * v.h);
            dy += std::norm(d) * cell;
        }
    }
    s.rhs = 8.0 * ring + 4.0 * R * R * dy;
    return s;
}

FluxCheck radiating_flux_check(double k, const std::vector<Vec2>& sources, const std::vector<cplx>& amplitudes,
                               double R) {
    for (const Vec2& y : sources) {
        if (!(y.norm() < 0.5 * R)) throw InvalidInput("radiating_flux_check: source outside B_{R/2}");
    }
    const TestField u = point_source_field(k, sources, amplitudes);
    const int n = 2 * static_cast<int>(std::ceil(k * R)) + 256;
    double re_f = 0.0, im_f = 0.0, energy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * i / n;
        const Vec2 e(std::cos(th), std::sin(th));
        const cplx val = u.value(R * e);
        const Eigen::Vector2cd g = u.grad(R * e);
        const cplx ur = g[0] * e.x() + g[1] * e.y();
        const double surf = grad_sq(g) - std::norm(ur);
        const cplx p = std::conj(val) * ur;
        re_f += p.real();
        im_f += p.imag();
        energy += std::norm(ur) - surf + k * k * std::norm(val);
    }
    const double ds = 2.0 * kPi * R / n;
    FluxCheck c;
    c.re_flux = re_f * ds;
    c.im_flux = im_f * ds;
    c.lhs_21 = R * energy * ds - 2.0 * k * R * c.im_flux + c.re_flux;
    return c;
}

}  // namespace helmlab
