#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "helmlab/geometry.hpp"
#include "helmlab/special_functions.hpp"

namespace helmlab {

double epsilon0(double R0, double R1);

/// Barycentric interpolant on Chebyshev points of the second kind.
class ChebyshevInterpolant {
public:
    ChebyshevInterpolant() = default;
    ChebyshevInterpolant(double a, double b, const std::function<double(double)>& f, int degree);
    double operator()(double x) const;

private:
    double a_ = 0.0, b_ = 1.0;
    std::vector<double> nodes_, values_;
};

/// Radial cutoff chi: 0 for r <= R0, 1 for r >= R1, chi' = p(r)/(r I) in between.
class CutoffProfile {
public:
    struct Derivatives {
        double c0, c1, c2, c3;
    };

    CutoffProfile(double R0, double R1, double eps);

    double R0() const { return R0_; }
    double R1() const { return R1_; }
    double eps() const { return eps_; }
    /// Normalizing integral of p(s)/s over [R0, R1].
    double integral() const { return I_; }

    double chi(double r) const;
    Derivatives derivatives(double r) const;

    /// Bump p and its first two r-derivatives.
    std::array<double, 3> bump(double r) const;

private:
    double unnormalized(double r) const;

    double R0_, R1_, eps_;
    double A1_ = 0.0, A2_ = 0.0, I_ = 1.0;
    ChebyshevInterpolant lo_, hi_;
};

CutoffProfile build_cutoff(double R0, double R1, double eps);

struct ProfileCheck {
    bool ok = true;
    double max_r_chi1 = 0.0;      // sup r chi'
    double min_interior_chi = 1.0;
    double max_interior_chi = 0.0;
    double min_r_chi1 = 0.0;
    double max_jump = 0.0;        // one-sided chi'' and chi''' mismatch at R0, R1
    std::vector<std::string> failures;
};

ProfileCheck verify_profile(const CutoffProfile& p, int samples = 10000);

double c_chi(const CutoffProfile& p);
double q_param(double c_chi);

Vec2 vector_field_Z(const CutoffProfile& p, const Vec2& x);
/// (i, j) entry is d_i Z_j.
Eigen::Matrix2d vector_field_dZ(const CutoffProfile& p, const Vec2& x);

struct AlphaValues {
    double alpha;
    Vec2 grad;
    double laplacian;
};

AlphaValues alpha_and_laplacian(const CutoffProfile& p, double q, const Vec2& x);

/// Delta alpha maximized over directions at radius r (it is affine in sin^2 theta).
double laplacian_alpha_angular_max(const CutoffProfile& p, double q, double r);

struct MultiplierConstants {
    double c_chi = 0.0;
    double q = 0.0;
    double M_alpha = 0.0;
    double R_star = 0.0;
    double chi_R_star = 0.0;
    double chi_2R0 = 0.0;
    double alpha_inf = 0.0;  // sup |alpha|
    double k_threshold = 0.0;
    double R0 = 0.0, R1 = 0.0;

    double resolvent_constant(double k, double R) const;
};

MultiplierConstants threshold_constants(const CutoffProfile& p, double q);
MultiplierConstants threshold_constants(const CutoffProfile& p);

/// m_alpha(r) = max(0, sup over B_r of Delta alpha).
double m_alpha(const CutoffProfile& p, double q, double r);

double min_z_dot_n(const CutoffProfile& p, const Boundary& b, int samples);

// Identity checks

struct TestField {
    std::function<cplx(const Vec2&)> value;
    std::function<Eigen::Vector2cd(const Vec2&)> grad;
    std::function<cplx(const Vec2&)> laplacian;
};

TestField plane_wave_field(double k, const Vec2& direction);
/// Sum of amplitude_j * exp(i k x.d_j).
TestField plane_wave_superposition(double k, std::vector<Vec2> directions, std::vector<cplx> amplitudes);
/// Sum of amplitude_j * Phi_k(x, y_j).
TestField point_source_field(double k, std::vector<Vec2> sources, std::vector<cplx> amplitudes);
/// Complex cubic: coefficients of 1, x, y, x^2, xy, y^2, x^3, x^2 y, x y^2, y^3.
TestField cubic_field(const std::array<cplx, 10>& c);

struct Multiplier {
    std::function<Vec2(const Vec2&)> Z;
    std::function<Eigen::Matrix2d(const Vec2&)> dZ;
    std::function<AlphaValues(const Vec2&)> alpha;
    double beta = 0.0;
};

Multiplier profile_multiplier(const CutoffProfile& p, double q, double beta);
/// Z = x with constant alpha.
Multiplier radial_multiplier(double alpha, double beta);

/// |2 Re(conj(Zv) Lv) - (div F + remaining terms)| at x, div F by centered differences with step h.
double morawetz_residual(const TestField& v, const Multiplier& m, double k, const Vec2& x, double h);

/// Same for the identity with multiplier r(v_r - ikv + (alpha/r) v).
double morawetz_ludwig_residual(const TestField& v, double alpha, double k, const Vec2& x, double h);
/// The non-divergence side P(v), so that div Q(v) = P(v).
double morawetz_ludwig_P(const TestField& v, double alpha, double k, const Vec2& x);

struct GriddedField {
    double x0 = 0.0, y0 = 0.0, h = 1.0;
    int nx = 0, ny = 0;
    std::vector<cplx> values;  // row-major, index j * nx + i at (x0 + i h, y0 + j h)

    cplx at(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
};

/// Samples f on a square grid of side 2 sqrt(13) R (plus one cell) centered at the origin.
GriddedField sample_field(const std::function<cplx(const Vec2&)>& f, double R, int cells_across_2R);

struct FriedrichsSides {
    double lhs = 0.0, rhs = 0.0;
};

FriedrichsSides friedrichs_check(const GriddedField& v, double R);

struct FluxCheck {
    double re_flux = 0.0;
    double lhs_21 = 0.0;
    double im_flux = 0.0;
};

FluxCheck radiating_flux_check(double k, const std::vector<Vec2>& sources, const std::vector<cplx>& amplitudes,
                               double R);

}  // namespace helmlab
