#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace helmlab {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;

enum class BesselKind { J, Y };

/// Cylinder functions of order 0 and 1 for real x > 0 (J also at x = 0).
/// Backward recurrence below x = 25, Hankel asymptotics above.
double bessel(BesselKind kind, int order, double x);

struct BesselSet {
    double j0, j1, y0, y1;
};

/// J0, J1, Y0, Y1 in one pass; x > 0.
BesselSet bessel01(double x);

cplx hankel1(int order, double x);

/// Argument beyond which evaluation is refused.
inline constexpr double kBesselMaxArg = 1e8;
/// Switch point between the recurrence and the asymptotic regime.
inline constexpr double kBesselSwitch = 25.0;

/// J_n(x), n = 0..n_max, by normalized backward recurrence.
std::vector<double> bessel_j_orders(int n_max, double x);
/// Y_n(x), n = 0..n_max, by forward recurrence. Throws on overflow.
std::vector<double> bessel_y_orders(int n_max, double x);

enum class NormalSide { at_y, at_x };

/// Phi_k(x,y) = (i/4) H0(k|x-y|).
cplx fundamental_solution(double k, const Vec2& x, const Vec2& y);

/// Normal derivative of Phi_k(x,y) with respect to y (at_y) or x (at_x).
///   at_y:  (ik/4) H1(kr) n.(x-y)/r
///   at_x: -(ik/4) H1(kr) n.(x-y)/r
cplx fundamental_solution_normal_grad(double k, const Vec2& x, const Vec2& y, const Vec2& n,
                                      NormalSide side);

/// Raises unless |x-y| >= 1e-14 (1+|x|).
void check_separated(const Vec2& x, const Vec2& y);

}  // namespace helmlab
