#include "helmlab/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "helmlab/errors.hpp"

namespace helmlab {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = std::numbers::egamma;
constexpr double kRescale = 1e250;

int miller_start(double x, int n_min) {
    const double base = std::max(static_cast<double>(n_min), x);
    int m = static_cast<int>(base + 12.0 * std::cbrt(base + 1.0) + 20.0);
    return m + (m % 2);
}

// Backward recurrence for x in (0, kBesselSwitch). Also accumulates the Neumann sums
// that give Y0 and Y1 from the J_n sequence.
BesselSet small_argument(double x) {
    const int m0 = miller_start(x, 2);
    double jp1 = 0.0;  // J_{m+1}
    double jm = 1e-30; // J_m
    double norm = 0.0, sy0 = 0.0, sy1 = 0.0;
    double j1 = 0.0;
    // J_{2k+1} retained from the previous even step for the Y1 sum.
    double j_odd_above = 0.0;
    for (int m = m0; m >= 1; --m) {
        const double jm1 = (2.0 * m / x) * jm - jp1;  // J_{m-1}
        jp1 = jm;
        jm = jm1;
        const int n = m - 1;
        if (n == 1) j1 = jm;
        if (n >= 2 && n % 2 == 0) {
            const int k = n / 2;
            const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
            norm += 2.0 * jm;
            sy0 += sgn * jm / k;
            // J_{2k-1} is one step below; J_{2k+1} is the value above (jp1).
            j_odd_above = jp1;
        }
        if (n % 2 == 1 && n >= 1) {
            const int k = (n + 1) / 2;
            const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
            sy1 += sgn * (jm - j_odd_above) / k;
        }
        if (std::abs(jm) > kRescale) {
            jm /= kRescale;
            jp1 /= kRescale;
            norm /= kRescale;
            sy0 /= kRescale;
            sy1 /= kRescale;
            j1 /= kRescale;
            j_odd_above /= kRescale;
        }
    }
    norm += jm;
    const double j0 = jm / norm;
    j1 /= norm;
    sy0 /= norm;
    sy1 /= norm;
    const double lg = std::log(0.5 * x) + kEulerGamma;
    BesselSet out;
    out.j0 = j0;
    out.j1 = j1;
    out.y0 = (2.0 / kPi) * (lg * j0 - 2.0 * sy0);
    out.y1 = (2.0 / kPi) * (lg * j1 - j0 / x + sy1);
    return out;
}

void hankel_pq(int nu, double x, double& p, double& q) {
    const double mu = 4.0 * nu * nu;
    p = 1.0;
    q = 0.0;
    double term = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (8.0 * k * x);
        if (std::abs(term) > std::abs(prev) && k > 2) break;
        const int r = k % 4;
        if (r == 1) q += term;
        else if (r == 2) p -= term;
        else if (r == 3) q -= term;
        else p += term;
        if (std::abs(term) < 1e-18) break;
        prev = term;
    }
}

BesselSet large_argument(double x) {
    const double s = std::sin(x);
    const double c = std::cos(x);
    const double amp = std::sqrt(2.0 / (kPi * x)) * (1.0 / std::numbers::sqrt2);
    double p0, q0, p1, q1;
    hankel_pq(0, x, p0, q0);
    hankel_pq(1, x, p1, q1);
    // omega0 = x - pi/4, omega1 = x - 3pi/4, expanded to avoid cancellation in x - pi/4.
    const double cw0 = c + s, sw0 = s - c;
    const double cw1 = s - c, sw1 = -(s + c);
    BesselSet out;
    out.j0 = amp * (p0 * cw0 - q0 * sw0);
    out.y0 = amp * (p0 * sw0 + q0 * cw0);
    out.j1 = amp * (p1 * cw1 - q1 * sw1);
    out.y1 = amp * (p1 * sw1 + q1 * cw1);
    return out;
}

}  // namespace

BesselSet bessel01(double x) {
    if (!(x > 0.0)) throw InvalidInput("bessel01: argument must be positive");
    if (x > kBesselMaxArg) throw std::overflow_error("bessel01: argument beyond supported range");
    return x < kBesselSwitch ? small_argument(x) : large_argument(x);
}

double bessel(BesselKind kind, int order, double x) {
    if (order != 0 && order != 1) throw InvalidInput("bessel: order must be 0 or 1");
    if (kind == BesselKind::J && x == 0.0) return order == 0 ? 1.0 : 0.0;
    if (kind == BesselKind::J && x < 0.0) {
        // J0 is even, J1 odd.
        const double v = bessel(kind, order, -x);
        return order == 0 ? v : -v;
    }
    if (!(x > 0.0)) throw InvalidInput("bessel: Y requires x > 0");
    const BesselSet b = bessel01(x);
    if (kind == BesselKind::J) return order == 0 ? b.j0 : b.j1;
    return order == 0 ? b.y0 : b.y1;
}

cplx hankel1(int order, double x) {
    if (order != 0 && order != 1) throw InvalidInput("hankel1: order must be 0 or 1");
    if (!(x > 0.0)) throw InvalidInput("hankel1: x must be positive");
    const BesselSet b = bessel01(x);
    return order == 0 ? cplx(b.j0, b.y0) : cplx(b.j1, b.y1);
}

std::vector<double> bessel_j_orders(int n_max, double x) {
    if (n_max < 0) throw InvalidInput("bessel_j_orders: negative order");
    if (x < 0.0) throw InvalidInput("bessel_j_orders: negative argument");
    std::vector<double> j(n_max + 1, 0.0);
    if (x == 0.0) {
        j[0] = 1.0;
        return j;
    }
    if (x > kBesselMaxArg) throw std::overflow_error("bessel_j_orders: argument too large");
    const int m0 = miller_start(x, n_max + 2);
    std::vector<double> all(m0 + 2, 0.0);
    all[m0] = 1e-30;
    for (int m = m0; m >= 1; --m) {
        all[m - 1] = (2.0 * m / x) * all[m] - all[m + 1];
        if (std::abs(all[m - 1]) > kRescale) {
            for (int i = m - 1; i <= m0; ++i) all[i] /= kRescale;
        }
    }
    double norm = all[0];
    for (int m = 2; m <= m0; m += 2) norm += 2.0 * all[m];
    for (int n = 0; n <= n_max; ++n) j[n] = all[n] / norm;
    return j;
}

std::vector<double> bessel_y_orders(int n_max, double x) {
    if (n_max < 0) throw InvalidInput("bessel_y_orders: negative order");
    if (!(x > 0.0)) throw InvalidInput("bessel_y_orders: x must be positive");
    std::vector<double> y(n_max + 1);
    const BesselSet b = bessel01(x);
    y[0] = b.y0;
    if (n_max >= 1) y[1] = b.y1;
    for (int n = 1; n < n_max; ++n) {
        y[n + 1] = (2.0 * n / x) * y[n] - y[n - 1];
        if (!std::isfinite(y[n + 1]) || std::abs(y[n + 1]) > 1e300) {
            throw NumericalFailure("bessel_y_orders: forward recurrence overflows at order " +
                                   std::to_string(n + 1));
        }
    }
    return y;
}

void check_separated(const Vec2& x, const Vec2& y) {
    if ((x - y).norm() < 1e-14 * (1.0 + x.norm())) {
        throw InvalidInput("fundamental solution evaluated at coincident points");
    }
}

cplx fundamental_solution(double k, const Vec2& x, const Vec2& y) {
    if (!(k > 0.0)) throw InvalidInput("fundamental_solution: k must be positive");
    check_separated(x, y);
    return cplx(0.0, 0.25) * hankel1(0, k * (x - y).norm());
}

cplx fundamental_solution_normal_grad(double k, const Vec2& x, const Vec2& y, const Vec2& n,
                                      NormalSide side) {
    if (!(k > 0.0)) throw InvalidInput("fundamental_solution_normal_grad: k must be positive");
    check_separated(x, y);
    const Vec2 d = x - y;
    const double r = d.norm();
    const double proj = n.dot(d);
    if (proj == 0.0) return 0.0;
    const cplx v = cplx(0.0, 0.25 * k) * hankel1(1, k * r) * (proj / r);
    return side == NormalSide::at_y ? v : -v;
}

}  // namespace helmlab
