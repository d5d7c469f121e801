#include "helmlab/scattering.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>

#include "helmlab/errors.hpp"

namespace helmlab {
namespace {

constexpr double kPi = std::numbers::pi;

cplx ipow(int n) {
    static const cplx p[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return p[((n % 4) + 4) % 4];
}

void check_point(const Mesh& m, const Vec2& x) {
    double best = std::numeric_limits<double>::infinity();
    int at = 0;
    for (int i = 0; i < m.size(); ++i) {
        const double d = (x - m.x[i]).norm();
        if (d < best) best = d, at = i;
    }
    if (best < 2.0 * m.panels[m.panel_of[at]].length) {
        throw InvalidInput("evaluation point closer than two panel lengths to the boundary");
    }
    if (m.boundary && m.boundary->inside(x)) throw InvalidInput("evaluation point lies inside the obstacle");
}

}  // namespace

IncidentWave IncidentWave::from_angle(double k, double angle) {
    return IncidentWave{Vec2(std::cos(angle), std::sin(angle)), k};
}

double DensityFunction::l2_norm() const {
    double s = 0.0;
    for (int i = 0; i < values.size(); ++i) s += mesh->weight[i] * std::norm(values[i]);
    return std::sqrt(s);
}

DensityFunction plane_wave_trace(const IncidentWave& w, double eta, std::shared_ptr<const Mesh> mesh) {
    if (eta == 0.0) throw InvalidInput("plane_wave_trace: eta must be nonzero");
    DensityFunction f{Eigen::VectorXcd(mesh->size()), mesh};
    for (int i = 0; i < mesh->size(); ++i) {
        const cplx ui = std::exp(cplx(0.0, w.k * mesh->x[i].dot(w.direction)));
        f.values[i] = cplx(0.0, w.k * w.direction.dot(mesh->n[i])) * ui - cplx(0.0, eta) * ui;
    }
    return f;
}

SoundSoftSolution solve_soundsoft(const IncidentWave& w, double eta, std::shared_ptr<const Mesh> mesh) {
    return solve_soundsoft(w, eta, assemble_combined(OperatorKind::Ap, w.k, eta, mesh));
}

SoundSoftSolution solve_soundsoft(const IncidentWave& w, double eta, const DiscreteOperator& ap) {
    if (!ap.l2_scaled || ap.kind != OperatorKind::Ap) throw InvalidInput("solve_soundsoft: needs a scaled A'");
    const auto& mesh = ap.mesh;
    const DensityFunction f = plane_wave_trace(w, eta, mesh);
    Eigen::VectorXd sw(mesh->size());
    for (int i = 0; i < mesh->size(); ++i) sw[i] = std::sqrt(mesh->weight[i]);
    const Eigen::VectorXcd rhs = sw.cwiseProduct(f.values);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(ap.m);
    Eigen::VectorXcd y = lu.solve(rhs);
    double res = (ap.m * y - rhs).norm() / rhs.norm();
    if (res > 1e-10) {
        y += lu.solve(rhs - ap.m * y);
        res = (ap.m * y - rhs).norm() / rhs.norm();
    }
    if (!(res <= 1e-10)) {
        throw NumericalFailure("solve_soundsoft: residual " + std::to_string(res) +
                               " above 1e-10; reciprocal condition estimate " + std::to_string(lu.rcond()));
    }
    SoundSoftSolution s;
    s.neumann = DensityFunction{y.cwiseQuotient(sw.cast<cplx>()), mesh};
    s.wave = w;
    s.eta = eta;
    s.relative_residual = res;
    return s;
}

FieldGrad scattered_field(const SoundSoftSolution& sol, const Vec2& x) {
    const Mesh& m = *sol.neumann.mesh;
    const double k = sol.wave.k;
    FieldGrad out{0.0, Eigen::Vector2cd::Zero()};
    for (int j = 0; j < m.size(); ++j) {
        const Vec2 d = x - m.x[j];
        const double r = d.norm();
        const BesselSet b = bessel01(k * r);
        const cplx q = sol.neumann.values[j] * m.weight[j];
        out.u -= cplx(0.0, 0.25) * cplx(b.j0, b.y0) * q;
        // grad_x Phi = -(ik/4) H1(kr) (x - y)/r
        const cplx g = -cplx(0.0, 0.25 * k) * cplx(b.j1, b.y1) / r * q;
        out.grad[0] -= g * d.x();
        out.grad[1] -= g * d.y();
    }
    return out;
}

std::vector<cplx> evaluate_field(const SoundSoftSolution& sol, const std::vector<Vec2>& points) {
    const Mesh& m = *sol.neumann.mesh;
    for (const Vec2& x : points) check_point(m, x);
    std::vector<cplx> out(points.size());
#pragma omp parallel for schedule(static)
    for (int p = 0; p < static_cast<int>(points.size()); ++p) {
        const Vec2& x = points[p];
        out[p] = std::exp(cplx(0.0, sol.wave.k * x.dot(sol.wave.direction))) + scattered_field(sol, x).u;
    }
    return out;
}

double scattered_energy_flux(const SoundSoftSolution& sol, double R) {
    const Mesh& m = *sol.neumann.mesh;
    for (const Vec2& y : m.x) {
        if (y.norm() >= R) throw InvalidInput("scattered_energy_flux: circle must enclose the boundary");
    }
    const int n = 2 * static_cast<int>(std::ceil(sol.wave.k * R)) + 128;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * i / n;
        const Vec2 e(std::cos(th), std::sin(th));
        const FieldGrad f = scattered_field(sol, R * e);
        const cplx ur = f.grad[0] * e.x() + f.grad[1] * e.y();
        acc += std::real(std::conj(f.u) * ur);
    }
    return acc * 2.0 * kPi * R / n;
}

double radiation_ratio(const SoundSoftSolution& sol, double angle, double r1, double r2) {
    const Vec2 e(std::cos(angle), std::sin(angle));
    auto defect = [&](double r) {
        const FieldGrad f = scattered_field(sol, r * e);
        const cplx ur = f.grad[0] * e.x() + f.grad[1] * e.y();
        return std::abs(ur - cplx(0.0, sol.wave.k) * f.u);
    };
    return defect(r1) / defect(r2);
}

std::vector<cplx> circle_neumann_series(double k, double R, double incidence_angle, const std::vector<double>& theta) {
    const double z = k * R;
    const int N = static_cast<int>(z) + 40;
    const auto J = bessel_j_orders(N, z);
    const auto Y = bessel_y_orders(N, z);
    std::vector<cplx> out(theta.size());
    for (std::size_t p = 0; p < theta.size(); ++p) {
        const double psi = theta[p] - incidence_angle;
        cplx s = 0.0;
        for (int n = 0; n <= N; ++n) {
            const double eps = n == 0 ? 1.0 : 2.0;
            s += eps * ipow(n) * std::cos(n * psi) / cplx(J[n], Y[n]);
        }
        out[p] = cplx(0.0, -2.0 / (kPi * R)) * s;
    }
    return out;
}

cplx circle_total_field(double k, double R, double incidence_angle, const Vec2& x) {
    const double r = x.norm();
    if (r < R) throw InvalidInput("circle_total_field: point inside the circle");
    const int N = static_cast<int>(k * R) + 40;
    const auto JR = bessel_j_orders(N, k * R);
    const auto YR = bessel_y_orders(N, k * R);
    const auto Jr = bessel_j_orders(N, k * r);
    const auto Yr = bessel_y_orders(N, k * r);
    const double psi = std::atan2(x.y(), x.x()) - incidence_angle;
    cplx us = 0.0;
    for (int n = 0; n <= N; ++n) {
        const double eps = n == 0 ? 1.0 : 2.0;
        us -= eps * ipow(n) * JR[n] * cplx(Jr[n], Yr[n]) / cplx(JR[n], YR[n]) * std::cos(n * psi);
    }
    const Vec2 d(std::cos(incidence_angle), std::sin(incidence_angle));
    return std::exp(cplx(0.0, k * x.dot(d))) + us;
}

}  // namespace helmlab
