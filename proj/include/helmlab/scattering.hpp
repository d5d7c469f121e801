#pragma once

#include <vector>

#include "helmlab/layer_ops.hpp"

namespace helmlab {

struct IncidentWave {
    Vec2 direction;  // unit vector
    double k;
    static IncidentWave from_angle(double k, double angle);
};

/// Complex node values on a mesh.
struct DensityFunction {
    Eigen::VectorXcd values;
    std::shared_ptr<const Mesh> mesh;

    double l2_norm() const;
};

/// f = du^i/dn - i eta u^i at the nodes.
DensityFunction plane_wave_trace(const IncidentWave& w, double eta, std::shared_ptr<const Mesh> mesh);

struct SoundSoftSolution {
    DensityFunction neumann;  // d_n^+ u^t
    IncidentWave wave;
    double eta = 0.0;
    double relative_residual = 0.0;
};

SoundSoftSolution solve_soundsoft(const IncidentWave& w, double eta, std::shared_ptr<const Mesh> mesh);
/// Reuses an assembled L2-scaled A' on the same mesh.
SoundSoftSolution solve_soundsoft(const IncidentWave& w, double eta, const DiscreteOperator& ap);

/// u^t = u^i - S-potential of the Neumann trace. Points must be exterior and at least
/// two local panel lengths away from the boundary.
std::vector<cplx> evaluate_field(const SoundSoftSolution& sol, const std::vector<Vec2>& points);

struct FieldGrad {
    cplx u;
    Eigen::Vector2cd grad;
};

FieldGrad scattered_field(const SoundSoftSolution& sol, const Vec2& x);

/// Re of the integral of conj(u^s) d_r u^s over the circle |x| = R (trapezoid rule).
double scattered_energy_flux(const SoundSoftSolution& sol, double R);

/// |(d_r - ik) u^s| at radius r1 divided by the same at r2 along direction `angle`.
double radiation_ratio(const SoundSoftSolution& sol, double angle, double r1, double r2);

/// Exact Neumann trace on the circle of radius R centered at the origin, at polar angles theta.
std::vector<cplx> circle_neumann_series(double k, double R, double incidence_angle,
                                        const std::vector<double>& theta);
/// Exact total field outside that circle.
cplx circle_total_field(double k, double R, double incidence_angle, const Vec2& x);

}  // namespace helmlab
