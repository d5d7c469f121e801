#pragma once

#include "helmlab/layer_ops.hpp"

namespace helmlab {

struct QuasimodeDensity {
    Eigen::VectorXcd values;  // node values of phi
    FacingSegments support;
    double half_width = 0.0;
    double center = 0.0;
    cplx c1{1.0, 0.0}, c2;
    double norm = 0.0;  // L2(Gamma) norm by mesh quadrature
};

/// exp(-1/(1 - t^2)) for |t| < 1, zero otherwise.
double bump(double t);

QuasimodeDensity build_quasimode(const Mesh& mesh, const Boundary& b, double k);

struct QuasimodeResult {
    double phi_norm = 0.0;
    double residual = 0.0;     // ||A' phi|| / ||phi||
    double lower_bound = 0.0;  // ||phi|| / ||A' phi||
};

/// Uses an L2-scaled A' assembled on the density's mesh.
QuasimodeResult quasimode_residual(const DiscreteOperator& ap, const QuasimodeDensity& phi);
QuasimodeResult quasimode_residual(std::shared_ptr<const Boundary> b, double k, double eta, double ppw,
                                   int corner_depth);

/// |(A' phi, phi)| / ||phi||^2 with an L2-scaled A'.
double coercivity_probe(const DiscreteOperator& ap, const QuasimodeDensity& phi);
double coercivity_probe(std::shared_ptr<const Boundary> b, double k, double eta, double ppw, int corner_depth);

}  // namespace helmlab
