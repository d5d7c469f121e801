#include "helmlab/quasimode.hpp"

#include <cmath>

#include "helmlab/errors.hpp"

namespace helmlab {
namespace {

Eigen::VectorXcd scaled(const Mesh& m, const Eigen::VectorXcd& v) {
    Eigen::VectorXcd s(v.size());
    for (int i = 0; i < v.size(); ++i) s[i] = std::sqrt(m.weight[i]) * v[i];
    return s;
}

void check_operator(const DiscreteOperator& ap, const QuasimodeDensity& phi) {
    if (!ap.l2_scaled) throw InvalidInput("quasimode: operator must be L2-scaled");
    if (ap.m.rows() != phi.values.size()) throw InvalidInput("quasimode: density and operator sizes differ");
}

}  // namespace

double bump(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
}

QuasimodeDensity build_quasimode(const Mesh& mesh, const Boundary& b, double k) {
    if (!b.facing()) throw InvalidInput("build_quasimode: boundary has no facing segments");
    QuasimodeDensity q;
    q.support = *b.facing();
    q.center = q.support.bump_center();
    q.half_width = q.support.bump_half_width();
    q.c2 = -std::exp(cplx(0.0, k * q.support.gap()));
    q.values = Eigen::VectorXcd::Zero(mesh.size());
    double n2 = 0.0;
    for (int i = 0; i < mesh.size(); ++i) {
        const int arc = mesh.panels[mesh.panel_of[i]].arc;
        if (arc != q.support.arc1 && arc != q.support.arc2) continue;
        const double v = bump((mesh.x[i].y() - q.center) / q.half_width);
        q.values[i] = (arc == q.support.arc1 ? q.c1 : q.c2) * v;
        n2 += mesh.weight[i] * v * v;
    }
    q.norm = std::sqrt(n2);
    return q;
}

QuasimodeResult quasimode_residual(const DiscreteOperator& ap, const QuasimodeDensity& phi) {
    check_operator(ap, phi);
    const Eigen::VectorXcd s = scaled(*ap.mesh, phi.values);
    const double num = (ap.m * s).norm();
    QuasimodeResult r;
    r.phi_norm = s.norm();
    r.residual = num / r.phi_norm;
    r.lower_bound = r.phi_norm / num;
    return r;
}

QuasimodeResult quasimode_residual(std::shared_ptr<const Boundary> b, double k, double eta, double ppw,
                                   int corner_depth) {
    auto mesh = build_mesh(b, k, ppw, corner_depth);
    const auto ap = assemble_combined(OperatorKind::Ap, k, eta, mesh);
    return quasimode_residual(ap, build_quasimode(*mesh, *b, k));
}

double coercivity_probe(const DiscreteOperator& ap, const QuasimodeDensity& phi) {
    check_operator(ap, phi);
    const Eigen::VectorXcd s = scaled(*ap.mesh, phi.values);
    return std::abs(s.dot(ap.m * s)) / s.squaredNorm();
}

double coercivity_probe(std::shared_ptr<const Boundary> b, double k, double eta, double ppw, int corner_depth) {
    auto mesh = build_mesh(b, k, ppw, corner_depth);
    const auto ap = assemble_combined(OperatorKind::Ap, k, eta, mesh);
    return coercivity_probe(ap, build_quasimode(*mesh, *b, k));
}

}  // namespace helmlab
