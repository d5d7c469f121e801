#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "helmlab/geometry.hpp"

namespace helmlab {

struct Panel {
    int arc;
    double t0, t1;     // parameter interval on the arc
    int first_node;
    double length;
    Vec2 center;
};

/// Composite Gauss-Legendre discretization of a boundary. Node j of panel p sits at
/// index p.first_node + j; `weight` is the arclength quadrature weight and `jac` the
/// derivative of arclength with respect to the panel-local coordinate in [-1, 1].
struct Mesh {
    std::vector<Panel> panels;
    std::vector<Vec2> x, n;
    std::vector<double> weight, jac, curvature;
    std::vector<int> panel_of;
    double ppw = 0.0;
    double k_design = 0.0;
    int corner_depth = 0;
    double boundary_length = 0.0;
    std::shared_ptr<const Boundary> boundary;

    int size() const { return static_cast<int>(x.size()); }
    double max_panel_length() const;
};

inline constexpr int kDefaultNodeCap = 12000;
/// Largest k * (panel length) accepted by the singular quadrature.
inline constexpr double kMaxPanelKh = 4.0;

std::shared_ptr<const Mesh> build_mesh(std::shared_ptr<const Boundary> b, double k, double ppw,
                                       int corner_depth, int node_cap = kDefaultNodeCap);

enum class OperatorKind { S, D, Dp, A, Ap, custom };
std::string to_string(OperatorKind kind);

struct DiscreteOperator {
    Eigen::MatrixXcd m;
    std::shared_ptr<const Mesh> mesh;
    OperatorKind kind = OperatorKind::custom;
    bool l2_scaled = false;
    double k = 0.0;
    double eta = 0.0;
};

/// Nystrom matrix of S_k, D_k or D'_k acting on node values (unscaled).
DiscreteOperator assemble(OperatorKind kind, double k, std::shared_ptr<const Mesh> mesh);

struct LayerSet {
    DiscreteOperator S, Dp, D;
};

/// S, D' and optionally D (unscaled). D is built from D' by the weighted transpose D_ij = (w_j/w_i) D'_ji.
LayerSet assemble_layers(double k, std::shared_ptr<const Mesh> mesh, bool with_D);

/// Conjugation by W^{1/2}: entry (i,j) becomes sqrt(w_i) M_ij / sqrt(w_j).
DiscreteOperator l2_scale(DiscreteOperator op);

/// 1/2 I + D (or D') - i eta S, L2-scaled.
DiscreteOperator assemble_combined(OperatorKind variant, double k, double eta,
                                   std::shared_ptr<const Mesh> mesh);
DiscreteOperator combine(const DiscreteOperator& S, const DiscreteOperator& Dx, double eta);

/// Eigenvalues lambda_n, n = 0..n_max, of A'_{k,eta} on the circle of radius R
/// (mode n and -n share the value).
std::vector<cplx> circle_eigenvalues(double k, double eta, double R, int n_max);
/// Fourier symbols of S_k and D'_k on the circle, n = 0..n_max.
std::vector<cplx> circle_symbols_S(double k, double R, int n_max);
std::vector<cplx> circle_symbols_Dp(double k, double R, int n_max);

/// Row-major dump: header "HLMX", int64 dimension, double k, double eta, int32 kind,
/// then dimension^2 complex doubles.
void write_matrix_dump(const DiscreteOperator& op, const std::string& path);
DiscreteOperator read_matrix_dump(const std::string& path);

}  // namespace helmlab
