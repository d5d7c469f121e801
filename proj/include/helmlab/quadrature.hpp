#pragma once

#include <array>
#include <vector>

namespace helmlab {

inline constexpr int kPanelOrder = 16;

struct GaussRule {
    std::vector<double> nodes;    // ascending in (-1, 1)
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], cached for n <= 64.
const GaussRule& gauss_legendre(int n);

/// P_0(t) .. P_n(t).
std::vector<double> legendre_values(int n, double t);

/// m_j(t) = integral_{-1}^{1} log|t - s| P_j(s) ds for j = 0..n, |t| < 1.
std::vector<double> legendre_log_moments(int n, double t);

using PanelMatrix = std::array<std::array<double, kPanelOrder>, kPanelOrder>;

/// W[i][j] with sum_j W[i][j] f(s_j) = integral log|s_i - s| f(s) ds for
/// polynomials f of degree < kPanelOrder, s_i the panel Gauss nodes.
const PanelMatrix& panel_log_weights();

/// Lagrange basis at the panel Gauss nodes, evaluated at t.
std::array<double, kPanelOrder> panel_lagrange(double t);

}  // namespace helmlab
