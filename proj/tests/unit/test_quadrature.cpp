#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "helmlab/quadrature.hpp"

using namespace helmlab;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1") {
    for (int n : {1, 4, 16, 33}) {
        const GaussRule& g = gauss_legendre(n);
        for (int d = 0; d < 2 * n; ++d) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], d);
            const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
            CHECK(std::abs(s - exact) < 1e-14);
        }
    }
}

TEST_CASE("log moments match adaptive quadrature") {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double t : {-0.93, -0.2, 0.0, 0.41, 0.999}) {
        const auto m = legendre_log_moments(12, t);
        for (int j = 0; j <= 12; ++j) {
            auto f = [&](double s) { return std::log(std::abs(t - s)) * legendre_values(j, s)[j]; };
            const double ref = ts.integrate(f, -1.0, t) + ts.integrate(f, t, 1.0);
            CHECK(std::abs(m[j] - ref) < 1e-12);
        }
    }
}

TEST_CASE("panel log weights are exact for polynomials") {
    const auto& W = panel_log_weights();
    const auto& g = gauss_legendre(kPanelOrder);
    for (int i = 0; i < kPanelOrder; ++i) {
        const double t = g.nodes[i];
        const auto m = legendre_log_moments(kPanelOrder - 1, t);
        for (int d = 0; d < kPanelOrder; ++d) {
            double s = 0.0;
            for (int j = 0; j < kPanelOrder; ++j) s += W[i][j] * legendre_values(d, g.nodes[j])[d];
            CHECK(std::abs(s - m[d]) < 1e-12);
        }
    }
}

TEST_CASE("panel Lagrange basis reproduces polynomials and is cardinal") {
    const auto& g = gauss_legendre(kPanelOrder);
    const auto at_node = panel_lagrange(g.nodes[5]);
    for (int j = 0; j < kPanelOrder; ++j) CHECK(at_node[j] == doctest::Approx(j == 5 ? 1.0 : 0.0));
    for (double t : {-1.0, -0.37, 0.5, 1.0}) {
        const auto L = panel_lagrange(t);
        double s = 0.0;
        for (int j = 0; j < kPanelOrder; ++j) s += L[j] * std::pow(g.nodes[j], 15);
        CHECK(std::abs(s - std::pow(t, 15)) < 1e-12);
    }
}
