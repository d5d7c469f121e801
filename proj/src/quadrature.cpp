#include "helmlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "helmlab/errors.hpp"

namespace helmlab {
namespace {

GaussRule build_gauss(int n) {
    GaussRule g;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 0 ? 1.0 : p1;
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (t * pn - pnm1) / (t * t - 1.0);
            const double dt = pn / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        g.nodes[i] = t;
        g.weights[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return g;
}

PanelMatrix build_log_weights() {
    const GaussRule& g = gauss_legendre(kPanelOrder);
    const int n = kPanelOrder;
    std::vector<std::vector<double>> p(n);
    for (int j = 0; j < n; ++j) p[j] = legendre_values(n - 1, g.nodes[j]);
    PanelMatrix w{};
    for (int i = 0; i < n; ++i) {
        const std::vector<double> m = legendre_log_moments(n - 1, g.nodes[i]);
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int l = 0; l < n; ++l) s += 0.5 * (2.0 * l + 1.0) * p[j][l] * m[l];
            w[i][j] = g.weights[j] * s;
        }
    }
    return w;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1 || n > 64) throw InvalidInput("gauss_legendre: order must be in [1, 64]");
    static std::mutex mtx;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss(n)).first;
    return it->second;
}

std::vector<double> legendre_values(int n, double t) {
    std::vector<double> p(n + 1);
    p[0] = 1.0;
    if (n >= 1) p[1] = t;
    for (int k = 1; k < n; ++k) p[k + 1] = ((2.0 * k + 1.0) * t * p[k] - k * p[k - 1]) / (k + 1.0);
    return p;
}

std::vector<double> legendre_log_moments(int n, double t) {
    if (!(std::abs(t) < 1.0)) throw InvalidInput("legendre_log_moments: |t| must be < 1");
    // Legendre functions of the second kind Q_0 .. Q_{n+1} on (-1, 1).
    std::vector<double> q(n + 2);
    q[0] = 0.5 * std::log((1.0 + t) / (1.0 - t));
    q[1] = t * q[0] - 1.0;
    for (int k = 1; k <= n; ++k) q[k + 1] = ((2.0 * k + 1.0) * t * q[k] - k * q[k - 1]) / (k + 1.0);
    std::vector<double> m(n + 1);
    m[0] = (1.0 + t) * std::log(1.0 + t) + (1.0 - t) * std::log(1.0 - t) - 2.0;
    for (int k = 1; k <= n; ++k) m[k] = 2.0 * (q[k + 1] - q[k - 1]) / (2.0 * k + 1.0);
    return m;
}

const PanelMatrix& panel_log_weights() {
    static const PanelMatrix w = build_log_weights();
    return w;
}

std::array<double, kPanelOrder> panel_lagrange(double t) {
    const GaussRule& g = gauss_legendre(kPanelOrder);
    std::array<double, kPanelOrder> l{};
    for (int j = 0; j < kPanelOrder; ++j) {
        if (t == g.nodes[j]) {
            l[j] = 1.0;
            return l;
        }
    }
    // Barycentric form with weights for Gauss-Legendre points.
    static const std::array<double, kPanelOrder> bw = [] {
        const GaussRule& gg = gauss_legendre(kPanelOrder);
        std::array<double, kPanelOrder> w{};
        for (int j = 0; j < kPanelOrder; ++j) {
            w[j] = ((j % 2) ? -1.0 : 1.0) * std::sqrt((1.0 - gg.nodes[j] * gg.nodes[j]) * gg.weights[j]);
        }
        return w;
    }();
    double den = 0.0;
    for (int j = 0; j < kPanelOrder; ++j) {
        l[j] = bw[j] / (t - g.nodes[j]);
        den += l[j];
    }
    for (double& v : l) v /= den;
    return l;
}

}  // namespace helmlab
