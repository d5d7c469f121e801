#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "helmlab/errors.hpp"
#include "helmlab/layer_ops.hpp"
#include "helmlab/spectra.hpp"

using namespace helmlab;

namespace {

std::shared_ptr<const Boundary> circle() { return std::make_shared<const Boundary>(make_circle(1.0)); }
std::shared_ptr<const Boundary> squares() { return std::make_shared<const Boundary>(make_two_squares(1.0, 0.5)); }

Eigen::VectorXcd fourier_mode(const Mesh& m, int n) {
    Eigen::VectorXcd v(m.size());
    for (int j = 0; j < m.size(); ++j) v[j] = std::exp(cplx(0.0, n * std::atan2(m.x[j].y(), m.x[j].x())));
    return v;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]) / std::abs(b[i]));
    return d;
}

}  // namespace

TEST_CASE("mesh on the unit circle") {
    const auto m = build_mesh(circle(), 10.0, 30.0, 10);
    // ceil(ppw k L / (2 pi 16)) = ceil(18.75)
    CHECK(m->panels.size() == 19);
    CHECK(m->size() == 16 * static_cast<int>(m->panels.size()));
    double sum = 0.0;
    for (double w : m->weight) sum += w;
    CHECK(sum == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-8));
    for (std::size_t p = 0; p + 1 < m->panels.size(); ++p) {
        CHECK(m->panels[p].length == doctest::Approx(m->panels[p + 1].length).epsilon(1e-10));
    }
}

TEST_CASE("mesh on two_squares is graded toward every corner") {
    const int depth = 8;
    const auto m = build_mesh(squares(), 10.0, 30.0, depth);
    double sum = 0.0;
    for (double w : m->weight) sum += w;
    CHECK(sum == doctest::Approx(8.0).epsilon(1e-8));
    const Boundary& b = *m->boundary;
    for (const CornerParam& c : b.corner_params()) {
        double shortest = 1e300;
        bool touching = false;
        for (const Panel& P : m->panels) {
            if (P.arc != c.arc) continue;
            if ((c.t == 0.0 && P.t0 == 0.0) || (c.t == 1.0 && P.t1 == 1.0)) {
                touching = true;
                shortest = std::min(shortest, P.length);
            }
        }
        CHECK(touching);
        CHECK(shortest <= b.arcs()[c.arc].length() * std::ldexp(1.0, -depth) * (1.0 + 1e-12));
    }
    // Adjacent panels on one arc share endpoints; graded panels double away from corners.
    for (std::size_t p = 0; p + 1 < m->panels.size(); ++p) {
        const Panel& P = m->panels[p];
        const Panel& Q = m->panels[p + 1];
        if (P.arc != Q.arc) continue;
        CHECK(P.t1 == Q.t0);
        const double r = P.length / Q.length;
        const double d0 = std::min(P.t0, 1.0 - P.t1), d1 = std::min(Q.t0, 1.0 - Q.t1);
        const bool facing = P.arc == b.facing()->arc1 || P.arc == b.facing()->arc2;
        if (!facing) CHECK(((r >= 0.25 - 1e-9 && r <= 4.0 + 1e-9)));
        if (!facing && std::max(P.length, Q.length) < 0.1 * b.arcs()[P.arc].length() && d0 > 0.0 && d1 > 0.0) {
            // Inside the graded zone each panel is half the next one away from the corner.
            CHECK(std::max(r, 1.0 / r) == doctest::Approx(2.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("doubling ppw roughly doubles the node count on smooth arcs") {
    const auto a = build_mesh(circle(), 20.0, 30.0, 10);
    const auto b = build_mesh(circle(), 20.0, 60.0, 10);
    const double r = static_cast<double>(b->size()) / a->size();
    CHECK(r > 1.8);
    CHECK(r < 2.2);
}

TEST_CASE("mesh argument errors") {
    CHECK_THROWS_AS(build_mesh(circle(), 10.0, 5.0, 10), InvalidInput);
    CHECK_THROWS_AS(build_mesh(squares(), 10.0, 30.0, 4), InvalidInput);
    CHECK_THROWS_AS(build_mesh(circle(), 0.0, 30.0, 10), InvalidInput);
    CHECK_THROWS_AS(build_mesh(circle(), 500.0, 30.0, 10, 2000), InvalidInput);
}

TEST_CASE("S and D' act diagonally on Fourier modes of the circle") {
    const double k = 5.0;
    const auto m = build_mesh(circle(), k, 30.0, 10);
    const auto L = assemble_layers(k, m, false);
    const int nmax = static_cast<int>(3 * k);
    const auto s = circle_symbols_S(k, 1.0, nmax);
    const auto d = circle_symbols_Dp(k, 1.0, nmax);
    for (int n = -nmax; n <= nmax; ++n) {
        const Eigen::VectorXcd v = fourier_mode(*m, n);
        const Eigen::VectorXcd Sv = L.S.m * v, Dv = L.Dp.m * v;
        const cplx ls = s[std::abs(n)], ld = d[std::abs(n)];
        CHECK((Sv - ls * v).norm() / (std::abs(ls) * v.norm()) < 1e-6);
        CHECK((Dv - ld * v).norm() / v.norm() < 1e-6 * std::max(std::abs(ld), 1.0));
    }
}

TEST_CASE("circle eigenvalue oracle") {
    const auto lam = circle_eigenvalues(5.0, 5.0, 1.0, 40);
    CHECK(lam.size() == 41);
    // Low-frequency breakdown: D'_0 -> -1/2 and k S_0 -> 0, so lambda_0 -> 0.
    const auto small = circle_eigenvalues(1e-4, 1e-4, 1.0, 0);
    CHECK(std::abs(small[0]) < 2e-3);
    CHECK(std::abs(circle_eigenvalues(1e-2, 1e-2, 1.0, 0)[0]) > std::abs(small[0]));
    CHECK_THROWS_AS(circle_eigenvalues(0.0, 1.0, 1.0, 4), InvalidInput);
}

TEST_CASE("circle eigenvalues at orders where Y_n overflows") {
    // Reference values from 40-digit arithmetic.
    const auto lam = circle_eigenvalues(5.0, 5.0, 1.0, 2000);
    CHECK(lam[140].real() == doctest::Approx(0.50000228217892156).epsilon(1e-12));
    CHECK(lam[140].imag() == doctest::Approx(-0.017868542831159453).epsilon(1e-10));
    CHECK(lam[160].real() == doctest::Approx(0.50000152817685712).epsilon(1e-12));
    CHECK(lam[160].imag() == doctest::Approx(-0.015632635286146991).epsilon(1e-10));
    CHECK(lam[2000].real() == doctest::Approx(0.50000000078125752).epsilon(1e-12));
    CHECK(lam[2000].imag() == doctest::Approx(-0.0012500039062692872).epsilon(1e-10));
}

TEST_CASE("A' on the circle matches the eigenvalue oracle") {
    const double k = 5.0;
    const auto m = build_mesh(circle(), k, 30.0, 10);
    const auto ap = assemble_combined(OperatorKind::Ap, k, k, m);
    CHECK(ap.l2_scaled);
    const auto sv = singular_values(ap.m);
    const auto lam = circle_eigenvalues(k, k, 1.0, 400);
    double lo = 1e300, hi = 0.0;
    for (const cplx& l : lam) lo = std::min(lo, std::abs(l)), hi = std::max(hi, std::abs(l));
    CHECK(sv.front() == doctest::Approx(hi).epsilon(1e-6));
    // |lambda_n| decreases to 1/2, which is the infimum of the continuous spectrum.
    CHECK(std::abs(sv.back() - std::min(lo, 0.5)) < 1e-4);
}

TEST_CASE("A and A' have the same singular values") {
    for (const auto& b : {circle(), squares()}) {
        const double k = 8.0;
        const auto m = build_mesh(b, k, 30.0, 10);
        const auto sa = singular_values(assemble_combined(OperatorKind::A, k, k, m).m);
        const auto sp = singular_values(assemble_combined(OperatorKind::Ap, k, k, m).m);
        CHECK(max_rel_diff(sa, sp) < 1e-8);
    }
}

TEST_CASE("scaled D is the transpose of scaled D'") {
    const double k = 6.0;
    for (const auto& b : {circle(), squares()}) {
        const auto m = build_mesh(b, k, 30.0, 10);
        const auto L = assemble_layers(k, m, true);
        const auto D = l2_scale(L.D), Dp = l2_scale(L.Dp);
        const double err = (D.m.transpose() - Dp.m).cwiseAbs().maxCoeff();
        CHECK(err <= 1e-8);
    }
}

TEST_CASE("l2 scaling is a similarity") {
    const double k = 4.0;
    const auto m = build_mesh(circle(), k, 20.0, 10);
    const auto un = combine(assemble(OperatorKind::S, k, m), assemble(OperatorKind::Dp, k, m), k);
    const auto sc = l2_scale(un);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> e1(un.m, false), e2(sc.m, false);
    std::vector<cplx> a(e1.eigenvalues().data(), e1.eigenvalues().data() + m->size());
    std::vector<cplx> c(e2.eigenvalues().data(), e2.eigenvalues().data() + m->size());
    auto key = [](const cplx& x, const cplx& y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); };
    std::sort(a.begin(), a.end(), key);
    std::sort(c.begin(), c.end(), key);
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - c[i]));
    CHECK(err < 1e-8);
    // Unequal weights on a graded mesh make the singular values differ.
    const auto ms = build_mesh(squares(), k, 20.0, 8);
    const auto us = assemble(OperatorKind::S, k, ms);
    CHECK(std::abs(singular_values(us.m).front() - singular_values(l2_scale(us).m).front()) > 1e-3);
}

TEST_CASE("operator errors") {
    const auto m = build_mesh(circle(), 5.0, 20.0, 10);
    CHECK_THROWS_AS(assemble_combined(OperatorKind::Ap, 5.0, 0.0, m), InvalidInput);
    CHECK_THROWS_AS(assemble(OperatorKind::S, 0.0, m), InvalidInput);
    CHECK_THROWS_AS(assemble(OperatorKind::S, -1.0, m), InvalidInput);
    CHECK_THROWS_AS(assemble(OperatorKind::Ap, 5.0, m), InvalidInput);
    CHECK_THROWS_AS(assemble(OperatorKind::S, 80.0, m), NumericalFailure);
}

TEST_CASE("assembly does not depend on the thread count") {
    const auto m = build_mesh(squares(), 6.0, 20.0, 8);
#ifdef _OPENMP
    omp_set_num_threads(3);
#endif
    const auto a = assemble_combined(OperatorKind::Ap, 6.0, 6.0, m);
#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    const auto b = assemble_combined(OperatorKind::Ap, 6.0, 6.0, m);
    CHECK(a.m == b.m);
}

TEST_CASE("matrix dump round trip") {
    const auto m = build_mesh(circle(), 3.0, 20.0, 10);
    const auto op = assemble_combined(OperatorKind::Ap, 3.0, 3.0, m);
    const auto path = (std::filesystem::temp_directory_path() / "helmlab_dump_test.bin").string();
    write_matrix_dump(op, path);
    const auto back = read_matrix_dump(path);
    CHECK(back.m == op.m);
    CHECK(back.k == 3.0);
    CHECK(back.eta == 3.0);
    CHECK(back.kind == OperatorKind::Ap);
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("XXXX", f);
    std::fclose(f);
    CHECK_THROWS_AS(read_matrix_dump(path), InvalidInput);
    std::filesystem::remove(path);
}
