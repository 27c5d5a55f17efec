#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "smoothcolloc/bspline.hpp"

using sc::BasisEval;
using sc::SplineSpace1D;

TEST_SUITE_BEGIN("bspline");

TEST_CASE("open uniform knot vector and dimension") {
    auto s = SplineSpace1D::make(9, 4, 1);
    CHECK(s.dim() == 15);
    REQUIRE(s.knots().size() == 25);
    for (int i = 0; i < 10; ++i) CHECK(s.knots()[i] == 0.0);
    for (int i = 10; i < 15; ++i) CHECK(s.knots()[i] == doctest::Approx(0.5));
    for (int i = 15; i < 25; ++i) CHECK(s.knots()[i] == 1.0);

    CHECK(SplineSpace1D::make(9, 4, 0).dim() == 10);
    CHECK(SplineSpace1D::make(7, 3, 2).dim() == 16);
    CHECK(SplineSpace1D::make(8, 3, 2).dim() == 19);

    CHECK_THROWS(SplineSpace1D::make(9, 9, 1));
    CHECK_THROWS(SplineSpace1D::make(9, -1, 1));
    CHECK_THROWS(SplineSpace1D::make(0, 0, 1));
    CHECK_THROWS(SplineSpace1D::make(9, 4, -1));
}

TEST_CASE("endpoint interpolation and span convention") {
    auto s = SplineSpace1D::make(9, 4, 0);
    auto e = s.eval_basis(0.0, 0);
    CHECK(e.first == 0);
    CHECK(e.der[0][0] == doctest::Approx(1.0));
    for (int j = 1; j < e.count; ++j) CHECK(e.der[0][j] == doctest::Approx(0.0));

    auto s3 = SplineSpace1D::make(9, 4, 3);
    // right-continuous at inner knots, last span at x = 1
    CHECK(s3.find_span(0.25) == s3.find_span(0.25 + 1e-13));
    CHECK(s3.find_span(1.0) == s3.dim() - 1);
    CHECK_THROWS(s3.eval_basis(-0.1, 0));
    CHECK_THROWS(s3.eval_basis(1.1, 0));
}

TEST_CASE("partition of unity and vanishing derivative sums") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (auto [p, r, k] : {std::array<int, 3>{9, 4, 3}, {9, 8, 5}, {7, 3, 4}, {8, 3, 2}, {5, 4, 6}}) {
        auto s = SplineSpace1D::make(p, r, k);
        for (int it = 0; it < 2000; ++it) {
            double x = U(rng);
            auto e = s.eval_basis(x, 1);
            double s0 = 0.0, s1 = 0.0;
            for (int j = 0; j < e.count; ++j) {
                s0 += e.der[0][j];
                s1 += e.der[1][j];
            }
            REQUIRE(std::abs(s0 - 1.0) <= 1e-12);
            REQUIRE(std::abs(s1) <= 1e-12 / s.mesh_size());
        }
    }
}

// Independent value-only oracle: Cox-de Boor recursion in quad precision, so
// that central differences of order up to four stay above the roundoff floor.
using quad = __float128;

static quad basis_value_ld(const SplineSpace1D& s, int j, quad x) {
    const auto& t = s.knots();
    const int p = s.degree();
    const int m = static_cast<int>(t.size()) - 1;
    std::vector<quad> N(m, quad(0));
    const quad xe = (x >= quad(1)) ? quad(1) : x;
    for (int i = 0; i < m; ++i) {
        bool last = (x >= quad(1)) && t[i] < 1.0 && t[i + 1] == 1.0;
        N[i] = ((quad(t[i]) <= xe && xe < quad(t[i + 1])) || last) ? quad(1) : quad(0);
    }
    for (int d = 1; d <= p; ++d) {
        for (int i = 0; i + d < m; ++i) {
            quad a = 0, b = 0;
            if (t[i + d] > t[i]) a = (xe - quad(t[i])) / quad(t[i + d] - t[i]) * N[i];
            if (t[i + d + 1] > t[i + 1])
                b = (quad(t[i + d + 1]) - xe) / quad(t[i + d + 1] - t[i + 1]) * N[i + 1];
            N[i] = a + b;
        }
    }
    return N[j];
}

static quad fd_deriv_step(const SplineSpace1D& s, int j, quad xl, int d, quad h) {
    auto f = [&](quad t) { return basis_value_ld(s, j, t); };
    switch (d) {
        case 1: return (f(xl + h) - f(xl - h)) / (2 * h);
        case 2: return (f(xl + h) - 2 * f(xl) + f(xl - h)) / (h * h);
        case 3: return (f(xl + 2 * h) - 2 * f(xl + h) + 2 * f(xl - h) - f(xl - 2 * h)) / (2 * h * h * h);
        case 4: return (f(xl + 2 * h) - 4 * f(xl + h) + 6 * f(xl) - 4 * f(xl - h) + f(xl - 2 * h)) / (h * h * h * h);
        default: return quad(0);
    }
}

static double fd_deriv(const SplineSpace1D& s, int j, double x, int d, double step) {
    // one Richardson step kills the O(step^2) truncation term
    quad d1 = fd_deriv_step(s, j, quad(x), d, quad(step));
    quad d2 = fd_deriv_step(s, j, quad(x), d, quad(2.0) * quad(step));
    return static_cast<double>((quad(4) * d1 - d2) / quad(3));
}

TEST_CASE("derivatives match finite-difference oracle away from knots") {
    auto s = SplineSpace1D::make(9, 4, 3);
    const double step = 1e-4;
    // fourth derivative at x = 0.3 to relative 1e-6
    {
        auto e = s.eval_basis(0.3, 4);
        for (int j = 0; j < e.count; ++j) {
            double ref = fd_deriv(s, e.first + j, 0.3, 4, step);
            double scale = std::max(std::abs(ref), 1.0);
            CHECK(std::abs(e.der[4][j] - ref) / scale <= 1e-6);
        }
    }
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(0.05, 0.95);
    for (auto [p, r, k] : {std::array<int, 3>{9, 4, 3}, {8, 3, 3}, {7, 3, 2}, {6, 5, 4}}) {
        auto sp = SplineSpace1D::make(p, r, k);
        int tested = 0;
        while (tested < 25) {
            double x = U(rng);
            double dk = 1e9;
            for (int i = 1; i <= k; ++i) dk = std::min(dk, std::abs(x - i * sp.mesh_size()));
            if (dk < 5e-3) continue;  // keep the FD stencil inside one polynomial piece
            ++tested;
            auto e = sp.eval_basis(x, 4);
            for (int d = 1; d <= 4; ++d) {
                for (int j = 0; j < e.count; ++j) {
                    double ref = fd_deriv(sp, e.first + j, x, d, step);
                    double scale = std::max(std::abs(ref), 1.0);
                    REQUIRE(std::abs(e.der[d][j] - ref) / scale <= 1e-5);
                }
            }
        }
    }
}

TEST_CASE("greville points") {
    auto s0 = SplineSpace1D::make(9, 4, 0);
    auto g0 = s0.greville();
    REQUIRE(static_cast<int>(g0.size()) == s0.dim());
    for (int j = 0; j < 10; ++j) CHECK(g0[j] == doctest::Approx(j / 9.0).epsilon(1e-14));

    auto s = SplineSpace1D::make(9, 4, 4);
    auto g = s.greville();
    REQUIRE(g.size() == 30);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    for (size_t j = 0; j + 1 < g.size(); ++j) CHECK(g[j] <= g[j + 1]);
    // symmetry about 1/2 on uniform open knot vectors
    for (auto [p, r, k] : {std::array<int, 3>{9, 4, 4}, {8, 3, 5}, {7, 3, 1}, {9, 8, 7}}) {
        auto sp = SplineSpace1D::make(p, r, k);
        auto gp = sp.greville();
        int n = sp.dim();
        for (int j = 0; j < n; ++j) CHECK(std::abs(gp[j] + gp[n - 1 - j] - 1.0) <= 1e-14);
    }
}

TEST_CASE("degree-preserving knot refinement reproduces the spline") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto coarse = SplineSpace1D::make(9, 8, 3);
    auto fine = SplineSpace1D::make(9, 4, 3);
    std::vector<double> c(coarse.dim());
    for (auto& v : c) v = U(rng);
    auto cf = coarse.refine_to(fine, c);
    REQUIRE(static_cast<int>(cf.size()) == fine.dim());
    for (int it = 0; it <= 100; ++it) {
        double x = it / 100.0;
        CHECK(std::abs(coarse.eval_spline(c, x) - fine.eval_spline(cf, x)) <= 1e-13);
    }
}

TEST_CASE("greville interpolation roundtrip") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (auto [p, r, k] : {std::array<int, 3>{9, 4, 3}, {5, 4, 7}, {8, 7, 4}}) {
        auto s = SplineSpace1D::make(p, r, k);
        std::vector<double> c(s.dim());
        for (auto& v : c) v = U(rng);
        sc::Interpolant1D interp(s);
        std::vector<double> vals(s.dim());
        for (int i = 0; i < s.dim(); ++i) vals[i] = s.eval_spline(c, interp.nodes()[i]);
        auto c2 = interp.solve(vals);
        for (int i = 0; i < s.dim(); ++i) REQUIRE(std::abs(c2[i] - c[i]) <= 1e-11);
    }
}

TEST_SUITE_END();
