#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "smoothcolloc/assembly.hpp"
#include "smoothcolloc/lsq.hpp"

using namespace sc;

TEST_SUITE_BEGIN("assembly");

namespace {

std::string mirrored_squares() {
    return R"(patches 2
patch 0 degree 1
0 0   0 1
-1 0   -1 1
patch 1 degree 1
0 0   0 1
1 0   1 1
interfaces 1
0 S3 1 S3 same
boundary 6
0 S0
0 S1
0 S2
1 S0
1 S1
1 S2
)";
}

std::string unit_square() {
    return R"(patches 1
patch 0 degree 1
0 0   0 1
1 0   1 1
interfaces 0
boundary 4
0 S0
0 S1
0 S2
0 S3
)";
}

GlobalPointSet make_points(const MultiPatchDomain& dom, int s, int p, int r, int k,
                           PointFamily fam = PointFamily::greville) {
    auto uni = make_univariate(fam, p, r, k);
    auto set = tensor_and_globalize(dom, uni);
    assign_roles(dom, set);
    avoid_nonsmooth_loci(dom, set, s);
    return set;
}

// nested divergence-form bilaplacian oracle built on the jet algebra:
// (1/|detJ|) div( N grad( (1/|detJ|) div( N grad u ) ) ), N = |detJ| J^-1 J^-T
double divergence_form_bilaplacian(const Jet& f, const Jet& gx, const Jet& gy) {
    Jet j11 = gx.d1(), j12 = gx.d2(), j21 = gy.d1(), j22 = gy.d2();
    Jet det = j11 * j22 - j12 * j21;
    double sgn = det.value() > 0 ? 1.0 : -1.0;
    Jet adet = det * sgn;
    Jet idet = adet.reciprocal();
    Jet k11 = j22, k12 = j12 * (-1.0), k21 = j21 * (-1.0), k22 = j11;  // adj(J)
    // N = |detJ| J^{-1} J^{-T} = adj(J) adj(J)^T / |detJ|
    Jet n11 = (k11 * k11 + k12 * k12) * idet;
    Jet n12 = (k11 * k21 + k12 * k22) * idet;
    Jet n22 = (k21 * k21 + k22 * k22) * idet;
    auto lap = [&](const Jet& u) {
        Jet u1 = u.d1(), u2 = u.d2();
        Jet v1 = n11 * u1 + n12 * u2;
        Jet v2 = n12 * u1 + n22 * u2;
        return (v1.d1() + v2.d2()) * idet;
    };
    return lap(lap(f)).value();
}

}  // namespace

TEST_CASE("manufactured trig solution is internally consistent") {
    auto ms = ManufacturedSolution::trig();
    Vec2 x{0.7, -0.4};
    double u = std::cos(x[0] / 2) * std::sin(x[1] / 2);
    CHECK(ms.u(0, x, x) == doctest::Approx(u));
    CHECK(ms.lap(0, x, x) == doctest::Approx(-u / 2));
    CHECK(ms.bilap(0, x, x) == doctest::Approx(u / 4));
    auto dom = MultiPatchDomain::builtin("three-patch");
    CHECK(ms.validate_fd(dom) <= 1e-6);
}

TEST_CASE("chain rule equals the nested divergence form on bilinear patches") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> U(-0.3, 0.3);
    std::uniform_real_distribution<double> X(0.1, 0.9);
    int cases = 0;
    while (cases < 100) {
        GeometryMap q(1, {Vec2{U(rng), U(rng)}, Vec2{U(rng), 1 + U(rng)},
                          Vec2{1 + U(rng), U(rng)}, Vec2{1 + U(rng), 1 + U(rng)}});
        if (!q.is_regular()) continue;
        ++cases;
        Vec2 xi{X(rng), X(rng)};
        Jet f;
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; i + j <= 4; ++j) f.c[i][j] = U(rng) * 3.0;
        Jet gx, gy;
        q.jets(xi, gx, gy);
        double chain = chain_physical(f, gx, gy).bilaplacian();
        double divform = divergence_form_bilaplacian(f, gx, gy);
        double scale = std::max({1.0, std::abs(chain), std::abs(divform)});
        REQUIRE(std::abs(chain - divform) / scale <= 1e-9);
    }
}

TEST_CASE("identity geometry: bilaplacian row is the pure parametric form") {
    auto dom = MultiPatchDomain::load(unit_square());
    Jet f;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j) f.c[i][j] = U(rng);
    DerivativeTransfer T(dom.patch(0), {0.3, 0.6});
    CHECK(T.apply(f).bilaplacian() ==
          doctest::Approx(f.c[4][0] + 2 * f.c[2][2] + f.c[0][4]).epsilon(1e-12));
}

TEST_CASE("outward normals and averaged pairs on the unit square") {
    auto dom = MultiPatchDomain::load(unit_square());
    CHECK((outward_normal(dom, 0, 0, 0.5) - Vec2{0, -1}).norm() <= 1e-14);
    CHECK((outward_normal(dom, 0, 1, 0.3) - Vec2{1, 0}).norm() <= 1e-14);
    CHECK((outward_normal(dom, 0, 2, 0.7) - Vec2{0, 1}).norm() <= 1e-14);
    CHECK((outward_normal(dom, 0, 3, 0.2) - Vec2{-1, 0}).norm() <= 1e-14);

    auto space = assemble_space(dom, 4, 9, 4, 3);
    auto pts = make_points(dom, 4, 9, 4, 3);
    auto sys = assemble(space, pts, ManufacturedSolution::trig());
    REQUIRE(sys.A.rows() == 625);
    REQUIRE(sys.A.cols() == 625);
    int averaged = 0;
    for (const auto& rm : sys.rows) averaged += rm.kind == RowKind::normal_averaged;
    CHECK(averaged == 4);

    // a plain normal row on the bottom edge equals -d/dy of the basis functions
    for (size_t row = 0; row < sys.rows.size(); ++row) {
        if (sys.rows[row].kind != RowKind::normal) continue;
        const GlobalPoint& gp = pts.points[sys.rows[row].point];
        if (std::abs(gp.phys[1]) > 1e-14 || gp.phys[0] < 0.2 || gp.phys[0] > 0.8) continue;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sys.A, row); it; ++it) {
            PhysicalDerivs pd = space.eval_physical(static_cast<int>(it.col()), 0, gp.local);
            REQUIRE(it.value() == doctest::Approx(-pd.d[0][1]).epsilon(1e-10));
        }
        break;
    }
}

TEST_CASE("bilaplacian rows annihilate constants on the one-patch space") {
    auto dom = MultiPatchDomain::builtin("one-patch");
    auto space = assemble_space(dom, 4, 9, 4, 3);
    auto pts = make_points(dom, 4, 9, 4, 3);
    auto sys = assemble(space, pts, ManufacturedSolution::trig());
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(space.dim());
    Eigen::VectorXd r = sys.A * ones;
    for (size_t row = 0; row < sys.rows.size(); ++row)
        if (sys.rows[row].kind == RowKind::pde) REQUIRE(std::abs(r(row)) <= 1e-7);
}

TEST_CASE("matrix dimensions for the published cases") {
    auto three = MultiPatchDomain::builtin("three-patch");
    auto sp3 = assemble_space(three, 4, 9, 4, 3);
    auto pts3 = make_points(three, 4, 9, 4, 3);
    auto sys3 = assemble(sp3, pts3, ManufacturedSolution::trig());
    CHECK(sys3.A.rows() == 1795);
    CHECK(sys3.A.cols() == 1309);
    // row sparsity stays bounded by the local overlap
    int worst = 0;
    for (int rr = 0; rr < sys3.A.rows(); ++rr) {
        int cnt = 0;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sys3.A, rr); it; ++it)
            ++cnt;
        worst = std::max(worst, cnt);
    }
    CHECK(worst <= 400);

    auto L = MultiPatchDomain::builtin("two-patch-L");
    auto spL = assemble_space(L, 3, 7, 3, 3);
    auto ptsL = make_points(L, 3, 7, 3, 3);
    auto sysL = assemble(spL, ptsL, ManufacturedSolution::trig());
    CHECK(sysL.A.rows() == 758);
    CHECK(sysL.A.cols() == 678);
}

TEST_CASE("assembly is deterministic") {
    auto dom = MultiPatchDomain::load(mirrored_squares());
    auto space = assemble_space(dom, 4, 9, 4, 3);
    auto pts = make_points(dom, 4, 9, 4, 3);
    auto s1 = assemble(space, pts, ManufacturedSolution::trig());
    auto s2 = assemble(space, pts, ManufacturedSolution::trig());
    REQUIRE(s1.A.nonZeros() == s2.A.nonZeros());
    for (int i = 0; i < s1.A.nonZeros(); ++i)
        REQUIRE(s1.A.valuePtr()[i] == s2.A.valuePtr()[i]);
    REQUIRE((s1.b - s2.b).norm() == 0.0);
}

TEST_CASE("patch test: a representable polynomial is reproduced exactly") {
    auto dom = MultiPatchDomain::load(mirrored_squares());
    auto space = assemble_space(dom, 4, 9, 4, 3);
    ManufacturedSolution poly;
    auto q = [](const Vec2& x) {
        return 0.3 + 0.7 * x[0] - 0.4 * x[1] + 0.12 * x[0] * x[0] + 0.08 * x[0] * x[1] +
               0.02 * std::pow(x[0], 3) - 0.03 * std::pow(x[1], 4) + 0.015 * std::pow(x[0], 4);
    };
    poly.u = [q](int, const Vec2&, const Vec2& x) { return q(x); };
    poly.grad = [](int, const Vec2&, const Vec2& x) {
        return Vec2{0.7 + 0.24 * x[0] + 0.08 * x[1] + 0.06 * x[0] * x[0] + 0.06 * std::pow(x[0], 3),
                    -0.4 + 0.08 * x[0] - 0.12 * std::pow(x[1], 3)};
    };
    poly.lap = [](int, const Vec2&, const Vec2& x) {
        return 0.24 + 0.12 * x[0] + 0.18 * x[0] * x[0] - 0.36 * x[1] * x[1];
    };
    poly.grad_lap = [](int, const Vec2&, const Vec2& x) {
        return Vec2{0.12 + 0.36 * x[0], -0.72 * x[1]};
    };
    poly.bilap = [](int, const Vec2&, const Vec2&) { return 0.36 - 0.72; };
    auto pts = make_points(dom, 4, 9, 4, 3);
    auto sys = assemble(space, pts, poly);
    auto rep = solve_qr(sys);
    CHECK(rep.residual <= 1e-9 * std::max(1.0, sys.b.norm()));
    // boundary rows evaluated at the solution match the data tightly
    Eigen::VectorXd r = sys.A * rep.c - sys.b;
    for (size_t row = 0; row < sys.rows.size(); ++row)
        if (sys.rows[row].kind != RowKind::pde)
            REQUIRE(std::abs(r(row)) <= 1e-9 * std::max(1.0, std::abs(sys.b(row))));
}

TEST_CASE("matrix dump format") {
    auto dom = MultiPatchDomain::load(unit_square());
    auto space = assemble_space(dom, 4, 9, 4, 0);
    auto pts = make_points(dom, 4, 9, 4, 0);
    auto sys = assemble(space, pts, ManufacturedSolution::trig());
    std::ostringstream mo, ro;
    sys.dump(mo, ro);
    std::istringstream mi(mo.str());
    int rr, cc;
    double vv;
    REQUIRE((mi >> rr >> cc >> vv));
    CHECK(rr >= 0);
    CHECK(cc >= 0);
}

TEST_SUITE_END();
