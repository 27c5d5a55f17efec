#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <set>

#include "smoothcolloc/points.hpp"

using namespace sc;

TEST_SUITE_BEGIN("points");

TEST_CASE("superconvergent reference roots") {
    auto r94 = superconvergent_reference_roots(9, 4);
    REQUIRE(r94.size() == 6);
    const double expect94[6] = {-0.9098737952346008, -0.5963052503103114, -0.2072795685478027,
                                0.2072795685478027,  0.5963052503103114,  0.9098737952346008};
    for (int i = 0; i < 6; ++i) CHECK(std::abs(r94[i] - expect94[i]) <= 1e-12);

    auto r83 = superconvergent_reference_roots(8, 3);
    REQUIRE(r83.size() == 5);
    const double expect83[5] = {-0.80655597073860453, -0.43813046978810981, 0.0,
                                0.43813046978810981, 0.80655597073860453};
    for (int i = 0; i < 5; ++i) CHECK(std::abs(r83[i] - expect83[i]) <= 1e-14);
    for (double x : r83)  // quintic residual as an independent cross-check
        CHECK(std::abs(((3003.0 * x * x - 2530.0) * x * x + 375.0) * x) <= 1e-11);

    auto r73 = superconvergent_reference_roots(7, 3);
    REQUIRE(r73.size() == 4);
    const double expect73[4] = {-0.83557130371270451, -0.29949855473881538, 0.29949855473881538,
                                0.83557130371270451};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(r73[i] - expect73[i]) <= 1e-14);
    for (double x : r73)
        CHECK(std::abs((495.0 * x * x - 390.0) * x * x + 31.0) <= 1e-11);

    CHECK_THROWS(superconvergent_reference_roots(6, 3));
    CHECK_THROWS(superconvergent_reference_roots(9, 5));
}

TEST_CASE("cardinality matches the space dimension for k = 0..32") {
    for (auto [p, r] : {std::pair<int, int>{9, 4}, {8, 3}, {7, 3}}) {
        for (int k = 0; k <= 32; ++k) {
            int dim = SplineSpace1D::make(p, r, k).dim();
            auto g = greville_1d(p, r, k);
            REQUIRE(static_cast<int>(g.points.size()) == dim);
            auto s = superconvergent_1d(p, r, k);
            REQUIRE(static_cast<int>(s.points.size()) == dim);
            for (size_t i = 0; i + 1 < s.points.size(); ++i) REQUIRE(s.points[i] < s.points[i + 1]);
            REQUIRE(s.points.front() == 0.0);
            REQUIRE(s.points.back() == 1.0);
        }
    }
}

TEST_CASE("superconvergent clustering rules") {
    // k = 4: 6*5 + 2 raw points, two removed next to the two most inner knots
    auto s4 = superconvergent_1d(9, 4, 4);
    CHECK(s4.points.size() == 30);
    REQUIRE(s4.removed.size() == 2);
    CHECK(s4.removed[0] > 2.0 / 5.0);
    CHECK(s4.removed[0] < 2.0 / 5.0 + 0.02);
    CHECK(s4.removed[1] > 3.0 / 5.0);

    // k = 0: 6 roots + 2 boundary + second and second-last Greville points
    auto s0 = superconvergent_1d(9, 4, 0);
    REQUIRE(s0.points.size() == 10);
    int roots = 0, bnd = 0, grev = 0;
    for (auto pr : s0.provenance) {
        roots += pr == PointProvenance::root;
        bnd += pr == PointProvenance::added_boundary;
        grev += pr == PointProvenance::greville;
    }
    CHECK(roots == 6);
    CHECK(bnd == 2);
    CHECK(grev == 2);
    CHECK(std::count(s0.points.begin(), s0.points.end(), 1.0 / 9.0) == 1);

    // k = 1: the inner knot itself joins the set
    auto s1 = superconvergent_1d(9, 4, 1);
    bool has_knot = false;
    for (size_t i = 0; i < s1.points.size(); ++i)
        if (s1.points[i] == 0.5 && s1.provenance[i] == PointProvenance::added_knot) has_knot = true;
    CHECK(has_knot);

    // symmetry under x -> 1 - x holds whenever no clustering removal fires;
    // the removals sit right of their knots, so clustered (9,4) sets with
    // k >= 3 are deliberately asymmetric
    for (auto [p, r] : {std::pair<int, int>{9, 4}, {8, 3}, {7, 3}})
        for (int k : {0, 1, 2, 5, 9}) {
            if (p == 9 && k > 2) continue;
            auto s = superconvergent_1d(p, r, k);
            int n = static_cast<int>(s.points.size());
            for (int i = 0; i < n; ++i)
                REQUIRE(std::abs(s.points[i] + s.points[n - 1 - i] - 1.0) <= 1e-13);
        }
}

TEST_CASE("greville points avoid inner knots for the odd-regularity spaces") {
    for (auto [p, r] : {std::pair<int, int>{7, 3}, {8, 3}}) {
        for (int k : {1, 2, 3, 7, 15}) {
            auto g = greville_1d(p, r, k);
            double h = 1.0 / (k + 1);
            double dmin = 1.0;
            for (double x : g.points)
                if (x > 0.0 && x < 1.0)
                    for (int i = 1; i <= k; ++i) dmin = std::min(dmin, std::abs(x - i * h));
            CHECK(dmin > 1e-6);
        }
    }
}

TEST_CASE("tensorize and deduplicate global points") {
    std::string two = R"(patches 2
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
    auto dom = MultiPatchDomain::load(two);
    auto uni = greville_1d(9, 4, 3);  // 25 points
    auto set = tensor_and_globalize(dom, uni);
    CHECK(set.points.size() == 2 * 625 - 25);

    auto one = MultiPatchDomain::builtin("one-patch");
    auto set1 = tensor_and_globalize(one, uni);
    CHECK(set1.points.size() == 625);
    for (const auto& gp : set1.points) CHECK(gp.owner == 0);

    auto three = MultiPatchDomain::builtin("three-patch");
    auto set3 = tensor_and_globalize(three, uni);
    // inclusion-exclusion: 3*625 - 3*25 shared-edge points + 1 center copy
    CHECK(set3.points.size() == 3 * 625 - 3 * 25 + 1);

    // dedup: no two points closer than 1e-12 in physical space on shared edges
    for (size_t i = 0; i < set.points.size(); ++i)
        for (size_t j = i + 1; j < set.points.size(); ++j)
            REQUIRE((set.points[i].phys - set.points[j].phys).norm() > 1e-12);
}

TEST_CASE("one-patch role assignment gives the square split") {
    auto one = MultiPatchDomain::builtin("one-patch");
    for (int k : {3, 7}) {
        auto uni = greville_1d(9, 4, k);
        int n = static_cast<int>(uni.points.size());
        auto set = tensor_and_globalize(one, uni);
        assign_roles(one, set);
        auto rc = set.row_counts();
        CHECK(rc.pde == (n - 4) * (n - 4));
        CHECK(rc.value == 4 * (n - 1));
        CHECK(rc.normal_plain + rc.normal_pairs == 4 * n - 12);
        CHECK(rc.normal_pairs == 4);
        CHECK(rc.total() == n * n);
    }
}

TEST_CASE("multi-patch row counts match the published matrix heights") {
    auto three = MultiPatchDomain::builtin("three-patch");
    auto set3 = tensor_and_globalize(three, greville_1d(9, 4, 3));
    assign_roles(three, set3);
    CHECK(set3.row_counts().total() == 1795);

    auto five = MultiPatchDomain::builtin("five-patch");
    auto set5 = tensor_and_globalize(five, greville_1d(9, 4, 3));
    assign_roles(five, set5);
    CHECK(set5.row_counts().total() == 2991);

    auto L = MultiPatchDomain::builtin("two-patch-L");
    auto setL = tensor_and_globalize(L, greville_1d(7, 3, 3));
    assign_roles(L, setL);
    avoid_nonsmooth_loci(L, setL, 3);
    CHECK(setL.row_counts().total() == 758);

    auto setL8 = tensor_and_globalize(L, superconvergent_1d(8, 3, 3));
    assign_roles(L, setL8);
    avoid_nonsmooth_loci(L, setL8, 3);
    CHECK(setL8.row_counts().total() == 1102);

    // smoothness 4 keeps interface collocation points
    auto setL4 = tensor_and_globalize(L, greville_1d(9, 4, 3));
    assign_roles(L, setL4);
    int before = setL4.row_counts().total();
    avoid_nonsmooth_loci(L, setL4, 4);
    CHECK(setL4.row_counts().total() == before);
}

TEST_SUITE_END();
