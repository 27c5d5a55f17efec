#include "smoothcolloc/points.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sc {

PointFamily family_from_string(const std::string& s) {
    if (s == "greville") return PointFamily::greville;
    if (s == "superconvergent") return PointFamily::superconvergent;
    throw std::invalid_argument("unknown point family '" + s + "'");
}

std::string to_string(PointFamily f) {
    return f == PointFamily::greville ? "greville" : "superconvergent";
}

std::string to_string(PointProvenance p) {
    switch (p) {
        case PointProvenance::root: return "root";
        case PointProvenance::greville: return "greville";
        case PointProvenance::added_boundary: return "added-boundary";
        case PointProvenance::added_knot: return "added-knot";
    }
    return "?";
}

UnivariatePoints greville_1d(int p, int r, int k) {
    auto space = SplineSpace1D::make(p, r, k);
    UnivariatePoints out;
    out.family = PointFamily::greville;
    out.p = p;
    out.r = r;
    out.k = k;
    out.points = space.greville();
    out.provenance.assign(out.points.size(), PointProvenance::greville);
    return out;
}

namespace {

// positive roots of the even sextic 4823 x^6 - 5915 x^4 + 1665 x^2 - 61,
// computed as cubic roots in y = x^2 polished by Newton iteration
std::vector<double> sextic_roots_94() {
    auto poly = [](long double y) {
        return ((4823.0L * y - 5915.0L) * y + 1665.0L) * y - 61.0L;
    };
    auto dpoly = [](long double y) { return (3 * 4823.0L * y - 2 * 5915.0L) * y + 1665.0L; };
    std::vector<double> roots;
    for (long double y : {0.043L, 0.356L, 0.828L}) {
        for (int it = 0; it < 60; ++it) {
            long double step = poly(y) / dpoly(y);
            y -= step;
            if (std::abs((double)step) < 1e-19) break;
        }
        roots.push_back(std::sqrt((double)y));
    }
    return roots;
}

}  // namespace

std::vector<double> superconvergent_reference_roots(int p, int r) {
    std::vector<double> pos;
    bool with_zero = false;
    if (p == 9 && r == 4) {
        pos = sextic_roots_94();
    } else if (p == 8 && r == 3) {
        // roots of 3003 x^5 - 2530 x^3 + 375 x
        double s = std::sqrt(4741.0);
        pos = {std::sqrt(5.0 * (253.0 - 2.0 * s) / 3003.0), std::sqrt(5.0 * (253.0 + 2.0 * s) / 3003.0)};
        with_zero = true;
    } else if (p == 7 && r == 3) {
        // roots of 495 x^4 - 390 x^2 + 31
        double s = std::sqrt(70.0);
        pos = {std::sqrt((65.0 - 6.0 * s) / 165.0), std::sqrt((65.0 + 6.0 * s) / 165.0)};
    } else {
        throw std::invalid_argument("superconvergent points are available for (9,4), (8,3), (7,3) only");
    }
    std::vector<double> out;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
    if (with_zero) out.push_back(0.0);
    for (double v : pos) out.push_back(v);
    return out;
}

UnivariatePoints superconvergent_1d(int p, int r, int k) {
    auto space = SplineSpace1D::make(p, r, k);
    const auto ref = superconvergent_reference_roots(p, r);
    const double h = space.mesh_size();

    UnivariatePoints out;
    out.family = PointFamily::superconvergent;
    out.p = p;
    out.r = r;
    out.k = k;
    std::vector<std::pair<double, PointProvenance>> pts;
    for (int span = 0; span <= k; ++span) {
        double a = span * h, b = (span + 1) * h;
        for (double x : ref) pts.push_back({a + (b - a) * (x + 1.0) / 2.0, PointProvenance::root});
    }
    pts.push_back({0.0, PointProvenance::added_boundary});
    pts.push_back({1.0, PointProvenance::added_boundary});

    auto greville = space.greville();
    if (p == 9) {
        if (k == 0) {
            pts.push_back({greville[1], PointProvenance::greville});
            pts.push_back({greville[space.dim() - 2], PointProvenance::greville});
        } else if (k == 1) {
            pts.push_back({h, PointProvenance::added_knot});
        } else {
            // for each of the k-2 most inner knots (at least two spans away from
            // the boundary) drop the closest point right of the knot
            std::sort(pts.begin(), pts.end());
            for (int knot = 2; knot <= k - 1; ++knot) {
                double x = knot * h;
                auto it = std::upper_bound(pts.begin(), pts.end(),
                                           std::make_pair(x + 1e-14, PointProvenance::added_knot));
                if (it == pts.end()) throw std::logic_error("no point right of an inner knot");
                out.removed.push_back(it->first);
                pts.erase(it);
            }
        }
    } else {
        // p = 7, 8: append the first two and last two Greville points
        pts.push_back({greville[1], PointProvenance::greville});
        pts.push_back({greville[space.dim() - 2], PointProvenance::greville});
        // greville[0] = 0 and greville[n-1] = 1 are already present as boundary points
    }

    std::sort(pts.begin(), pts.end());
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        if (pts[i + 1].first - pts[i].first < 1e-13)
            throw std::logic_error("collocation points collide");
    if (static_cast<int>(pts.size()) != space.dim())
        throw std::logic_error("collocation point count does not match the space dimension");
    for (auto& [x, prov] : pts) {
        out.points.push_back(x);
        out.provenance.push_back(prov);
    }
    return out;
}

UnivariatePoints make_univariate(PointFamily f, int p, int r, int k) {
    return f == PointFamily::greville ? greville_1d(p, r, k) : superconvergent_1d(p, r, k);
}

GlobalPointSet::RowCounts GlobalPointSet::row_counts() const {
    RowCounts rc;
    for (size_t i = 0; i < points.size(); ++i) {
        const auto& pt = points[i];
        if (pt.role == PointRole::pde) ++rc.pde;
        if (pt.value_row) ++rc.value;
        if (pt.normal == NormalMode::plain) ++rc.normal_plain;
        if (pt.normal == NormalMode::averaged && pt.partner > static_cast<int>(i)) ++rc.normal_pairs;
    }
    return rc;
}

GlobalPointSet tensor_and_globalize(const MultiPatchDomain& dom, const UnivariatePoints& uni) {
    const int n = static_cast<int>(uni.points.size());
    if (n < 4) throw std::invalid_argument("need at least four collocation points per direction");
    // reversed interfaces identify point i with point n-1-i, which only works
    // for families symmetric under x -> 1-x (clustered superconvergent sets
    // are not, their knot-adjacent removals all sit right of the knots)
    bool symmetric = true;
    for (int i = 0; i < n; ++i)
        if (std::abs(uni.points[i] + uni.points[n - 1 - i] - 1.0) > 1e-12) symmetric = false;
    if (!symmetric)
        for (const Edge& e : dom.edges())
            if (e.inner && e.reversed)
                throw std::invalid_argument(
                    "reversed interface orientation requires a symmetric collocation family");

    GlobalPointSet set;
    set.n1 = n;
    set.mesh_lines = uni.k + 1;
    set.grid.assign(dom.patch_count(), std::vector<int>(static_cast<size_t>(n) * n, -1));

    auto side_index_of = [n](int side, int i1, int i2) {
        // natural parameter index of a point on the given side
        return (side == 0 || side == 2) ? i1 : i2;
    };
    auto point_on_side = [n](int side, int t) -> std::pair<int, int> {
        switch (side) {
            case 0: return {t, 0};
            case 1: return {n - 1, t};
            case 2: return {t, n - 1};
            case 3: return {0, t};
        }
        throw std::logic_error("bad side");
    };

    for (int p = 0; p < dom.patch_count(); ++p) {
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                int existing = -1;
                // corner shared with a lower patch?
                int corner = -1;
                if (i1 == 0 && i2 == 0) corner = 0;
                if (i1 == n - 1 && i2 == 0) corner = 1;
                if (i1 == n - 1 && i2 == n - 1) corner = 2;
                if (i1 == 0 && i2 == n - 1) corner = 3;
                if (corner >= 0) {
                    const Vertex& v = dom.vertices()[dom.vertex_at(p, corner)];
                    for (const PatchCorner& m : v.fan) {
                        if (m.patch >= p || set.grid[m.patch].empty()) continue;
                        int mi1 = (m.corner == 1 || m.corner == 2) ? n - 1 : 0;
                        int mi2 = (m.corner == 2 || m.corner == 3) ? n - 1 : 0;
                        int id = set.grid_id(m.patch, mi1, mi2);
                        if (id >= 0) { existing = id; break; }
                    }
                } else {
                    int side = -1;
                    if (i1 == 0) side = 3;
                    else if (i1 == n - 1) side = 1;
                    else if (i2 == 0) side = 0;
                    else if (i2 == n - 1) side = 2;
                    if (side >= 0) {
                        const Edge& e = dom.edges()[dom.edge_at(p, side)];
                        if (e.inner) {
                            PatchSide other = (e.a.patch == p && e.a.side == side) ? e.b : e.a;
                            if (other.patch < p) {
                                int t = side_index_of(side, i1, i2);
                                int to = e.reversed ? n - 1 - t : t;
                                auto [oi1, oi2] = point_on_side(other.side, to);
                                existing = set.grid_id(other.patch, oi1, oi2);
                            }
                        }
                    }
                }
                if (existing >= 0) {
                    set.grid[p][static_cast<size_t>(i1) * n + i2] = existing;
                    continue;
                }
                GlobalPoint gp;
                gp.owner = p;
                gp.local = {uni.points[i1], uni.points[i2]};
                gp.phys = dom.patch(p).eval(gp.local);
                int id = static_cast<int>(set.points.size());
                set.points.push_back(gp);
                set.grid[p][static_cast<size_t>(i1) * n + i2] = id;
            }
    }
    return set;
}

void assign_roles(const MultiPatchDomain& dom, GlobalPointSet& set) {
    const int n = set.n1;
    if (n < 4) throw std::invalid_argument("a patch side has fewer than four points per direction");

    // classify: boundary membership, inner-closure membership, ring omission
    for (int p = 0; p < dom.patch_count(); ++p) {
        auto side_of = [&](int i1, int i2, int which) -> int {
            // sides the point lies on (which = 0 or 1), -1 if none
            int sides[2] = {-1, -1};
            int cnt = 0;
            if (i2 == 0) sides[cnt++] = 0;
            if (i1 == n - 1) sides[cnt++] = 1;
            if (i2 == n - 1 && cnt < 2) sides[cnt++] = 2;
            if (i1 == 0 && cnt < 2) sides[cnt++] = 3;
            return which < cnt ? sides[which] : -1;
        };
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                GlobalPoint& gp = set.points[set.grid_id(p, i1, i2)];
                for (int w = 0; w < 2; ++w) {
                    int s = side_of(i1, i2, w);
                    if (s < 0) continue;
                    if (dom.side_is_boundary(p, s))
                        gp.on_boundary = true;
                    else
                        gp.on_inner_closure = true;
                }
            }
    }
    for (int p = 0; p < dom.patch_count(); ++p) {
        bool b0 = dom.side_is_boundary(p, 0), b1 = dom.side_is_boundary(p, 1);
        bool b2 = dom.side_is_boundary(p, 2), b3 = dom.side_is_boundary(p, 3);
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                GlobalPoint& gp = set.points[set.grid_id(p, i1, i2)];
                if (gp.on_boundary) continue;
                bool ring = (b3 && i1 == 1) || (b1 && i1 == n - 2) || (b0 && i2 == 1) ||
                            (b2 && i2 == n - 2);
                if (ring) gp.role = PointRole::omitted_ring;
            }
    }
    for (auto& gp : set.points) {
        if (!gp.on_boundary) continue;
        gp.role = PointRole::boundary;
        gp.value_row = true;
        gp.normal = NormalMode::plain;
    }
    // corner handling per boundary vertex: no normal at the vertex point, the
    // two nearest boundary points pair into one averaged row
    for (size_t vid = 0; vid < dom.vertices().size(); ++vid) {
        const Vertex& v = dom.vertices()[vid];
        if (v.inner) continue;
        // the vertex point itself
        {
            const PatchCorner& m = v.fan.front();
            int mi1 = (m.corner == 1 || m.corner == 2) ? n - 1 : 0;
            int mi2 = (m.corner == 2 || m.corner == 3) ? n - 1 : 0;
            set.points[set.grid_id(m.patch, mi1, mi2)].normal = NormalMode::none;
        }
        int adj[2] = {-1, -1};
        int which = 0;
        for (int fe : {v.fan_edges.front(), v.fan_edges.back()}) {
            const Edge& e = dom.edges()[fe];
            const PatchCorner* member = nullptr;
            for (const PatchCorner& m : v.fan)
                if (m.patch == e.a.patch) {
                    auto [c0, c1] = MultiPatchDomain::side_corners(e.a.side);
                    if (m.corner == c0 || m.corner == c1) { member = &m; break; }
                }
            if (!member) throw std::logic_error("boundary fan edge without member");
            auto [c0, c1] = MultiPatchDomain::side_corners(e.a.side);
            int t = (member->corner == c0) ? 1 : n - 2;  // adjacent index along the side
            int i1, i2;
            switch (e.a.side) {
                case 0: i1 = t; i2 = 0; break;
                case 1: i1 = n - 1; i2 = t; break;
                case 2: i1 = t; i2 = n - 1; break;
                default: i1 = 0; i2 = t; break;
            }
            adj[which++] = set.grid_id(e.a.patch, i1, i2);
        }
        if (adj[0] < 0 || adj[1] < 0 || adj[0] == adj[1])
            throw std::logic_error("could not identify the averaged pair at a boundary vertex");
        for (int id : {adj[0], adj[1]}) {
            set.points[id].normal = NormalMode::averaged;
            set.points[id].pair_vertex = static_cast<int>(vid);
        }
        set.points[adj[0]].partner = adj[1];
        set.points[adj[1]].partner = adj[0];
    }
}

void avoid_nonsmooth_loci(const MultiPatchDomain& dom, GlobalPointSet& set, int smoothness) {
    if (smoothness >= 4) return;  // the approximant is C4, knot lines and interfaces are fine
    for (auto& gp : set.points) {
        if (!gp.on_inner_closure) continue;
        if (gp.role == PointRole::pde) gp.role = PointRole::omitted_interface;
        if (gp.on_boundary) {
            // interface endpoint on the domain boundary: drop its equations
            gp.value_row = false;
            if (gp.normal == NormalMode::averaged)
                throw std::logic_error("averaged pair member on an inner-edge closure");
            gp.normal = NormalMode::none;
        }
    }
    (void)dom;
    // no remaining PDE point may sit on an inner knot line of its owner patch
    if (set.mesh_lines > 0) {
        const double h = 1.0 / set.mesh_lines;
        for (const auto& gp : set.points) {
            if (gp.role != PointRole::pde) continue;
            for (double x : {gp.local[0], gp.local[1]})
                for (int i = 1; i < set.mesh_lines; ++i)
                    if (std::abs(x - i * h) < 1e-12)
                        throw std::runtime_error(
                            "collocation point sits on an inner knot line where the "
                            "approximant is not smooth enough");
        }
    }
}

}  // namespace sc
