#include "smoothcolloc/smooth_space.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <memory>
#include <set>
#include <sstream>

namespace sc {

namespace {

double binom(int n, int k) {
    double b = 1.0;
    for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
    return b;
}

// derivative scale attached to the level-l trace of an interface function
double level_scale(int p, int l, double h) {
    double c = 1.0;
    for (int m = 0; m < l; ++m) c *= (p - m) / h;
    return c;
}

AxisMap compose_swap(const AxisMap& v) { return AxisMap{!v.swap, v.flip1, v.flip2}; }

// scales a function to unit max-abs coefficient with a positive leading entry
void normalize_function(SmoothBasisFunction& fn) {
    double m = 0.0;
    for (const auto& b : fn.parts) m = std::max(m, b.a.cwiseAbs().maxCoeff());
    if (m == 0.0) return;
    double lead = 0.0;
    for (const auto& b : fn.parts) {
        for (int i = 0; i < b.a.rows() && lead == 0.0; ++i)
            for (int j = 0; j < b.a.cols() && lead == 0.0; ++j)
                if (std::abs(b.a(i, j)) > 1e-14 * m) lead = b.a(i, j);
        if (lead != 0.0) break;
    }
    double div = (lead < 0.0) ? -m : m;
    for (auto& b : fn.parts) b.a /= div;
    fn.scale = div;
}

}  // namespace

std::string to_string(FnOrigin o) {
    switch (o) {
        case FnOrigin::patch: return "patch";
        case FnOrigin::edge: return "edge";
        case FnOrigin::vertex: return "vertex";
    }
    return "?";
}

Eigen::MatrixXd corner_blending_coefficients(const SplineSpace1D& space, int s) {
    // T[m][j] = d^m N_j(0); invertible lower-triangular-like block
    Eigen::MatrixXd T(s + 1, s + 1);
    for (int m = 0; m <= s; ++m) {
        BasisEval e = space.eval_basis(0.0, s);
        for (int j = 0; j <= s; ++j) T(m, j) = e.der[m][j];
    }
    return T.fullPivLu().solve(Eigen::MatrixXd::Identity(s + 1, s + 1));
}

namespace {

// 1D coefficient data of one interface function on one side
struct EdgeSideData {
    // view-grid coefficients: rows = transversal index (0..s), cols = run index
    Eigen::MatrixXd view;
};

EdgeSideData edge_side_coefficients(const SpaceConfig& cfg, const SplineSpace1D& space1d,
                                    const std::vector<SplineSpace1D>& traces,
                                    const Interpolant1D& interp, const Eigen::MatrixXd& blend,
                                    const InterfaceGluing& gl, int side, int j1, int j2) {
    const int s = cfg.smoothness;
    const int n = space1d.dim();
    const double h = space1d.mesh_size();
    const SplineSpace1D& tr = traces[j1];
    const double scale = level_scale(cfg.p, j1, h);

    EdgeSideData out;
    out.view = Eigen::MatrixXd::Zero(s + 1, n);
    const auto& nodes = interp.nodes();
    for (int l = j1; l <= s; ++l) {
        std::vector<double> vals(n);
        for (int i = 0; i < n; ++i) {
            double x = nodes[i];
            double a = gl.alpha(side, x), b = gl.beta(side, x);
            double v = binom(l, j1) * scale * tr.eval_one(j2, x, l - j1);
            for (int q = 0; q < l - j1; ++q) v *= b;
            for (int q = 0; q < j1; ++q) v *= a;
            vals[i] = v;
        }
        auto coeffs = interp.solve(vals);
        for (int a = 0; a <= s; ++a) {
            if (blend(a, l) == 0.0) continue;
            for (int c = 0; c < n; ++c) out.view(a, c) += blend(a, l) * coeffs[c];
        }
    }
    return out;
}

PatchBlock view_grid_to_block(const Eigen::MatrixXd& view, const AxisMap& vw, int patch, int n) {
    // bounding box in native indices
    int rlo = n, rhi = -1, clo = n, chi = -1;
    for (int a = 0; a < view.rows(); ++a)
        for (int b = 0; b < view.cols(); ++b) {
            if (view(a, b) == 0.0) continue;
            auto [i, j] = vw.index(a, b, n, n);
            rlo = std::min(rlo, i);
            rhi = std::max(rhi, i);
            clo = std::min(clo, j);
            chi = std::max(chi, j);
        }
    PatchBlock blk;
    blk.patch = patch;
    if (rhi < 0) {
        blk.r0 = blk.c0 = 0;
        blk.a = Eigen::MatrixXd::Zero(1, 1);
        return blk;
    }
    blk.r0 = rlo;
    blk.c0 = clo;
    blk.a = Eigen::MatrixXd::Zero(rhi - rlo + 1, chi - clo + 1);
    for (int a = 0; a < view.rows(); ++a)
        for (int b = 0; b < view.cols(); ++b) {
            if (view(a, b) == 0.0) continue;
            auto [i, j] = vw.index(a, b, n, n);
            blk.a(i - rlo, j - clo) = view(a, b);
        }
    return blk;
}

double eval_block(const SplineSpace1D& sp, const PatchBlock& blk, const Vec2& xi, int d1, int d2) {
    BasisEval e1 = sp.eval_basis(xi[0], d1);
    BasisEval e2 = sp.eval_basis(xi[1], d2);
    double v = 0.0;
    for (int i = 0; i < e1.count; ++i) {
        int gi = e1.first + i;
        if (gi < blk.r0 || gi >= blk.r0 + blk.a.rows()) continue;
        double row = 0.0;
        for (int j = 0; j < e2.count; ++j) {
            int gj = e2.first + j;
            if (gj < blk.c0 || gj >= blk.c0 + blk.a.cols()) continue;
            row += blk.a(gi - blk.r0, gj - blk.c0) * e2.der[d2][j];
        }
        v += row * e1.der[d1][i];
    }
    return v;
}

}  // namespace

SmoothBasisFunction build_edge_function(const MultiPatchDomain& dom, const SpaceConfig& cfg,
                                        const SplineSpace1D& space1d,
                                        const std::vector<SplineSpace1D>& trace_spaces,
                                        const InterfaceGluing& gl, int j1, int j2) {
    static thread_local std::map<std::pair<int, int>, std::unique_ptr<Interpolant1D>> interp_cache;
    (void)dom;
    const int s = cfg.smoothness;
    const int n = space1d.dim();
    if (j1 < 0 || j1 > s) throw std::invalid_argument("interface level out of range");
    if (j2 < 0 || j2 >= trace_spaces[j1].dim())
        throw std::invalid_argument("interface trace index out of range");

    auto key = std::make_pair(space1d.degree() * 64 + space1d.regularity(), space1d.inner_knot_count());
    auto& slot = interp_cache[key];
    if (!slot) slot = std::make_unique<Interpolant1D>(space1d);
    const Interpolant1D& interp = *slot;
    Eigen::MatrixXd blend = corner_blending_coefficients(space1d, s);

    SmoothBasisFunction fn;
    fn.origin = FnOrigin::edge;
    fn.origin_index = gl.frame.edge;
    fn.j1 = j1;
    fn.j2 = j2;
    for (int side = 0; side < 2; ++side) {
        EdgeSideData data = edge_side_coefficients(cfg, space1d, trace_spaces, interp, blend, gl,
                                                   side, j1, j2);
        PatchBlock blk = view_grid_to_block(data.view, gl.frame.view[side], gl.frame.patch[side], n);
        // membership check: the interpolated coefficients must reproduce the
        // defining formula away from the interpolation nodes
        {
            const SplineSpace1D& tr = trace_spaces[j1];
            const double h = space1d.mesh_size();
            const double scale = level_scale(cfg.p, j1, h);
            std::mt19937 rng(j1 * 131 + j2 * 7 + side);
            std::uniform_real_distribution<double> U(0.0, 1.0);
            double maxv = 1.0, maxerr = 0.0;
            for (int t = 0; t < 6; ++t) {
                double u1 = U(rng), u2 = U(rng);
                double ref = 0.0;
                for (int l = j1; l <= s; ++l) {
                    double a = gl.alpha(side, u2), b = gl.beta(side, u2);
                    double v = binom(l, j1) * scale * tr.eval_one(j2, u2, l - j1);
                    for (int q = 0; q < l - j1; ++q) v *= b;
                    for (int q = 0; q < j1; ++q) v *= a;
                    double M = 0.0;
                    BasisEval e = space1d.eval_basis(u1, 0);
                    for (int jj = 0; jj <= cfg.smoothness; ++jj)
                        if (jj >= e.first && jj < e.first + e.count)
                            M += blend(jj, l) * e.der[0][jj - e.first];
                    ref += v * M;
                }
                Vec2 native = gl.frame.view[side].apply({u1, u2});
                double got = eval_block(space1d, blk, native, 0, 0);
                maxv = std::max(maxv, std::abs(ref));
                maxerr = std::max(maxerr, std::abs(got - ref));
            }
            if (maxerr > 1e-9 * maxv)
                throw std::runtime_error(
                    "interface trace interpolation failed: geometry is not bilinear-like");
        }
        fn.parts.push_back(std::move(blk));
    }
    std::sort(fn.parts.begin(), fn.parts.end(),
              [](const PatchBlock& x, const PatchBlock& y) { return x.patch < y.patch; });
    normalize_function(fn);
    return fn;
}

std::vector<std::pair<int, int>> patch_interior_indices(const SpaceConfig& cfg, int n) {
    std::vector<std::pair<int, int>> out;
    const int s = cfg.smoothness;
    for (int j1 = s + 1; j1 <= n - s - 2; ++j1)
        for (int j2 = s + 1; j2 <= n - s - 2; ++j2) out.push_back({j1, j2});
    return out;
}

std::vector<std::pair<int, int>> boundary_edge_indices(const SpaceConfig& cfg, int n) {
    std::vector<std::pair<int, int>> out;
    const int s = cfg.smoothness;
    for (int j1 = 0; j1 <= s; ++j1)
        for (int j2 = 2 * s + 1 - j1; j2 <= n + j1 - 2 * s - 2; ++j2) out.push_back({j1, j2});
    return out;
}

std::vector<std::pair<int, int>> inner_edge_middle_indices(
    const SpaceConfig& cfg, const std::vector<SplineSpace1D>& traces) {
    std::vector<std::pair<int, int>> out;
    const int s = cfg.smoothness;
    for (int j1 = 0; j1 <= s; ++j1) {
        int lo = 2 * s + 1 - j1;
        int hi = traces[j1].dim() - 1 - lo;
        for (int j2 = lo; j2 <= hi; ++j2) out.push_back({j1, j2});
    }
    return out;
}

std::vector<std::pair<int, int>> corner_vertex_indices(const SpaceConfig& cfg, int valency) {
    std::vector<std::pair<int, int>> out;
    const int s = cfg.smoothness;
    if (valency == 1) {
        for (int j1 = 0; j1 <= 2 * s; ++j1)
            for (int j2 = 0; j1 + j2 <= 2 * s; ++j2) out.push_back({j1, j2});
    } else if (valency == 2) {
        for (int j1 = 0; j1 <= 3 * s; ++j1) {
            int hi = (j1 <= 2 * s) ? 2 * s - j1 : 3 * s - j1;
            for (int j2 = 0; j2 <= hi; ++j2) out.push_back({j1, j2});
        }
    } else {
        throw std::invalid_argument("explicit corner families exist for valency 1 and 2 only");
    }
    return out;
}

namespace {

// --- vertex kernel construction -------------------------------------------

struct VertexIngredient {
    // one candidate function with a coefficient unknown
    std::vector<PatchBlock> parts;                       // native blocks
    std::vector<std::pair<int, Eigen::MatrixXd>> jets;   // per fan-position rho: 5x5 jet in
                                                         // the vertex view of that patch
};

Eigen::MatrixXd block_corner_jet(const SplineSpace1D& sp, const PatchBlock& blk, const AxisMap& vw,
                                 int s) {
    // derivatives (view coords) at the vertex view origin
    Vec2 native = vw.apply({0.0, 0.0});
    Eigen::MatrixXd native_jet(s + 1, s + 1);
    for (int i = 0; i <= s; ++i)
        for (int j = 0; j <= s; ++j) native_jet(i, j) = eval_block(sp, blk, native, i, j);
    Jet nj;
    for (int i = 0; i <= kMaxDeriv; ++i)
        for (int j = 0; i + j <= kMaxDeriv; ++j)
            nj.c[i][j] = (i <= s && j <= s) ? native_jet(i, j) : 0.0;
    // the pullback handles swap and sign; entries with i+j > 4 are not needed
    // by the corner equations for s = 4, and are unused for s = 3
    Eigen::MatrixXd out(s + 1, s + 1);
    Jet vj = vw.pullback(nj);
    for (int i = 0; i <= s; ++i)
        for (int j = 0; j <= s; ++j) {
            if (i + j <= kMaxDeriv) {
                out(i, j) = vj.c[i][j];
            } else {
                // high mixed orders beyond the jet truncation: map directly
                int pi = vw.swap ? j : i;
                int pj = vw.swap ? i : j;
                double sign = ((vw.flip1 && (pi % 2)) ? -1.0 : 1.0) * ((vw.flip2 && (pj % 2)) ? -1.0 : 1.0);
                out(i, j) = sign * native_jet(pi, pj);
            }
        }
    return out;
}

struct VertexBuildResult {
    std::vector<SmoothBasisFunction> functions;
    int kernel_dim = 0;
    // tensor indices consumed as boundary-edge ingredients, per patch
    std::vector<std::pair<int, std::pair<int, int>>> reserved_tensor;
};

VertexBuildResult build_vertex_kernel(const MultiPatchDomain& dom, const SpaceConfig& cfg,
                                      const SplineSpace1D& space1d,
                                      const std::vector<SplineSpace1D>& traces, int vertex_id) {
    VertexBuildResult result;
    auto* reserved = &result.reserved_tensor;
    const Vertex& vx = dom.vertices()[vertex_id];
    const int v = vx.valency();
    const int s = cfg.smoothness;
    const int n = space1d.dim();
    if (s != 4)
        throw std::runtime_error("vertex constructions of valency >= 3 require smoothness 4");

    // vertex views: edge to the next fan patch at {xi1 = 0}, to the previous at {xi2 = 0}
    std::vector<AxisMap> view(v);
    for (int rho = 0; rho < v; ++rho) {
        const PatchCorner& m = vx.fan[rho];
        int e_prev = vx.fan_edges[rho];
        int e_next = vx.fan_edges[(rho + 1) % static_cast<int>(vx.fan_edges.size())];
        if (!vx.inner) e_next = vx.fan_edges[rho + 1];
        int sX = -1, sY = -1;  // xi1-extreme and xi2-extreme sides at the corner
        switch (m.corner) {
            case 0: sX = 3; sY = 0; break;
            case 1: sX = 1; sY = 0; break;
            case 2: sX = 1; sY = 2; break;
            case 3: sX = 3; sY = 2; break;
        }
        int eX = dom.edge_at(m.patch, sX), eY = dom.edge_at(m.patch, sY);
        bool plain = (eX == e_next && eY == e_prev);
        bool swapped = (eY == e_next && eX == e_prev);
        if (!plain && !swapped) throw std::runtime_error("vertex fan sides are inconsistent");
        view[rho] = MultiPatchDomain::corner_view(m.corner, swapped);
    }

    const int traces_per_edge = (s + 1) * (2 * s + 1) - s * (s + 1) / 2;  // sum of (2s+1-j1)
    const int n_edges = vx.inner ? v : v + 1;
    const int n_unknowns = n_edges * traces_per_edge + v * (s + 1) * (s + 1);

    std::vector<VertexIngredient> ingredients(n_unknowns);
    auto edge_base = [&](int e) { return e * traces_per_edge; };
    auto patch_base = [&](int rho) { return n_edges * traces_per_edge + rho * (s + 1) * (s + 1); };

    // interface ingredients
    for (int ei = 0; ei < n_edges; ++ei) {
        bool is_boundary_edge = !vx.inner && (ei == 0 || ei == v);
        int idx = edge_base(ei);
        if (is_boundary_edge) {
            // standard tensor B-splines on the extremal patch, trace runs along the edge
            int rho = (ei == 0) ? 0 : v - 1;
            bool toward_prev = (ei == 0);
            for (int j1 = 0; j1 <= s; ++j1)
                for (int j2 = 0; j2 <= 2 * s - j1; ++j2, ++idx) {
                    Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(n, n);
                    // transversal index j1 on the boundary-side axis, j2 toward the vertex
                    if (toward_prev)
                        grid(j2, j1) = 1.0;  // edge at view xi2 = 0
                    else
                        grid(j1, j2) = 1.0;  // edge at view xi1 = 0
                    VertexIngredient ing;
                    PatchBlock blk = view_grid_to_block(grid, view[rho], vx.fan[rho].patch, n);
                    reserved->push_back({vx.fan[rho].patch, {blk.r0, blk.c0}});
                    ing.jets.push_back({rho, block_corner_jet(space1d, blk, view[rho], s)});
                    ing.parts.push_back(std::move(blk));
                    ingredients[idx] = std::move(ing);
                }
            continue;
        }
        // fan_edges[ei] joins fan[ei-1] and fan[ei] (cyclically for inner vertices)
        int cur_rho = ei % v;
        int prev_rho = vx.inner ? (ei + v - 1) % v : ei - 1;
        EdgeFrame fr;
        fr.edge = vx.fan_edges[ei];
        AxisMap va = view[prev_rho];                 // edge at its {xi1 = 0}
        AxisMap vb = compose_swap(view[cur_rho]);    // edge at {xi2 = 0} before the swap
        auto det_sign = [&](int patch, const AxisMap& vw) {
            Vec2 g1 = dom.view_deriv(patch, vw, {0.0, 0.5}, 1, 0);
            Vec2 g2 = dom.view_deriv(patch, vw, {0.0, 0.5}, 0, 1);
            return g1[0] * g2[1] - g1[1] * g2[0];
        };
        int pa = vx.fan[prev_rho].patch, pb = vx.fan[cur_rho].patch;
        double da = det_sign(pa, va), db = det_sign(pb, vb);
        if (da * db >= 0) throw std::runtime_error("vertex edge views have equal orientation sign");
        std::array<int, 2> rho_of;
        if (da < 0) {
            fr.patch = {pa, pb};
            fr.view = {va, vb};
            rho_of = {prev_rho, cur_rho};
        } else {
            fr.patch = {pb, pa};
            fr.view = {vb, va};
            rho_of = {cur_rho, prev_rho};
        }
        InterfaceGluing gl = compute_gluing(dom, fr);
        for (int j1 = 0; j1 <= s; ++j1)
            for (int j2 = 0; j2 <= 2 * s - j1; ++j2, ++idx) {
                SmoothBasisFunction fn =
                    build_edge_function(dom, cfg, space1d, traces, gl, j1, j2);
                VertexIngredient ing;
                for (int side = 0; side < 2; ++side) {
                    const PatchBlock* blk = fn.part_on(fr.patch[side]);
                    if (!blk) throw std::logic_error("edge function misses a side");
                    int rho = rho_of[side];
                    ing.jets.push_back({rho, block_corner_jet(space1d, *blk, view[rho], s)});
                }
                ing.parts = std::move(fn.parts);
                ingredients[idx] = std::move(ing);
            }
    }
    // patch (corner jet) ingredients
    for (int rho = 0; rho < v; ++rho) {
        int idx = patch_base(rho);
        for (int a = 0; a <= s; ++a)
            for (int b = 0; b <= s; ++b, ++idx) {
                Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(n, n);
                grid(a, b) = 1.0;
                VertexIngredient ing;
                PatchBlock blk = view_grid_to_block(grid, view[rho], vx.fan[rho].patch, n);
                ing.jets.push_back({rho, block_corner_jet(space1d, blk, view[rho], s)});
                ing.parts.push_back(std::move(blk));
                ingredients[idx] = std::move(ing);
            }
    }

    // homogeneous system: per patch rho, jets of (next - prev) and (next - patch)
    const int jet_sz = (s + 1) * (s + 1);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * jet_sz * v, n_unknowns);
    auto jet_of = [&](const VertexIngredient& ing, int rho) -> const Eigen::MatrixXd* {
        for (const auto& [r, J] : ing.jets)
            if (r == rho) return &J;
        return nullptr;
    };
    double jet_scale = 1.0;
    for (int u = 0; u < n_unknowns; ++u)
        for (const auto& [r, J] : ingredients[u].jets)
            jet_scale = std::max(jet_scale, J.cwiseAbs().maxCoeff());
    for (int rho = 0; rho < v; ++rho) {
        int e_prev = vx.inner ? rho : rho;
        int e_next = vx.inner ? (rho + 1) % v : rho + 1;
        for (int u = 0; u < n_unknowns; ++u) {
            const auto* J = jet_of(ingredients[u], rho);
            if (!J) continue;
            double sign_next = 0.0, sign_prev = 0.0, sign_patch = 0.0;
            if (u >= edge_base(e_next) && u < edge_base(e_next) + traces_per_edge) sign_next = 1.0;
            if (u >= edge_base(e_prev) && u < edge_base(e_prev) + traces_per_edge) sign_prev = 1.0;
            if (u >= patch_base(rho) && u < patch_base(rho) + jet_sz) sign_patch = 1.0;
            for (int l1 = 0; l1 <= s; ++l1)
                for (int l2 = 0; l2 <= s; ++l2) {
                    int row1 = (2 * rho) * jet_sz + l1 * (s + 1) + l2;
                    int row2 = (2 * rho + 1) * jet_sz + l1 * (s + 1) + l2;
                    double val = (*J)(l1, l2) / jet_scale;
                    if (sign_next != 0.0) {
                        A(row1, u) += val;
                        A(row2, u) += val;
                    }
                    if (sign_prev != 0.0) A(row1, u) -= val;
                    if (sign_patch != 0.0) A(row2, u) -= val;
                }
        }
    }

    // equilibrate: row scaling leaves the kernel unchanged, column scaling
    // rescales kernel vectors (undone below); both sharpen the rank gap
    Eigen::VectorXd col_scale = Eigen::VectorXd::Ones(n_unknowns);
    for (int r2 = 0; r2 < A.rows(); ++r2) {
        double m = A.row(r2).cwiseAbs().maxCoeff();
        if (m > 0) A.row(r2) /= m;
    }
    for (int c2 = 0; c2 < n_unknowns; ++c2) {
        double m = A.col(c2).cwiseAbs().maxCoeff();
        if (m > 0) {
            A.col(c2) /= m;
            col_scale(c2) = 1.0 / m;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
#ifdef SC_DEBUG_SVD
    for (int i = 0; i < sv.size(); ++i) fprintf(stderr, "sv[%d] = %.3e\n", i, sv(i));
#endif
    double smax = sv(0);
    double cutoff = 1e-10 * smax;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    // the decision is sound only when a wide spectral gap separates the row
    // space from the numerical kernel; singular values crowding the cutoff
    // without such a gap make the rank ambiguous
    if (rank > 0 && rank < sv.size()) {
        double below = sv(rank);            // largest discarded value
        double above = sv(rank - 1);        // smallest kept value
        if (below > 0.0 && above / below < 1e4) {
            // look for a clean gap near the cutoff instead
            int best = -1;
            double best_ratio = 1e4;
            for (int r2 = 1; r2 < sv.size(); ++r2) {
                if (sv(r2) > 1e-5 * smax) continue;
                double ratio = sv(r2) > 0.0 ? sv(r2 - 1) / sv(r2) : 1e300;
                if (ratio > best_ratio) {
                    best_ratio = ratio;
                    best = r2;
                }
            }
            if (best < 0) {
                std::ostringstream diag;
                diag << "vertex kernel rank decision is ambiguous: singular values near the "
                        "cutoff " << cutoff << " lack a spectral gap (";
                for (int i2 = std::max(0, rank - 3); i2 < std::min<int>(sv.size(), rank + 3); ++i2)
                    diag << sv(i2) << " ";
                diag << ")";
                throw std::runtime_error(diag.str());
            }
            rank = best;
        }
    }
    int kdim = n_unknowns - rank;
    Eigen::MatrixXd K = svd.matrixV().rightCols(kdim);
    // residual of the equilibrated system before undoing the column scaling
    {
        double res = (A * K).cwiseAbs().maxCoeff();
        if (res > 1e-9) {
            std::ostringstream diag;
            diag << "vertex kernel residual exceeds tolerance: " << res;
            throw std::runtime_error(diag.str());
        }
    }
    K = col_scale.asDiagonal() * K;

    // deterministic canonical basis: reduced echelon form with column pivoting
    // (the pivot set depends only on the kernel subspace, so the basis is
    // reproducible across runs and platforms)
    {
        Eigen::MatrixXd R = K.transpose();
        std::vector<bool> used(R.cols(), false);
        for (int row = 0; row < R.rows(); ++row) {
            int pr = -1, pc = -1;
            double best = 0.0;
            for (int r2 = row; r2 < R.rows(); ++r2)
                for (int c2 = 0; c2 < R.cols(); ++c2) {
                    if (used[c2]) continue;
                    if (std::abs(R(r2, c2)) > best) {
                        best = std::abs(R(r2, c2));
                        pr = r2;
                        pc = c2;
                    }
                }
            if (pr < 0 || best < 1e-12)
                throw std::runtime_error("vertex kernel canonicalization lost rank");
            used[pc] = true;
            R.row(row).swap(R.row(pr));
            R.row(row) /= R(row, pc);
            for (int r2 = 0; r2 < R.rows(); ++r2)
                if (r2 != row && R(r2, pc) != 0.0) R.row(r2) -= R(r2, pc) * R.row(row);
        }
        K = R.transpose();
    }

    VertexBuildResult& out = result;
    out.kernel_dim = kdim;
    for (int kv = 0; kv < kdim; ++kv) {
        // accumulate native coefficients; edge parts enter once (they already
        // carry both incident patches), patch jets enter with a minus sign
        std::map<int, Eigen::MatrixXd> scratch;
        auto add = [&](const PatchBlock& blk, double w) {
            if (w == 0.0) return;
            auto it = scratch.find(blk.patch);
            if (it == scratch.end())
                it = scratch.emplace(blk.patch, Eigen::MatrixXd::Zero(n, n)).first;
            it->second.block(blk.r0, blk.c0, blk.a.rows(), blk.a.cols()) += w * blk.a;
        };
        for (int u = 0; u < n_unknowns; ++u) {
            double w = K(u, kv);
            if (std::abs(w) < 1e-14) continue;
            double sgn = (u >= n_edges * traces_per_edge) ? -1.0 : 1.0;
            for (const PatchBlock& blk : ingredients[u].parts) add(blk, sgn * w);
        }
        SmoothBasisFunction fn;
        fn.origin = FnOrigin::vertex;
        fn.origin_index = vertex_id;
        fn.j1 = kv;
        fn.j2 = 0;
        double maxc = 0.0;
        for (auto& [patch, grid] : scratch) {
            int rlo = n, rhi = -1, clo = n, chi = -1;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (std::abs(grid(i, j)) > 1e-14) {
                        rlo = std::min(rlo, i);
                        rhi = std::max(rhi, i);
                        clo = std::min(clo, j);
                        chi = std::max(chi, j);
                    }
            if (rhi < 0) continue;
            PatchBlock blk;
            blk.patch = patch;
            blk.r0 = rlo;
            blk.c0 = clo;
            blk.a = grid.block(rlo, clo, rhi - rlo + 1, chi - clo + 1);
            maxc = std::max(maxc, blk.a.cwiseAbs().maxCoeff());
            fn.parts.push_back(std::move(blk));
        }
        if (maxc < 1e-12) throw std::runtime_error("vertex kernel produced a zero function");
        normalize_function(fn);
        out.functions.push_back(std::move(fn));
    }
    return result;
}

}  // namespace

SmoothSpace assemble_space(const MultiPatchDomain& dom, int smoothness, int p, int r, int k) {
    if (smoothness == 4) {
        if (p < 9 || r < 4 || r > p - 5)
            throw std::invalid_argument("smoothness 4 requires p >= 9 and 4 <= r <= p-5");
    } else if (smoothness == 3) {
        if (p < 7 || r != 3) throw std::invalid_argument("smoothness 3 requires p >= 7 and r = 3");
    } else {
        throw std::invalid_argument("smoothness must be 3 or 4");
    }
    const int s = smoothness;

    SmoothSpace sp;
    sp.domain = &dom;
    sp.cfg = {smoothness, p, r, k};
    sp.space1d = SplineSpace1D::make(p, r, k);
    for (int l = 0; l <= s; ++l)
        sp.trace_spaces.push_back(SplineSpace1D::make(p - l, r + s - l, k));
    const int n = sp.space1d.dim();
    sp.edge_gluing.assign(dom.edges().size(), std::nullopt);

    // vertices needing a kernel construction
    std::vector<int> kernel_vertices;
    for (size_t vid = 0; vid < dom.vertices().size(); ++vid)
        if (dom.vertices()[vid].valency() >= 3) kernel_vertices.push_back(static_cast<int>(vid));
    if (s == 3 && !kernel_vertices.empty())
        throw std::runtime_error(
            "smoothness 3 spaces support domains without vertices of valency >= 3");

    // mesh guard: reservations from the two ends of an edge must not overlap
    for (int e : dom.inner_edges()) {
        const Edge& ed = dom.edges()[e];
        auto [c0, c1] = MultiPatchDomain::side_corners(ed.a.side);
        int v0 = dom.vertex_at(ed.a.patch, c0);
        int v1 = dom.vertex_at(ed.a.patch, c1);
        bool res0 = dom.vertices()[v0].valency() >= 3;
        bool res1 = dom.vertices()[v1].valency() >= 3;
        if (res0 && res1) {
            for (int l = 0; l <= s; ++l)
                if (sp.trace_spaces[l].dim() < 2 * (2 * s + 1 - l))
                    throw std::runtime_error(
                        "mesh too coarse: vertex constructions at both edge ends overlap "
                        "(reduce the mesh size)");
        }
    }

    // vertex kernels first: boundary vertices of valency >= 3 reserve tensor
    // indices that the patch families must skip
    std::vector<std::set<std::pair<int, int>>> patch_excl(dom.patch_count());
    std::vector<VertexBuildResult> kernels;
    for (int vid : kernel_vertices) {
        kernels.push_back(build_vertex_kernel(dom, sp.cfg, sp.space1d, sp.trace_spaces, vid));
        for (const auto& [patch, ij] : kernels.back().reserved_tensor)
            patch_excl[patch].insert(ij);
    }

    for (int pi = 0; pi < dom.patch_count(); ++pi) {
        bool in0 = !dom.side_is_boundary(pi, 3), in1 = !dom.side_is_boundary(pi, 1);
        bool in2 = !dom.side_is_boundary(pi, 0), in3 = !dom.side_is_boundary(pi, 2);
        int lo1 = in0 ? s + 1 : 0, hi1 = in1 ? n - s - 2 : n - 1;
        int lo2 = in2 ? s + 1 : 0, hi2 = in3 ? n - s - 2 : n - 1;
        for (int j1 = lo1; j1 <= hi1; ++j1)
            for (int j2 = lo2; j2 <= hi2; ++j2) {
                if (patch_excl[pi].count({j1, j2})) continue;
                SmoothBasisFunction fn;
                fn.origin = FnOrigin::patch;
                fn.origin_index = pi;
                fn.j1 = j1;
                fn.j2 = j2;
                PatchBlock blk;
                blk.patch = pi;
                blk.r0 = j1;
                blk.c0 = j2;
                blk.a = Eigen::MatrixXd::Ones(1, 1);
                fn.parts.push_back(std::move(blk));
                sp.functions.push_back(std::move(fn));
            }
    }

    // interface families: full trace range minus reservations at kernel-vertex ends
    for (int e : dom.inner_edges()) {
        EdgeFrame fr = dom.edge_frame(e);
        InterfaceGluing gl = compute_gluing(dom, fr);
        sp.edge_gluing[e] = gl;
        const Edge& ed = dom.edges()[e];
        auto [c0, c1] = MultiPatchDomain::side_corners(ed.a.side);
        bool res_lo = dom.vertices()[dom.vertex_at(ed.a.patch, c0)].valency() >= 3;
        bool res_hi = dom.vertices()[dom.vertex_at(ed.a.patch, c1)].valency() >= 3;
        for (int j1 = 0; j1 <= s; ++j1) {
            int dl = sp.trace_spaces[j1].dim();
            int lo = res_lo ? 2 * s + 1 - j1 : 0;
            int hi = res_hi ? dl - 1 - (2 * s + 1 - j1) : dl - 1;
            for (int j2 = lo; j2 <= hi; ++j2)
                sp.functions.push_back(
                    build_edge_function(dom, sp.cfg, sp.space1d, sp.trace_spaces, gl, j1, j2));
        }
    }

    for (size_t i = 0; i < kernel_vertices.size(); ++i) {
        sp.vertex_kernel_dim[kernel_vertices[i]] = kernels[i].kernel_dim;
        for (auto& fn : kernels[i].functions) sp.functions.push_back(std::move(fn));
    }

    // duplicates across families would signal a bookkeeping error
    {
        std::set<std::string> seen;
        for (const auto& fn : sp.functions) {
            std::ostringstream key;
            key << std::setprecision(12);
            for (const auto& b : fn.parts) {
                key << b.patch << ":" << b.r0 << ":" << b.c0 << ":";
                for (int i = 0; i < b.a.size(); ++i) key << b.a.data()[i] << ",";
            }
            if (!seen.insert(key.str()).second)
                throw std::runtime_error("duplicate basis function across families");
        }
    }
    if (sp.dim() <= 1500) {
        double ratio = sp.independence_ratio();
        if (ratio <= 1e-10) {
#ifdef SC_DEBUG_SVD
            fprintf(stderr, "independence ratio %.3e dim %d\n", ratio, sp.dim());
#else
            throw std::runtime_error("assembled basis is linearly dependent");
#endif
        }
    }
    return sp;
}

Jet SmoothSpace::eval_parametric(int fn, int patch, const Vec2& xi) const {
    Jet out{};
    const SmoothBasisFunction& f = functions[fn];
    const PatchBlock* blk = f.part_on(patch);
    if (!blk) return out;
    BasisEval e1 = space1d.eval_basis(xi[0], kMaxDeriv);
    BasisEval e2 = space1d.eval_basis(xi[1], kMaxDeriv);
    for (int d1 = 0; d1 <= kMaxDeriv; ++d1)
        for (int d2 = 0; d1 + d2 <= kMaxDeriv; ++d2) {
            double v = 0.0;
            for (int i = 0; i < e1.count; ++i) {
                int gi = e1.first + i;
                if (gi < blk->r0 || gi >= blk->r0 + blk->a.rows()) continue;
                double row = 0.0;
                for (int j = 0; j < e2.count; ++j) {
                    int gj = e2.first + j;
                    if (gj < blk->c0 || gj >= blk->c0 + blk->a.cols()) continue;
                    row += blk->a(gi - blk->r0, gj - blk->c0) * e2.der[d2][j];
                }
                v += row * e1.der[d1][i];
            }
            out.c[d1][d2] = v;
        }
    return out;
}

PhysicalDerivs SmoothSpace::eval_physical(int fn, int patch, const Vec2& xi) const {
    DerivativeTransfer T(domain->patch(patch), xi);
    return T.apply(eval_parametric(fn, patch, xi));
}

std::map<std::string, int> SmoothSpace::family_counts() const {
    std::map<std::string, int> out;
    for (const auto& fn : functions)
        ++out[to_string(fn.origin) + " " + std::to_string(fn.origin_index)];
    return out;
}

double SmoothSpace::max_interface_jump(int samples) const {
    double worst = 0.0;
    const int s = cfg.smoothness;
    for (int e : domain->inner_edges()) {
        EdgeFrame fr = domain->edge_frame(e);
        for (int fi = 0; fi < dim(); ++fi) {
            const auto& fn = functions[fi];
            if (!fn.part_on(fr.patch[0]) && !fn.part_on(fr.patch[1])) continue;
            // per-order scale floored at one
            std::array<double, kMaxDeriv + 1> scale;
            scale.fill(1.0);
            std::vector<std::array<PhysicalDerivs, 2>> vals(samples);
            for (int t = 0; t < samples; ++t) {
                double u = (t + 0.5) / samples;
                for (int side = 0; side < 2; ++side) {
                    Vec2 native = fr.view[side].apply({0.0, u});
                    vals[t][side] = eval_physical(fi, fr.patch[side], native);
                    for (int i = 0; i <= s; ++i)
                        for (int j = 0; i + j <= s; ++j)
                            scale[i + j] = std::max(scale[i + j], std::abs(vals[t][side].d[i][j]));
                }
            }
            for (int t = 0; t < samples; ++t)
                for (int i = 0; i <= s; ++i)
                    for (int j = 0; i + j <= s; ++j) {
                        double jump = std::abs(vals[t][0].d[i][j] - vals[t][1].d[i][j]);
                        worst = std::max(worst, jump / scale[i + j]);
                    }
        }
    }
    return worst;
}

double SmoothSpace::independence_ratio() const {
    const int m = dim();
    const int n = space1d.dim();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
    // gram of coefficient vectors via overlapping blocks
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            double dot = 0.0;
            for (const auto& bi : functions[i].parts) {
                const PatchBlock* bj = functions[j].part_on(bi.patch);
                if (!bj) continue;
                int r0 = std::max(bi.r0, bj->r0), r1 = std::min(bi.r0 + (int)bi.a.rows(), bj->r0 + (int)bj->a.rows());
                int c0 = std::max(bi.c0, bj->c0), c1 = std::min(bi.c0 + (int)bi.a.cols(), bj->c0 + (int)bj->a.cols());
                for (int rr = r0; rr < r1; ++rr)
                    for (int cc = c0; cc < c1; ++cc)
                        dot += bi.a(rr - bi.r0, cc - bi.c0) * bj->a(rr - bj->r0, cc - bj->c0);
            }
            G(i, j) = G(j, i) = dot;
        }
    (void)n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    double lmin = eig.eigenvalues()(0), lmax = eig.eigenvalues()(m - 1);
    return lmin / lmax;
}

void SmoothSpace::export_text(std::ostream& os) const {
    os << "smooth-space s " << cfg.smoothness << " p " << cfg.p << " r " << cfg.r << " k " << cfg.k
       << " dim " << dim() << "\n";
    os << std::setprecision(17);
    for (int i = 0; i < dim(); ++i) {
        const auto& fn = functions[i];
        os << "function " << i << " origin " << to_string(fn.origin) << " " << fn.origin_index
           << " j " << fn.j1 << " " << fn.j2 << "\n";
        for (const auto& b : fn.parts) {
            os << "  patch " << b.patch << " offset " << b.r0 << " " << b.c0 << " size "
               << b.a.rows() << " " << b.a.cols() << "\n";
            for (int rr = 0; rr < b.a.rows(); ++rr) {
                os << "   ";
                for (int cc = 0; cc < b.a.cols(); ++cc) os << " " << b.a(rr, cc);
                os << "\n";
            }
        }
    }
}

}  // namespace sc
