#include "smoothcolloc/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sc {

namespace {

constexpr double kMatchTol = 1e-12;

int side_of_corner(int corner, bool first) {
    // sides meeting at each corner, ordered (xi1-extreme side, xi2-extreme side)
    static constexpr int tab[4][2] = {{3, 0}, {1, 0}, {1, 2}, {3, 2}};
    return tab[corner][first ? 0 : 1];
}

struct LinearFit {
    double q0 = 0.0, q1 = 0.0, residual = 0.0;
};

LinearFit fit_linear(const std::vector<double>& s, const std::vector<double>& y) {
    const int m = static_cast<int>(s.size());
    double sw = m, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        sx += s[i];
        sxx += s[i] * s[i];
        sy += y[i];
        sxy += s[i] * y[i];
    }
    double det = sw * sxx - sx * sx;
    double c0 = (sxx * sy - sx * sxy) / det;
    double c1 = (sw * sxy - sx * sy) / det;
    LinearFit f;
    f.q0 = c0;
    f.q1 = c0 + c1;
    for (int i = 0; i < m; ++i) f.residual = std::max(f.residual, std::abs(c0 + c1 * s[i] - y[i]));
    return f;
}

}  // namespace

std::pair<int, int> MultiPatchDomain::side_corners(int side) {
    switch (side) {
        case 0: return {0, 1};
        case 1: return {1, 2};
        case 2: return {3, 2};
        case 3: return {0, 3};
        default: throw std::invalid_argument("side index must be 0..3");
    }
}

AxisMap MultiPatchDomain::side_view(int side, bool reverse_along) {
    AxisMap m;
    switch (side) {
        case 3: m = {false, false, false}; break;
        case 1: m = {false, true, false}; break;
        case 0: m = {true, false, false}; break;
        case 2: m = {true, false, true}; break;
        default: throw std::invalid_argument("side index must be 0..3");
    }
    if (reverse_along) {
        // the run parameter feeds patch axis 2 (plain) or axis 1 (swapped)
        if (m.swap)
            m.flip1 = !m.flip1;
        else
            m.flip2 = !m.flip2;
    }
    return m;
}

AxisMap MultiPatchDomain::corner_view(int corner, bool axes_swapped) {
    AxisMap m;
    m.swap = axes_swapped;
    m.flip1 = (corner == 1 || corner == 2);
    m.flip2 = (corner == 2 || corner == 3);
    return m;
}

Vec2 MultiPatchDomain::view_deriv(int patch, const AxisMap& vw, const Vec2& u, int d1,
                                  int d2) const {
    int pi = vw.swap ? d2 : d1;
    int pj = vw.swap ? d1 : d2;
    double sign = 1.0;
    if (vw.flip1 && (pi % 2)) sign = -sign;
    if (vw.flip2 && (pj % 2)) sign = -sign;
    return sign * patches_[patch].deriv(vw.apply(u), pi, pj);
}

MultiPatchDomain MultiPatchDomain::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open domain file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load(ss.str());
}

MultiPatchDomain MultiPatchDomain::load(const std::string& text) {
    // strip comments, tokenize
    std::vector<std::string> tok;
    {
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            auto h = line.find('#');
            if (h != std::string::npos) line.erase(h);
            std::istringstream ls(line);
            std::string w;
            while (ls >> w) tok.push_back(w);
        }
    }
    size_t pos = 0;
    auto need = [&](const std::string& what) -> std::string {
        if (pos >= tok.size()) throw std::runtime_error("domain file ended while reading " + what);
        return tok[pos++];
    };
    auto need_int = [&](const std::string& what) {
        std::string w = need(what);
        try {
            return std::stoi(w);
        } catch (...) {
            throw std::runtime_error("expected integer for " + what + ", got '" + w + "'");
        }
    };
    auto need_num = [&](const std::string& what) {
        std::string w = need(what);
        try {
            return std::stod(w);
        } catch (...) {
            throw std::runtime_error("expected number for " + what + ", got '" + w + "'");
        }
    };
    auto need_side = [&](const std::string& what) {
        std::string w = need(what);
        if (w.size() == 2 && (w[0] == 'S' || w[0] == 's') && w[1] >= '0' && w[1] <= '3')
            return w[1] - '0';
        throw std::runtime_error("expected side S0..S3 for " + what + ", got '" + w + "'");
    };

    MultiPatchDomain dom;
    if (need("header") != "patches") throw std::runtime_error("domain file must start with 'patches'");
    int np = need_int("patch count");
    if (np < 1) throw std::runtime_error("domain needs at least one patch");
    dom.patches_.resize(np);
    std::vector<bool> seen(np, false);
    for (int c = 0; c < np; ++c) {
        if (need("patch keyword") != "patch") throw std::runtime_error("expected 'patch'");
        int idx = need_int("patch index");
        if (idx < 0 || idx >= np || seen[idx]) throw std::runtime_error("bad or repeated patch index");
        seen[idx] = true;
        if (need("degree keyword") != "degree") throw std::runtime_error("expected 'degree'");
        int d = need_int("patch degree");
        std::vector<Vec2> net((d + 1) * (d + 1));
        for (auto& p : net) {
            p[0] = need_num("control point x");
            p[1] = need_num("control point y");
        }
        dom.patches_[idx] = GeometryMap(d, std::move(net));
    }

    std::vector<std::array<int, 4>> covered(np, {-1, -1, -1, -1});
    if (need("interfaces keyword") != "interfaces")
        throw std::runtime_error("expected 'interfaces' section");
    int ni = need_int("interface count");
    for (int e = 0; e < ni; ++e) {
        Edge ed;
        ed.inner = true;
        ed.a.patch = need_int("interface patch A");
        ed.a.side = need_side("interface side A");
        ed.b.patch = need_int("interface patch B");
        ed.b.side = need_side("interface side B");
        std::string ori = need("interface orientation");
        if (ori == "same")
            ed.reversed = false;
        else if (ori == "reversed")
            ed.reversed = true;
        else
            throw std::runtime_error("interface orientation must be 'same' or 'reversed'");
        for (const PatchSide* ps : {&ed.a, &ed.b}) {
            if (ps->patch < 0 || ps->patch >= np) throw std::runtime_error("interface patch out of range");
            if (covered[ps->patch][ps->side] != -1)
                throw std::runtime_error("patch side referenced twice");
            covered[ps->patch][ps->side] = static_cast<int>(dom.edges_.size());
        }
        if (ed.a.patch == ed.b.patch)
            throw std::runtime_error("a patch cannot be glued to itself");
        dom.edges_.push_back(ed);
    }
    if (need("boundary keyword") != "boundary") throw std::runtime_error("expected 'boundary' section");
    int nb = need_int("boundary count");
    for (int e = 0; e < nb; ++e) {
        Edge ed;
        ed.inner = false;
        ed.a.patch = need_int("boundary patch");
        ed.a.side = need_side("boundary side");
        if (ed.a.patch < 0 || ed.a.patch >= np) throw std::runtime_error("boundary patch out of range");
        if (covered[ed.a.patch][ed.a.side] != -1) throw std::runtime_error("patch side referenced twice");
        covered[ed.a.patch][ed.a.side] = static_cast<int>(dom.edges_.size());
        dom.edges_.push_back(ed);
    }
    for (int p = 0; p < np; ++p)
        for (int s = 0; s < 4; ++s)
            if (covered[p][s] == -1)
                throw std::runtime_error("patch " + std::to_string(p) + " side S" + std::to_string(s) +
                                         " is neither interface nor boundary");
    dom.side_edge_ = covered;
    dom.validate_geometry();
    dom.build_topology();
    return dom;
}

void MultiPatchDomain::validate_geometry() const {
    for (size_t p = 0; p < patches_.size(); ++p)
        if (!patches_[p].is_regular())
            throw std::runtime_error("patch " + std::to_string(p) + " is irregular or degenerate");
    // shared edges must carry coincident control points after orientation mapping
    for (const Edge& e : edges_) {
        if (!e.inner) continue;
        const GeometryMap& A = patches_[e.a.patch];
        const GeometryMap& B = patches_[e.b.patch];
        if (A.degree() != B.degree())
            throw std::runtime_error("interface between patches of different bi-degree");
        int d = A.degree();
        auto side_point = [d](const GeometryMap& g, int side, int t) -> Vec2 {
            switch (side) {
                case 0: return g.net()[static_cast<size_t>(t) * (d + 1)];
                case 1: return g.net()[static_cast<size_t>(d) * (d + 1) + t];
                case 2: return g.net()[static_cast<size_t>(t) * (d + 1) + d];
                case 3: return g.net()[t];
                default: throw std::logic_error("bad side");
            }
        };
        for (int t = 0; t <= d; ++t) {
            Vec2 pa = side_point(A, e.a.side, t);
            Vec2 pb = side_point(B, e.b.side, e.reversed ? d - t : t);
            if ((pa - pb).norm() > kMatchTol)
                throw std::runtime_error("shared edge control points do not coincide");
        }
    }
}

void MultiPatchDomain::build_topology() {
    const int np = patch_count();
    // union-find over (patch, corner)
    std::vector<int> parent(static_cast<size_t>(np) * 4);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    for (const Edge& e : edges_) {
        if (!e.inner) continue;
        auto [a0, a1] = side_corners(e.a.side);
        auto [b0, b1] = side_corners(e.b.side);
        if (e.reversed) std::swap(b0, b1);
        unite(e.a.patch * 4 + a0, e.b.patch * 4 + b0);
        unite(e.a.patch * 4 + a1, e.b.patch * 4 + b1);
    }
    std::map<int, std::vector<PatchCorner>> classes;
    for (int p = 0; p < np; ++p)
        for (int c = 0; c < 4; ++c) classes[find(p * 4 + c)].push_back({p, c});

    corner_vertex_.assign(np, {-1, -1, -1, -1});
    for (auto& [root, members] : classes) {
        Vertex v;
        // walk over the fan: from a member and one of its corner sides, the inner
        // edge at that side leads to the neighbor member
        auto edge_at_member_side = [&](const PatchCorner& m, bool first) {
            return side_edge_[m.patch][side_of_corner(m.corner, first)];
        };
        auto neighbor = [&](const PatchCorner& m, int edge) -> PatchCorner {
            const Edge& e = edges_[edge];
            PatchSide other = (e.a.patch == m.patch &&
                               (e.a.side == side_of_corner(m.corner, true) ||
                                e.a.side == side_of_corner(m.corner, false)))
                                  ? e.b
                                  : e.a;
            // corner of the other patch lying on this vertex
            auto [c0, c1] = side_corners(other.side);
            for (int c : {c0, c1})
                for (const PatchCorner& cand : members)
                    if (cand.patch == other.patch && cand.corner == c) return cand;
            throw std::runtime_error("inconsistent corner incidence along an interface");
        };

        std::vector<std::pair<PatchCorner, int>> bnd;  // (member, boundary edge at its corner side)
        for (const PatchCorner& m : members)
            for (bool first : {true, false}) {
                int e = edge_at_member_side(m, first);
                if (!edges_[e].inner) bnd.push_back({m, e});
            }
        std::sort(bnd.begin(), bnd.end(), [](const auto& x, const auto& y) {
            return std::tie(x.first.patch, x.second) < std::tie(y.first.patch, y.second);
        });

        if (!bnd.empty()) {
            if (bnd.size() != 2)
                throw std::runtime_error("boundary vertex must touch exactly two boundary sides");
            v.inner = false;
            PatchCorner cur = bnd[0].first;
            int enter = bnd[0].second;  // boundary edge we "come from"
            v.fan_edges.push_back(enter);
            while (true) {
                v.fan.push_back(cur);
                // leave through the corner side that is not the entering edge
                int e1 = edge_at_member_side(cur, true);
                int e2 = edge_at_member_side(cur, false);
                int leave = (e1 == enter) ? e2 : e1;
                v.fan_edges.push_back(leave);
                if (!edges_[leave].inner) break;
                cur = neighbor(cur, leave);
                enter = leave;
            }
            if (v.fan.size() != members.size())
                throw std::runtime_error("vertex fan does not cover all incident patches");
        } else {
            v.inner = true;
            PatchCorner start = *std::min_element(
                members.begin(), members.end(),
                [](const PatchCorner& x, const PatchCorner& y) { return x.patch < y.patch; });
            int enter = edge_at_member_side(start, true);
            PatchCorner cur = start;
            while (true) {
                v.fan.push_back(cur);
                int e1 = edge_at_member_side(cur, true);
                int e2 = edge_at_member_side(cur, false);
                int leave = (e1 == enter) ? e2 : e1;
                cur = neighbor(cur, leave);
                enter = leave;
                if (cur == start) break;
                if (v.fan.size() > members.size())
                    throw std::runtime_error("vertex fan fails to close");
            }
            if (v.fan.size() != members.size())
                throw std::runtime_error("vertex fan does not cover all incident patches");
            // fan_edges[r] joins fan[r-1] and fan[r] (cyclically)
            for (size_t r = 0; r < v.fan.size(); ++r) {
                const PatchCorner& cm = v.fan[r];
                const PatchCorner& pm = v.fan[(r + v.fan.size() - 1) % v.fan.size()];
                int e1 = edge_at_member_side(cm, true);
                int e2 = edge_at_member_side(cm, false);
                int shared = -1;
                for (int e : {e1, e2}) {
                    const Edge& ed = edges_[e];
                    if (ed.inner && (ed.a.patch == pm.patch || ed.b.patch == pm.patch)) shared = e;
                }
                if (shared < 0) throw std::runtime_error("fan edge lookup failed");
                v.fan_edges.push_back(shared);
            }
        }
        int vid = static_cast<int>(vertices_.size());
        vertices_.push_back(std::move(v));
        for (const PatchCorner& m : members) corner_vertex_[m.patch][m.corner] = vid;
    }

    // physical consistency of identified corners
    for (size_t vid = 0; vid < vertices_.size(); ++vid) {
        const Vertex& v = vertices_[vid];
        Vec2 ref = patches_[v.fan[0].patch].corner(v.fan[0].corner);
        for (const PatchCorner& m : v.fan)
            if ((patches_[m.patch].corner(m.corner) - ref).norm() > 1e-10)
                throw std::runtime_error("identified corners are not coincident");
    }
}

std::vector<int> MultiPatchDomain::inner_edges() const {
    std::vector<int> out;
    for (size_t e = 0; e < edges_.size(); ++e)
        if (edges_[e].inner) out.push_back(static_cast<int>(e));
    return out;
}

std::vector<int> MultiPatchDomain::boundary_edges() const {
    std::vector<int> out;
    for (size_t e = 0; e < edges_.size(); ++e)
        if (!edges_[e].inner) out.push_back(static_cast<int>(e));
    return out;
}

EdgeFrame MultiPatchDomain::edge_frame(int edge, bool origin_at_end) const {
    const Edge& e = edges_[edge];
    if (!e.inner) throw std::invalid_argument("edge frames exist for inner edges only");
    AxisMap va = side_view(e.a.side, origin_at_end);
    AxisMap vb = side_view(e.b.side, origin_at_end != e.reversed);

    auto det_sign = [&](int patch, const AxisMap& vw) {
        Vec2 g1 = view_deriv(patch, vw, {0.0, 0.5}, 1, 0);
        Vec2 g2 = view_deriv(patch, vw, {0.0, 0.5}, 0, 1);
        return g1[0] * g2[1] - g1[1] * g2[0];
    };
    double da = det_sign(e.a.patch, va);
    double db = det_sign(e.b.patch, vb);
    if (da * db >= 0.0) throw std::runtime_error("interface sides have equal orientation sign");

    EdgeFrame fr;
    fr.edge = edge;
    if (da < 0.0) {
        fr.patch = {e.a.patch, e.b.patch};
        fr.view = {va, vb};
    } else {
        fr.patch = {e.b.patch, e.a.patch};
        fr.view = {vb, va};
    }
    // both views must trace the same physical curve
    for (double t : {0.0, 0.37, 1.0}) {
        Vec2 pa = patches_[fr.patch[0]].eval(fr.view[0].apply({0.0, t}));
        Vec2 pb = patches_[fr.patch[1]].eval(fr.view[1].apply({0.0, t}));
        if ((pa - pb).norm() > 1e-10) throw std::runtime_error("edge frame parameter mismatch");
    }
    return fr;
}

InterfaceGluing compute_gluing(const MultiPatchDomain& dom, const EdgeFrame& frame) {
    InterfaceGluing g;
    g.frame = frame;
    const int m = 21;
    std::vector<double> s(m);
    for (int i = 0; i < m; ++i) s[i] = static_cast<double>(i) / (m - 1);

    std::array<LinearFit, 2> afit, bfit;
    double scale = 0.0;
    for (int tau = 0; tau < 2; ++tau) {
        std::vector<double> av(m), bv(m);
        for (int i = 0; i < m; ++i) {
            Vec2 g1 = dom.view_deriv(frame.patch[tau], frame.view[tau], {0.0, s[i]}, 1, 0);
            Vec2 g2 = dom.view_deriv(frame.patch[tau], frame.view[tau], {0.0, s[i]}, 0, 1);
            av[i] = g1[0] * g2[1] - g1[1] * g2[0];
            double n2 = g2.squaredNorm();
            if (n2 < 1e-28) throw std::runtime_error("degenerate interface tangent");
            bv[i] = g1.dot(g2) / n2;
            scale = std::max({scale, std::abs(av[i]), std::abs(bv[i])});
        }
        afit[tau] = fit_linear(s, av);
        bfit[tau] = fit_linear(s, bv);
    }
    g.fit_residual = std::max({afit[0].residual, afit[1].residual, bfit[0].residual, bfit[1].residual});
    if (g.fit_residual > 1e-10 * std::max(1.0, scale))
        throw std::runtime_error("interface gluing data is not linear: geometry is not bilinear-like");

    // lambda = int(a1 - a0) / int(a0^2 + a1^2) in closed form for linear traces
    auto integral = [](const LinearFit& f) { return 0.5 * (f.q0 + f.q1); };
    auto integral_sq = [](const LinearFit& f) {
        return (f.q0 * f.q0 + f.q0 * f.q1 + f.q1 * f.q1) / 3.0;
    };
    double num = integral(afit[1]) - integral(afit[0]);
    double den = integral_sq(afit[0]) + integral_sq(afit[1]);
    if (den < 1e-28) throw std::runtime_error("degenerate interface determinant traces");
    g.lambda = num / den;
    if (g.lambda <= 0.0) throw std::runtime_error("gluing scale lambda is not positive");
    for (int tau = 0; tau < 2; ++tau) {
        g.alpha0[tau] = g.lambda * afit[tau].q0;
        g.alpha1[tau] = g.lambda * afit[tau].q1;
        g.beta0[tau] = bfit[tau].q0;
        g.beta1[tau] = bfit[tau].q1;
    }
    if (g.alpha0[0] >= 0.0 || g.alpha1[0] >= 0.0 || g.alpha0[1] <= 0.0 || g.alpha1[1] <= 0.0)
        throw std::runtime_error("gluing alpha signs violate the orientation convention");
    return g;
}

namespace {

// univariate jets along the edge run parameter, truncated at order 4
struct J1 {
    std::array<double, 5> c{};
    J1 operator+(const J1& o) const {
        J1 r;
        for (int i = 0; i < 5; ++i) r.c[i] = c[i] + o.c[i];
        return r;
    }
    J1 operator-(const J1& o) const {
        J1 r;
        for (int i = 0; i < 5; ++i) r.c[i] = c[i] - o.c[i];
        return r;
    }
    J1 operator*(const J1& o) const {
        static constexpr int B[5][5] = {
            {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
        J1 r;
        for (int i = 0; i < 5; ++i) {
            double t = 0;
            for (int a = 0; a <= i; ++a) t += B[i][a] * c[a] * o.c[i - a];
            r.c[i] = t;
        }
        return r;
    }
    J1 recip() const {
        static constexpr int B[5][5] = {
            {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
        J1 r;
        for (int i = 0; i < 5; ++i) {
            double t = (i == 0) ? 1.0 : 0.0;
            for (int a = 1; a <= i; ++a) t -= B[i][a] * c[a] * r.c[i - a];
            r.c[i] = t / c[0];
        }
        return r;
    }
    J1 operator*(double s) const {
        J1 r;
        for (int i = 0; i < 5; ++i) r.c[i] = c[i] * s;
        return r;
    }
    J1 deriv(int m) const {
        J1 r;
        for (int i = 0; i + m < 5; ++i) r.c[i] = c[i + m];
        return r;
    }
    static J1 linear(double q0, double q1, double s) {
        J1 r;
        r.c[0] = q0 * (1 - s) + q1 * s;
        r.c[1] = q1 - q0;
        return r;
    }
};

struct VJ1 {
    J1 x, y;
    VJ1 operator+(const VJ1& o) const { return {x + o.x, y + o.y}; }
    VJ1 operator-(const VJ1& o) const { return {x - o.x, y - o.y}; }
    VJ1 scaled(const J1& s) const { return {x * s, y * s}; }
    VJ1 deriv(int m) const { return {x.deriv(m), y.deriv(m)}; }
};

}  // namespace

BilinearLikeReport validate_bilinear_like(const MultiPatchDomain& dom, double tol) {
    static constexpr int B[5][5] = {
        {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
    BilinearLikeReport rep;
    double scale = 1.0;
    for (int e : dom.inner_edges()) {
        EdgeFrame fr = dom.edge_frame(e);
        InterfaceGluing gl;
        try {
            gl = compute_gluing(dom, fr);
        } catch (const std::exception& ex) {
            rep.accepted = false;
            rep.max_residual = 1.0;
            rep.detail = ex.what();
            return rep;
        }
        for (int i = 0; i < 20; ++i) {
            double s = (i + 0.5) / 20.0;
            // transversal derivative jets of both relabeled maps along the edge
            std::array<std::array<VJ1, 5>, 2> d1f;
            for (int tau = 0; tau < 2; ++tau)
                for (int l = 0; l <= 4; ++l) {
                    VJ1 v;
                    for (int m = 0; m <= 4; ++m) {
                        Vec2 w = dom.view_deriv(fr.patch[tau], fr.view[tau], {0.0, s}, l, m);
                        v.x.c[m] = w[0];
                        v.y.c[m] = w[1];
                        scale = std::max({scale, std::abs(w[0]), std::abs(w[1])});
                    }
                    d1f[tau][l] = v;
                }
            std::array<VJ1, 5> common;  // matched transversal traces
            for (int l = 0; l <= 4; ++l) {
                std::array<VJ1, 2> Fl;
                for (int tau = 0; tau < 2; ++tau) {
                    J1 alpha = J1::linear(gl.alpha0[tau], gl.alpha1[tau], s);
                    J1 beta = J1::linear(gl.beta0[tau], gl.beta1[tau], s);
                    J1 ia = alpha.recip();
                    J1 ial;  // alpha^{-l}
                    ial.c[0] = 1.0;
                    for (int q = 0; q < l; ++q) ial = ial * ia;
                    VJ1 acc = d1f[tau][l].scaled(ial);
                    J1 boa = beta * ia;
                    for (int j = 0; j < l; ++j) {
                        J1 pw;
                        pw.c[0] = 1.0;
                        for (int q = 0; q < l - j; ++q) pw = pw * boa;
                        acc = acc - common[j].deriv(l - j).scaled(pw * static_cast<double>(B[l][j]));
                    }
                    Fl[tau] = acc;
                }
                double res = std::max(std::abs(Fl[0].x.c[0] - Fl[1].x.c[0]),
                                      std::abs(Fl[0].y.c[0] - Fl[1].y.c[0]));
                rep.max_residual = std::max(rep.max_residual, res);
                common[l] = Fl[1];
            }
        }
    }
    rep.max_residual /= scale;
    rep.accepted = rep.max_residual <= tol;
    return rep;
}

namespace {

const std::vector<std::pair<std::string, std::string>>& builtin_table() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"one-patch", R"(# bilinear one-patch quadrilateral
patches 1
patch 0 degree 1
0   0   -1.08   15.3
18   0   18.9   16.65
interfaces 0
boundary 4
0 S0
0 S1
0 S2
0 S3
)"},
        {"two-patch-L", R"(# bilinear two-patch L-shape, slanted interface from (0,0) to (1,1)
patches 2
patch 0 degree 1
0   0   9   9
18   0   18   9
patch 1 degree 1
0   0   0   18
9   9   9   18
interfaces 1
0 S3 1 S0 same
boundary 6
0 S0
0 S1
0 S2
1 S1
1 S2
1 S3
)"},
        {"three-patch", R"(# bilinear three-patch disk-like domain with one inner vertex of valency 3
patches 3
patch 0 degree 1
0.45   -0.27   -8.41776692478475   -4.86
0   9   -10.5222086559809   6.075
patch 1 degree 1
0.45   -0.27   7.32657491601635   -4.23
-8.41776692478475   -4.86   0   -11.52
patch 2 degree 1
0.45   -0.27   0   9
7.32657491601635   -4.23   11.0678046603651   6.39
interfaces 3
0 S3 1 S0 same
1 S3 2 S0 same
2 S3 0 S0 same
boundary 6
0 S1
0 S2
1 S1
1 S2
2 S1
2 S2
)"},
        {"five-patch", R"(# bilinear five-patch disk-like domain with one inner vertex of valency 5
patches 5
patch 0 degree 1
0.18   0.36   -9.15867425192229   2.97583365583075
0   9   -7.40609417888516   10.1936141291244
patch 1 degree 1
0.18   0.36   -5.07846457980697   -6.98990683139954
-9.15867425192229   2.97583365583075   -11.3841465000529   -3.69893342266812
patch 2 degree 1
0.18   0.36   5.92487534310813   -8.15489130329947
-5.07846457980697   -6.98990683139954   0   -13.05
patch 3 degree 1
0.18   0.36   7.70355778199074   2.50303765443707
5.92487534310813   -8.15489130329947   11.1273612406533   -3.61549883418689
patch 4 degree 1
0.18   0.36   0   9
7.70355778199074   2.50303765443707   7.30029283347252   10.0479910701369
interfaces 5
0 S3 1 S0 same
1 S3 2 S0 same
2 S3 3 S0 same
3 S3 4 S0 same
4 S3 0 S0 same
boundary 10
0 S1
0 S2
1 S1
1 S2
2 S1
2 S2
3 S1
3 S2
4 S1
4 S2
)"}};
    return table;
}

}  // namespace

const std::vector<std::string>& MultiPatchDomain::builtin_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, text] : builtin_table()) n.push_back(name);
        return n;
    }();
    return names;
}

std::string MultiPatchDomain::builtin_text(const std::string& name) {
    for (const auto& [n, text] : builtin_table())
        if (n == name) return text;
    throw std::invalid_argument("unknown builtin domain '" + name + "'");
}

MultiPatchDomain MultiPatchDomain::builtin(const std::string& name) {
    return load(builtin_text(name));
}

}  // namespace sc
