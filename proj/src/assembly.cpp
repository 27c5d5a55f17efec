#include "smoothcolloc/assembly.hpp"

#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>

namespace sc {

ManufacturedSolution ManufacturedSolution::trig() {
    ManufacturedSolution ms;
    auto u = [](const Vec2& x) { return std::cos(x[0] / 2) * std::sin(x[1] / 2); };
    ms.u = [u](int, const Vec2&, const Vec2& x) { return u(x); };
    ms.grad = [](int, const Vec2&, const Vec2& x) {
        return Vec2{-0.5 * std::sin(x[0] / 2) * std::sin(x[1] / 2),
                    0.5 * std::cos(x[0] / 2) * std::cos(x[1] / 2)};
    };
    ms.lap = [u](int, const Vec2&, const Vec2& x) { return -0.5 * u(x); };
    ms.grad_lap = [](int, const Vec2&, const Vec2& x) {
        return Vec2{0.25 * std::sin(x[0] / 2) * std::sin(x[1] / 2),
                    -0.25 * std::cos(x[0] / 2) * std::cos(x[1] / 2)};
    };
    ms.bilap = [u](int, const Vec2&, const Vec2& x) { return 0.25 * u(x); };
    ms.closed_form = true;
    return ms;
}

ManufacturedSolution ManufacturedSolution::from_coefficients(const SmoothSpace& space,
                                                             Eigen::VectorXd coefficients) {
    if (coefficients.size() != space.dim())
        throw std::invalid_argument("coefficient count does not match the space dimension");
    // collapse into one composite coefficient grid per patch
    auto grids = std::make_shared<std::vector<Eigen::MatrixXd>>();
    const int n = space.n1();
    grids->assign(space.domain->patch_count(), Eigen::MatrixXd::Zero(n, n));
    for (int i = 0; i < space.dim(); ++i)
        for (const auto& blk : space.functions[i].parts)
            (*grids)[blk.patch].block(blk.r0, blk.c0, blk.a.rows(), blk.a.cols()) +=
                coefficients(i) * blk.a;
    auto space1d = std::make_shared<SplineSpace1D>(space.space1d);
    const MultiPatchDomain* dom = space.domain;

    auto derivs = [grids, space1d, dom](int patch, const Vec2& xi) {
        Jet jet{};
        BasisEval e1 = space1d->eval_basis(xi[0], kMaxDeriv);
        BasisEval e2 = space1d->eval_basis(xi[1], kMaxDeriv);
        const Eigen::MatrixXd& G = (*grids)[patch];
        for (int d1 = 0; d1 <= kMaxDeriv; ++d1)
            for (int d2 = 0; d1 + d2 <= kMaxDeriv; ++d2) {
                double v = 0;
                for (int i = 0; i < e1.count; ++i)
                    for (int j = 0; j < e2.count; ++j)
                        v += G(e1.first + i, e2.first + j) * e1.der[d1][i] * e2.der[d2][j];
                jet.c[d1][d2] = v;
            }
        DerivativeTransfer T(dom->patch(patch), xi);
        return T.apply(jet);
    };
    ManufacturedSolution ms;
    ms.u = [derivs](int p, const Vec2& xi, const Vec2&) { return derivs(p, xi).value(); };
    ms.grad = [derivs](int p, const Vec2& xi, const Vec2&) { return derivs(p, xi).gradient(); };
    ms.lap = [derivs](int p, const Vec2& xi, const Vec2&) { return derivs(p, xi).laplacian(); };
    ms.grad_lap = [derivs](int p, const Vec2& xi, const Vec2&) {
        return derivs(p, xi).grad_laplacian();
    };
    ms.bilap = [derivs](int p, const Vec2& xi, const Vec2&) { return derivs(p, xi).bilaplacian(); };
    ms.closed_form = false;
    return ms;
}

double ManufacturedSolution::validate_fd(const MultiPatchDomain& dom, int samples) const {
    if (!closed_form)
        throw std::logic_error("finite-difference validation needs a closed-form solution");
    double worst = 0.0;
    const double h = 1e-4;
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> U(0.15, 0.85);
    for (int it = 0; it < samples; ++it) {
        int p = it % dom.patch_count();
        Vec2 xi{U(rng), U(rng)};
        Vec2 x = dom.patch(p).eval(xi);
        auto f = [&](double a, double b) { return u(p, xi, {a, b}); };
        double lap_fd = (f(x[0] + h, x[1]) + f(x[0] - h, x[1]) + f(x[0], x[1] + h) +
                         f(x[0], x[1] - h) - 4 * f(x[0], x[1])) /
                        (h * h);
        double gx = (f(x[0] + h, x[1]) - f(x[0] - h, x[1])) / (2 * h);
        double gy = (f(x[0], x[1] + h) - f(x[0], x[1] - h)) / (2 * h);
        auto L = [&](double a, double b) { return lap(p, xi, {a, b}); };
        double bilap_fd = (L(x[0] + h, x[1]) + L(x[0] - h, x[1]) + L(x[0], x[1] + h) +
                           L(x[0], x[1] - h) - 4 * L(x[0], x[1])) /
                          (h * h);
        Vec2 g = grad(p, xi, x);
        double rel = std::abs(lap_fd - lap(p, xi, x)) / std::max(1.0, std::abs(lap(p, xi, x)));
        rel = std::max(rel, std::abs(gx - g[0]) / std::max(1.0, std::abs(g[0])));
        rel = std::max(rel, std::abs(gy - g[1]) / std::max(1.0, std::abs(g[1])));
        rel = std::max(rel,
                       std::abs(bilap_fd - bilap(p, xi, x)) / std::max(1.0, std::abs(bilap(p, xi, x))));
        worst = std::max(worst, rel);
    }
    return worst;
}

Vec2 outward_normal(const MultiPatchDomain& dom, int patch, int side, double t) {
    // side parameterization by its natural coordinate
    Vec2 xi, tangent;
    const GeometryMap& F = dom.patch(patch);
    switch (side) {
        case 0: xi = {t, 0.0}; tangent = F.deriv(xi, 1, 0); break;
        case 1: xi = {1.0, t}; tangent = F.deriv(xi, 0, 1); break;
        case 2: xi = {t, 1.0}; tangent = F.deriv(xi, 1, 0); break;
        default: xi = {0.0, t}; tangent = F.deriv(xi, 0, 1); break;
    }
    Vec2 n{tangent[1], -tangent[0]};
    n.normalize();
    // orient away from the patch interior
    Vec2 inward = F.eval({0.5, 0.5}) - F.eval(xi);
    if (n.dot(inward) > 0) n = -n;
    return n;
}

namespace {

struct ElemEntry {
    int fn;
    const PatchBlock* blk;
};

// per patch, per element, the functions whose support touches the element
std::vector<std::vector<std::vector<ElemEntry>>> build_element_tables(const SmoothSpace& space) {
    const MultiPatchDomain& dom = *space.domain;
    const int k = space.cfg.k;
    const int p = space.cfg.p;
    const int mult = p - space.cfg.r;
    const int ne = k + 1;
    std::vector<std::vector<std::vector<ElemEntry>>> tables(dom.patch_count());
    for (auto& t : tables) t.assign(static_cast<size_t>(ne) * ne, {});
    auto elem_range = [&](int c0, int len) {
        // element e holds coefficients [e * mult, e * mult + p]; intersect with the block
        int c1 = c0 + len - 1;
        int lo = (c0 - p <= 0) ? 0 : (c0 - p + mult - 1) / mult;
        int hi = std::min(ne - 1, c1 / mult);
        return std::make_pair(lo, hi);
    };
    for (int fi = 0; fi < space.dim(); ++fi)
        for (const auto& blk : space.functions[fi].parts) {
            auto [r_lo, r_hi] = elem_range(blk.r0, static_cast<int>(blk.a.rows()));
            auto [c_lo, c_hi] = elem_range(blk.c0, static_cast<int>(blk.a.cols()));
            for (int e1 = r_lo; e1 <= r_hi; ++e1)
                for (int e2 = c_lo; e2 <= c_hi; ++e2)
                    tables[blk.patch][static_cast<size_t>(e1) * ne + e2].push_back({fi, &blk});
        }
    return tables;
}

}  // namespace

CollocationSystem assemble(const SmoothSpace& space, const GlobalPointSet& pts,
                           const ManufacturedSolution& data) {
    const MultiPatchDomain& dom = *space.domain;
    const SplineSpace1D& sp1 = space.space1d;
    const int ne = space.cfg.k + 1;
    auto tables = build_element_tables(space);

    // deterministic row order
    std::vector<RowMeta> rows;
    for (size_t i = 0; i < pts.points.size(); ++i)
        if (pts.points[i].role == PointRole::pde)
            rows.push_back({RowKind::pde, static_cast<int>(i), -1});
    for (size_t i = 0; i < pts.points.size(); ++i)
        if (pts.points[i].value_row) rows.push_back({RowKind::value, static_cast<int>(i), -1});
    for (size_t i = 0; i < pts.points.size(); ++i)
        if (pts.points[i].normal == NormalMode::plain)
            rows.push_back({RowKind::normal, static_cast<int>(i), -1});
    for (size_t i = 0; i < pts.points.size(); ++i)
        if (pts.points[i].normal == NormalMode::averaged &&
            pts.points[i].partner > static_cast<int>(i))
            rows.push_back({RowKind::normal_averaged, static_cast<int>(i), pts.points[i].partner});

    CollocationSystem sys;
    sys.rows = rows;
    sys.A.resize(static_cast<int>(rows.size()), space.dim());
    sys.b.resize(static_cast<int>(rows.size()));

    // locate the boundary side of a point for normal rows
    auto boundary_side_of = [&](const GlobalPoint& gp) -> std::pair<int, double> {
        const int n = pts.n1;
        // find the incarnation index in the owner grid
        int i1 = -1, i2 = -1;
        for (int a = 0; a < n && i1 < 0; ++a)
            for (int b = 0; b < n; ++b)
                if (pts.grid_id(gp.owner, a, b) == static_cast<int>(&gp - pts.points.data())) {
                    i1 = a;
                    i2 = b;
                    break;
                }
        for (int side = 0; side < 4; ++side) {
            bool on = (side == 0 && i2 == 0) || (side == 1 && i1 == n - 1) ||
                      (side == 2 && i2 == n - 1) || (side == 3 && i1 == 0);
            if (!on || !dom.side_is_boundary(gp.owner, side)) continue;
            double t = (side == 0 || side == 2) ? gp.local[0] : gp.local[1];
            return {side, t};
        }
        throw std::logic_error("normal row requested away from the boundary");
    };

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(rows.size() * 140);

    auto local_entries = [&](const GlobalPoint& gp) -> const std::vector<ElemEntry>& {
        int e1 = std::min(ne - 1, static_cast<int>(gp.local[0] * ne));
        int e2 = std::min(ne - 1, static_cast<int>(gp.local[1] * ne));
        return tables[gp.owner][static_cast<size_t>(e1) * ne + e2];
    };

    auto contract = [&](const PatchBlock& blk, const BasisEval& e1, const BasisEval& e2, int d1,
                        int d2) {
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
    };

    for (size_t row = 0; row < rows.size(); ++row) {
        const RowMeta& rm = rows[row];
        const GlobalPoint& gp = pts.points[rm.point];
        switch (rm.kind) {
            case RowKind::pde: {
                DerivativeTransfer T(dom.patch(gp.owner), gp.local);
                BasisEval e1 = sp1.eval_basis(gp.local[0], kMaxDeriv);
                BasisEval e2 = sp1.eval_basis(gp.local[1], kMaxDeriv);
                for (const ElemEntry& en : local_entries(gp)) {
                    Jet jet{};
                    for (int d1 = 0; d1 <= kMaxDeriv; ++d1)
                        for (int d2 = 0; d1 + d2 <= kMaxDeriv; ++d2)
                            jet.c[d1][d2] = contract(*en.blk, e1, e2, d1, d2);
                    double val = T.apply(jet).bilaplacian();
                    if (val != 0.0) trips.emplace_back(static_cast<int>(row), en.fn, val);
                }
                sys.b(row) = data.bilap(gp.owner, gp.local, gp.phys);
                break;
            }
            case RowKind::value: {
                BasisEval e1 = sp1.eval_basis(gp.local[0], 0);
                BasisEval e2 = sp1.eval_basis(gp.local[1], 0);
                for (const ElemEntry& en : local_entries(gp)) {
                    double val = contract(*en.blk, e1, e2, 0, 0);
                    if (val != 0.0) trips.emplace_back(static_cast<int>(row), en.fn, val);
                }
                sys.b(row) = data.u(gp.owner, gp.local, gp.phys);
                break;
            }
            case RowKind::normal:
            case RowKind::normal_averaged: {
                std::array<const GlobalPoint*, 2> members{&gp, nullptr};
                int nmember = 1;
                double weight = 1.0;
                if (rm.kind == RowKind::normal_averaged) {
                    members[1] = &pts.points[rm.partner];
                    nmember = 2;
                    weight = 0.5;
                }
                double rhs = 0.0;
                for (int m = 0; m < nmember; ++m) {
                    const GlobalPoint& q = *members[m];
                    auto [side, t] = boundary_side_of(q);
                    Vec2 nvec = outward_normal(dom, q.owner, side, t);
                    DerivativeTransfer T(dom.patch(q.owner), q.local);
                    BasisEval e1 = sp1.eval_basis(q.local[0], 1);
                    BasisEval e2 = sp1.eval_basis(q.local[1], 1);
                    for (const ElemEntry& en : local_entries(q)) {
                        Vec2 pg{contract(*en.blk, e1, e2, 1, 0), contract(*en.blk, e1, e2, 0, 1)};
                        double val = weight * nvec.dot(T.gradient(pg));
                        if (val != 0.0) trips.emplace_back(static_cast<int>(row), en.fn, val);
                    }
                    rhs += weight * nvec.dot(data.grad(q.owner, q.local, q.phys));
                }
                sys.b(row) = rhs;
                break;
            }
        }
    }
    sys.A.setFromTriplets(trips.begin(), trips.end());
    sys.A.makeCompressed();
    return sys;
}

void CollocationSystem::dump(std::ostream& matrix_os, std::ostream& rhs_os) const {
    matrix_os << std::setprecision(17);
    rhs_os << std::setprecision(17);
    for (int r = 0; r < A.outerSize(); ++r)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, r); it; ++it)
            matrix_os << it.row() << " " << it.col() << " " << it.value() << "\n";
    for (int r = 0; r < b.size(); ++r) rhs_os << b(r) << "\n";
}

}  // namespace sc
