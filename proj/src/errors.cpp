#include "smoothcolloc/errors.hpp"

#include <cmath>
#include <limits>

namespace sc {

GaussRule GaussRule::make(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton on the Legendre polynomial from the Chebyshev estimate
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[n - 1 - i] = 0.5 * (x + 1.0);
        r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

namespace {

struct Kahan {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

ErrorReport relative_errors(const SmoothSpace& space, const Eigen::VectorXd& c,
                            const ManufacturedSolution& exact) {
    if (c.size() != space.dim())
        throw std::invalid_argument("coefficient count does not match the space dimension");
    const MultiPatchDomain& dom = *space.domain;
    const SplineSpace1D& sp1 = space.space1d;
    const int n = space.n1();
    const int p = space.cfg.p;
    const int ne = space.cfg.k + 1;
    GaussRule rule = GaussRule::make(p + 1);

    // composite coefficient grid per patch
    std::vector<Eigen::MatrixXd> grids(dom.patch_count(), Eigen::MatrixXd::Zero(n, n));
    for (int i = 0; i < space.dim(); ++i)
        for (const auto& blk : space.functions[i].parts)
            grids[blk.patch].block(blk.r0, blk.c0, blk.a.rows(), blk.a.cols()) += c(i) * blk.a;

    std::array<Kahan, 5> num, den;
    for (int patch = 0; patch < dom.patch_count(); ++patch) {
        const Eigen::MatrixXd& G = grids[patch];
        for (int e1 = 0; e1 < ne; ++e1)
            for (int e2 = 0; e2 < ne; ++e2)
                for (int q1 = 0; q1 <= p; ++q1)
                    for (int q2 = 0; q2 <= p; ++q2) {
                        Vec2 xi{(e1 + rule.nodes[q1]) / ne, (e2 + rule.nodes[q2]) / ne};
                        BasisEval b1 = sp1.eval_basis(xi[0], kMaxDeriv);
                        BasisEval b2 = sp1.eval_basis(xi[1], kMaxDeriv);
                        Jet jet{};
                        for (int d1 = 0; d1 <= kMaxDeriv; ++d1)
                            for (int d2 = 0; d1 + d2 <= kMaxDeriv; ++d2) {
                                double v = 0.0;
                                for (int i = 0; i < b1.count; ++i) {
                                    double row = 0.0;
                                    for (int j = 0; j < b2.count; ++j)
                                        row += G(b1.first + i, b2.first + j) * b2.der[d2][j];
                                    v += row * b1.der[d1][i];
                                }
                                jet.c[d1][d2] = v;
                            }
                        DerivativeTransfer T(dom.patch(patch), xi);
                        PhysicalDerivs uh = T.apply(jet);
                        Vec2 x = dom.patch(patch).eval(xi);
                        double w =
                            rule.weights[q1] * rule.weights[q2] / (ne * ne) * std::abs(T.jacobian_det());

                        double ue = exact.u(patch, xi, x);
                        Vec2 ge = exact.grad(patch, xi, x);
                        double le = exact.lap(patch, xi, x);
                        Vec2 gle = exact.grad_lap(patch, xi, x);
                        double be = exact.bilap(patch, xi, x);

                        num[0].add(w * (ue - uh.value()) * (ue - uh.value()));
                        den[0].add(w * ue * ue);
                        num[1].add(w * (ge - uh.gradient()).squaredNorm());
                        den[1].add(w * ge.squaredNorm());
                        num[2].add(w * (le - uh.laplacian()) * (le - uh.laplacian()));
                        den[2].add(w * le * le);
                        num[3].add(w * (gle - uh.grad_laplacian()).squaredNorm());
                        den[3].add(w * gle.squaredNorm());
                        num[4].add(w * (be - uh.bilaplacian()) * (be - uh.bilaplacian()));
                        den[4].add(w * be * be);
                    }
    }
    ErrorReport rep;
    rep.h = sp1.mesh_size();
    for (int m = 0; m < 5; ++m) {
        if (den[m].sum < 1e-28) throw std::runtime_error("degenerate exact solution (zero norm)");
        rep.e[m] = std::sqrt(num[m].sum / den[m].sum);
    }
    return rep;
}

std::array<double, 5> convergence_orders(const ErrorReport& coarse, const ErrorReport& fine) {
    std::array<double, 5> orders;
    double ratio = coarse.h / fine.h;
    if (std::abs(ratio - 2.0) > 1e-9)
        throw std::invalid_argument("orders are defined between consecutive halvings of h");
    for (int m = 0; m < 5; ++m) {
        if (coarse.e[m] <= 0.0 || fine.e[m] <= 0.0)
            orders[m] = std::numeric_limits<double>::quiet_NaN();
        else
            orders[m] = std::log2(coarse.e[m] / fine.e[m]);
    }
    return orders;
}

}  // namespace sc
