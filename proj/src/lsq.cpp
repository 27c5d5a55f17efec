#include "smoothcolloc/lsq.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseQR>
#include <cmath>

namespace sc {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// residual b - A y accumulated in extended precision; with plain double
// residuals the refined solution stalls at kappa * eps, which is visible in
// the fine-level error floors of the convergence studies
Eigen::VectorXd residual_ld(const SpMat& A, const Eigen::VectorXd& y, const Eigen::VectorXd& b) {
    std::vector<long double> acc(A.rows());
    for (int i = 0; i < A.rows(); ++i) acc[i] = b(i);
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            acc[it.row()] -= static_cast<long double>(it.value()) * static_cast<long double>(y(it.col()));
    Eigen::VectorXd r(A.rows());
    for (int i = 0; i < A.rows(); ++i) r(i) = static_cast<double>(acc[i]);
    return r;
}

Eigen::VectorXd column_norms(const SpMat& A) {
    Eigen::VectorXd n = Eigen::VectorXd::Zero(A.cols());
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) n(it.col()) += it.value() * it.value();
    return n.cwiseSqrt();
}

// power iteration bounds for the extreme eigenvalues of an SPD operator
template <class MultOp, class SolveOp>
std::pair<double, double> spd_extremes(int n, MultOp&& mult, SolveOp&& solve) {
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0).normalized();
    double lmax = 1.0;
    for (int it = 0; it < 30; ++it) {
        v = mult(v);
        lmax = v.norm();
        if (lmax == 0.0) return {0.0, 0.0};
        v /= lmax;
    }
    Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(n, 2.0, 1.0).normalized();
    double lmin = lmax;
    for (int it = 0; it < 30; ++it) {
        w = solve(w);
        double nw = w.norm();
        if (nw == 0.0) break;
        lmin = 1.0 / nw;
        w /= nw;
    }
    return {lmax, lmin};
}

SolveReport solve_dense_qr(const CollocationSystem& sys, const Eigen::VectorXd& dinv) {
    Eigen::MatrixXd Ad = Eigen::MatrixXd(sys.A) * dinv.asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Ad);
    const auto& R = qr.matrixR();
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < std::min(R.rows(), R.cols()); ++i) {
        double d = std::abs(R(i, i));
        rmax = std::max(rmax, d);
        rmin = std::min(rmin, d);
    }
    if (!(rmin > 1e-12 * rmax)) {
        // name the first offending column in the pivot order
        int col = qr.colsPermutation().indices()(qr.rank() < sys.A.cols() ? qr.rank() : 0);
        throw std::runtime_error("collocation matrix is rank deficient near column " +
                                 std::to_string(col));
    }
    SolveReport rep;
    Eigen::VectorXd y = qr.solve(sys.b);
    SpMat Asp = Ad.sparseView();
    for (int it = 0; it < 3; ++it) y += qr.solve(residual_ld(Asp, y, sys.b));
    rep.c = dinv.asDiagonal() * y;
    rep.residual = (sys.A * rep.c - sys.b).norm();
    rep.condition = std::max(1.0, rmax / rmin);
    rep.method = "qr-dense";
    return rep;
}

SolveReport solve_sparse_qr(const CollocationSystem& sys, const Eigen::VectorXd& dinv) {
    SpMat Ad = SpMat(sys.A) * dinv.asDiagonal();
    Ad.makeCompressed();
    Eigen::SparseQR<SpMat, Eigen::COLAMDOrdering<int>> qr;
    qr.compute(Ad);
    if (qr.info() != Eigen::Success) throw std::runtime_error("sparse QR factorization failed");
    const SpMat& R = qr.matrixR();
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < std::min(R.rows(), R.cols()); ++i) {
        double d = std::abs(R.coeff(i, i));
        rmax = std::max(rmax, d);
        rmin = std::min(rmin, d);
    }
    if (!(rmin > 1e-12 * rmax))
        throw std::runtime_error("collocation matrix is rank deficient (sparse QR diagonal)");
    SolveReport rep;
    Eigen::VectorXd y = qr.solve(sys.b);
    // refinement against the least-squares optimality condition
    for (int it = 0; it < 3; ++it) y += qr.solve(residual_ld(Ad, y, sys.b));
    rep.c = dinv.asDiagonal() * y;
    rep.residual = (sys.A * rep.c - sys.b).norm();
    rep.condition = std::max(1.0, rmax / rmin);
    rep.method = "qr-sparse";
    return rep;
}

SolveReport solve_seminormal(const CollocationSystem& sys, const Eigen::VectorXd& dinv,
                             bool* converged) {
    SpMat Ad = SpMat(sys.A) * dinv.asDiagonal();
    Ad.makeCompressed();
    SpMat G = SpMat(Ad.transpose()) * Ad;
    G.makeCompressed();
    Eigen::SimplicialLLT<SpMat> llt;
    llt.compute(G);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("seminormal factorization failed (matrix rank deficient?)");
    Eigen::VectorXd atb = Ad.transpose() * sys.b;
    Eigen::VectorXd y = llt.solve(atb);
    // refinement drives the normal-equation residual to optimality
    double target = 1e-12 * std::max(atb.norm(), 1e-300);
    *converged = false;
    for (int it = 0; it < 8; ++it) {
        Eigen::VectorXd g = Ad.transpose() * residual_ld(Ad, y, sys.b);
        if (g.norm() <= target) {
            *converged = true;
            break;
        }
        y += llt.solve(g);
    }
    if (!*converged) {
        Eigen::VectorXd g = Ad.transpose() * residual_ld(Ad, y, sys.b);
        *converged = g.norm() <= 1e-8 * std::max(atb.norm(), 1e-300);
    }
    SolveReport rep;
    rep.c = dinv.asDiagonal() * y;
    rep.residual = (sys.A * rep.c - sys.b).norm();
    // R diagonal of the Cholesky factor doubles as the QR R diagonal
    SpMat L = llt.matrixL();
    Eigen::VectorXd diag = L.diagonal();
    double rmax = diag.maxCoeff(), rmin = diag.minCoeff();
    rep.condition = std::max(1.0, rmax / std::max(rmin, 1e-300));
    rep.method = "qr-seminormal";
    return rep;
}

}  // namespace

SolveReport solve_qr(const CollocationSystem& sys) {
    if (sys.A.rows() < sys.A.cols())
        throw std::invalid_argument("collocation system has fewer rows than columns");
    Eigen::VectorXd norms = column_norms(SpMat(sys.A));
    for (int i = 0; i < norms.size(); ++i)
        if (norms(i) < 1e-300)
            throw std::runtime_error("collocation matrix has an empty column " + std::to_string(i));
    Eigen::VectorXd dinv = norms.cwiseInverse();
    if (sys.A.cols() < 2000) return solve_dense_qr(sys, dinv);
    if (sys.A.cols() <= 12000) return solve_sparse_qr(sys, dinv);
    bool converged = false;
    SolveReport rep = solve_seminormal(sys, dinv, &converged);
    if (!converged) return solve_sparse_qr(sys, dinv);
    return rep;
}

SolveReport solve_scaled_normal(const CollocationSystem& sys) {
    if (sys.A.rows() < sys.A.cols())
        throw std::invalid_argument("collocation system has fewer rows than columns");
    SpMat A(sys.A);
    Eigen::VectorXd norms = column_norms(A);
    Eigen::VectorXd dinv = norms.cwiseInverse();
    SpMat Ad = A * dinv.asDiagonal();
    SpMat G = SpMat(Ad.transpose()) * Ad;
    G.makeCompressed();
    SolveReport rep;
    rep.method = "scaled-normal";
    if (sys.A.cols() < 2000) {
        Eigen::MatrixXd Gd(G);
        Eigen::LLT<Eigen::MatrixXd> llt(Gd);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("scaled normal matrix is not positive definite");
        rep.c = dinv.asDiagonal() * llt.solve(Eigen::VectorXd(Ad.transpose() * sys.b));
        auto [lmax, lmin] = spd_extremes(
            static_cast<int>(G.cols()), [&](const Eigen::VectorXd& v) { return Gd * v; },
            [&](const Eigen::VectorXd& v) { return llt.solve(v); });
        rep.condition = std::max(1.0, lmax / std::max(lmin, 1e-300));
    } else {
        Eigen::SimplicialLLT<SpMat> llt;
        llt.compute(G);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("scaled normal matrix is not positive definite");
        rep.c = dinv.asDiagonal() * llt.solve(Eigen::VectorXd(Ad.transpose() * sys.b));
        auto [lmax, lmin] = spd_extremes(
            static_cast<int>(G.cols()), [&](const Eigen::VectorXd& v) { return G * v; },
            [&](const Eigen::VectorXd& v) { return llt.solve(v); });
        rep.condition = std::max(1.0, lmax / std::max(lmin, 1e-300));
    }
    rep.residual = (sys.A * rep.c - sys.b).norm();
    return rep;
}

}  // namespace sc
