/** @file lsq.hpp

    @brief Least-squares solution of the (generally overdetermined) collocation
    system with conditioning estimates.
*/

#pragma once

#include "smoothcolloc/assembly.hpp"

namespace sc {

struct SolveReport {
    Eigen::VectorXd c;
    double residual = 0.0;   // || A c - b ||_2
    double condition = 1.0;  // >= 1
    std::string method;      // qr-dense | qr-sparse | qr-seminormal | scaled-normal
};

/// Minimizes || A c - b ||_2 through an orthogonal factorization of the
/// column-equilibrated matrix: dense rank-revealing QR below 2000 columns,
/// sparse QR in the mid range, and a Cholesky-based seminormal R factor with
/// iterative refinement for the largest systems (escalating back to sparse QR
/// when the refinement fails to reach optimality). Throws on rank deficiency.
SolveReport solve_qr(const CollocationSystem& sys);

/// Diagonally scaled normal equations, kept for the conditioning comparison.
SolveReport solve_scaled_normal(const CollocationSystem& sys);

}  // namespace sc
