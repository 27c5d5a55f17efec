/** @file errors.hpp

    @brief Relative error measures by patchwise Gauss quadrature and
    convergence-order estimation across refinement levels.
*/

#pragma once

#include <array>

#include "smoothcolloc/assembly.hpp"

namespace sc {

/// Gauss-Legendre rule on [0, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    static GaussRule make(int n);
};

/// Relative errors: L2, H1 seminorm, and the Laplacian-based equivalents of
/// the H2, H3, H4 seminorms.
struct ErrorReport {
    double h = 0.0;
    std::array<double, 5> e{};  // eL2, eH1, eH2eq, eH3eq, eH4eq
};

/// (p+1)^2-point Gauss quadrature per knot-span element with physical measure.
ErrorReport relative_errors(const SmoothSpace& space, const Eigen::VectorXd& coefficients,
                            const ManufacturedSolution& exact);

/// order = log2(e_coarse / e_fine) for one halving of h; NaN where undefined.
std::array<double, 5> convergence_orders(const ErrorReport& coarse, const ErrorReport& fine);

}  // namespace sc
