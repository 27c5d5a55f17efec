/** @file bspline.hpp

    @brief Univariate B-spline spaces on [0,1] with open uniform knots,
    derivative evaluation up to fourth order, Greville abscissae and
    degree-preserving knot refinement.
*/

#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace sc {

/// Largest spline degree the library supports (tensor stencils are sized for it).
inline constexpr int kMaxDegree = 9;
/// Highest derivative order needed anywhere (biharmonic operator).
inline constexpr int kMaxDeriv = 4;

/// Values and derivatives of the basis functions that are nonzero on one knot span.
struct BasisEval {
    int span = 0;   ///< knot span index, t[span] <= x < t[span+1]
    int first = 0;  ///< global index of the first nonzero basis function (= span - p)
    int count = 0;  ///< number of nonzero basis functions (= p + 1)
    /// der[d][j] = d-th derivative of basis function (first + j) at x.
    std::array<std::array<double, kMaxDegree + 1>, kMaxDeriv + 1> der{};
};

/// Univariate spline space S_h^{p,r} on [0,1]: open uniform knot vector with
/// k distinct inner knots i/(k+1), each of multiplicity p - r.
class SplineSpace1D {
public:
    SplineSpace1D() = default;

    /// p >= 1, 0 <= r <= p-1, k >= 0. Throws std::invalid_argument otherwise.
    static SplineSpace1D make(int p, int r, int k);

    int degree() const { return p_; }
    int regularity() const { return r_; }
    int inner_knot_count() const { return k_; }
    int dim() const { return n_; }
    double mesh_size() const { return h_; }
    const std::vector<double>& knots() const { return knots_; }

    /// Knot span containing x. Right-continuous at knots; x = 1 maps to the last span.
    int find_span(double x) const;

    /// All nonzero basis functions and derivatives up to max_deriv at x in [0,1].
    BasisEval eval_basis(double x, int max_deriv) const;

    /// Single basis function derivative; zero when j is outside the active span.
    double eval_one(int j, double x, int deriv) const;

    /// Greville abscissae, one per basis function.
    std::vector<double> greville() const;

    /// Value (and derivatives) of the spline with the given coefficients.
    double eval_spline(const std::vector<double>& coeffs, double x, int deriv = 0) const;

    /// Coefficients of the same spline after inserting knot u once (Boehm).
    std::vector<double> insert_knot(const std::vector<double>& coeffs, double u,
                                    std::vector<double>* new_knots = nullptr) const;

    /// Re-expresses a spline of this space in `target`, whose knot vector must
    /// refine this one (same degree, higher inner multiplicities).
    std::vector<double> refine_to(const SplineSpace1D& target,
                                  const std::vector<double>& coeffs) const;

private:
    int p_ = 0, r_ = 0, k_ = 0, n_ = 0;
    double h_ = 1.0;
    std::vector<double> knots_;
};

/// Dense interpolation operator at prescribed nodes (Greville by default);
/// used to extract exact B-spline coefficients of functions known to lie in the space.
class Interpolant1D {
public:
    explicit Interpolant1D(const SplineSpace1D& space);
    Interpolant1D(const SplineSpace1D& space, const std::vector<double>& nodes);

    const std::vector<double>& nodes() const { return nodes_; }

    /// Coefficients c with sum_j c_j N_j(node_i) = values_i.
    std::vector<double> solve(const std::vector<double>& values) const;

private:
    SplineSpace1D space_;
    std::vector<double> nodes_;
    std::vector<double> lu_;     // packed LU factors (row major with pivoting)
    std::vector<int> piv_;
    void factor();
};

}  // namespace sc
