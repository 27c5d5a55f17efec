/** @file geometry.hpp

    @brief Tensor-product polynomial patch maps, parametric jets up to fourth
    order, and the chain rule that converts them to physical derivatives.
*/

#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "smoothcolloc/bspline.hpp"

namespace sc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Truncated bivariate Taylor data: c[i][j] = d^{i+j} f / (dxi1^i dxi2^j),
/// valid for total orders i + j <= ord.
struct Jet {
    std::array<std::array<double, kMaxDeriv + 1>, kMaxDeriv + 1> c{};
    int ord = kMaxDeriv;

    double value() const { return c[0][0]; }
    static Jet constant(double v);

    Jet operator+(const Jet& o) const;
    Jet operator-(const Jet& o) const;
    Jet operator*(const Jet& o) const;
    Jet operator*(double s) const;
    Jet reciprocal() const;
    Jet d1() const;  ///< derivative in the first parametric direction
    Jet d2() const;
};

/// All physical partial derivatives d^{i+j} f / (dx^i dy^j), i + j <= 4.
struct PhysicalDerivs {
    std::array<std::array<double, kMaxDeriv + 1>, kMaxDeriv + 1> d{};

    double value() const { return d[0][0]; }
    Vec2 gradient() const { return {d[1][0], d[0][1]}; }
    double laplacian() const { return d[2][0] + d[0][2]; }
    Vec2 grad_laplacian() const { return {d[3][0] + d[1][2], d[2][1] + d[0][3]}; }
    double bilaplacian() const { return d[4][0] + 2.0 * d[2][2] + d[0][4]; }
};

/// Axis-aligned affine relabeling of the unit square: optional coordinate swap
/// followed by per-patch-axis reversals. Maps view coordinates to patch coordinates.
struct AxisMap {
    bool swap = false;
    bool flip1 = false;  ///< reversal of patch axis 1
    bool flip2 = false;  ///< reversal of patch axis 2

    Vec2 apply(const Vec2& u) const {
        double t1 = swap ? u[1] : u[0];
        double t2 = swap ? u[0] : u[1];
        return {flip1 ? 1.0 - t1 : t1, flip2 ? 1.0 - t2 : t2};
    }
    /// view grid index (a, b) -> patch grid index (i, j) for an n1 x n2 grid
    std::pair<int, int> index(int a, int b, int n1, int n2) const {
        int i = swap ? b : a;
        int j = swap ? a : b;
        if (flip1) i = n1 - 1 - i;
        if (flip2) j = n2 - 1 - j;
        return {i, j};
    }
    /// signs of d(patch axis)/d(view axis) for the view axis feeding each patch axis
    double sign_axis1() const { return flip1 ? -1.0 : 1.0; }
    double sign_axis2() const { return flip2 ? -1.0 : 1.0; }
    /// pulls a patch-coordinate jet back to view coordinates
    Jet pullback(const Jet& patch_jet) const;
};

/// Polynomial tensor-product geometry map of bi-degree d with a
/// (d+1) x (d+1) control net (Bernstein representation).
class GeometryMap {
public:
    GeometryMap() = default;
    /// net in row-major order, net[i * (d+1) + j] with i along xi1 and j along xi2
    GeometryMap(int degree, std::vector<Vec2> net);

    int degree() const { return deg_; }
    const std::vector<Vec2>& net() const { return net_; }
    Vec2 corner(int c) const;  ///< corners 0..3: (0,0), (1,0), (1,1), (0,1)

    Vec2 eval(const Vec2& xi) const;
    /// partial derivative of order (d1, d2), total order <= 4
    Vec2 deriv(const Vec2& xi, int d1, int d2) const;
    /// component jets at xi (orders <= 4, exact for bi-degree <= 4 ... truncated above)
    void jets(const Vec2& xi, Jet& fx, Jet& fy) const;

    Mat2 jacobian(const Vec2& xi) const;
    double jacobian_det(const Vec2& xi) const;
    /// throws when |det J| < 1e-14
    Mat2 jacobian_inverse(const Vec2& xi) const;

    /// det J has one sign on a 50 x 50 sample grid and never degenerates
    bool is_regular() const;

private:
    int deg_ = 1;
    SplineSpace1D bern_;
    std::vector<Vec2> net_;
};

/// Precomputed linear operator turning parametric jets into physical
/// derivatives at one point of one geometry map (higher-order chain rule).
class DerivativeTransfer {
public:
    DerivativeTransfer(const GeometryMap& map, const Vec2& xi);

    PhysicalDerivs apply(const Jet& parametric) const;
    /// physical gradient of a function with parametric gradient g
    Vec2 gradient(const Vec2& parametric_grad) const;
    const Mat2& jacobian_inverse() const { return jinv_; }
    double jacobian_det() const { return det_; }

private:
    static constexpr int kJetLen = 15;  // pairs (i,j), i + j <= 4
    Eigen::Matrix<double, kJetLen, kJetLen> op_;
    Mat2 jinv_;
    double det_ = 0.0;
};

/// Full chain rule on explicit jets; DerivativeTransfer is its linearization.
PhysicalDerivs chain_physical(const Jet& f, const Jet& gx, const Jet& gy);

int jet_index(int i, int j);  ///< flattening used by DerivativeTransfer

}  // namespace sc
