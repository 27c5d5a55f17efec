#include "smoothcolloc/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace sc {

namespace {
constexpr int kBinom[5][5] = {
    {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
}

Jet Jet::constant(double v) {
    Jet j;
    j.c[0][0] = v;
    return j;
}

Jet Jet::operator+(const Jet& o) const {
    Jet r;
    r.ord = std::min(ord, o.ord);
    for (int i = 0; i <= r.ord; ++i)
        for (int j = 0; i + j <= r.ord; ++j) r.c[i][j] = c[i][j] + o.c[i][j];
    return r;
}

Jet Jet::operator-(const Jet& o) const {
    Jet r;
    r.ord = std::min(ord, o.ord);
    for (int i = 0; i <= r.ord; ++i)
        for (int j = 0; i + j <= r.ord; ++j) r.c[i][j] = c[i][j] - o.c[i][j];
    return r;
}

Jet Jet::operator*(const Jet& o) const {
    Jet r;
    r.ord = std::min(ord, o.ord);
    for (int i = 0; i <= r.ord; ++i)
        for (int j = 0; i + j <= r.ord; ++j) {
            double s = 0.0;
            for (int a = 0; a <= i; ++a)
                for (int b = 0; b <= j; ++b)
                    s += kBinom[i][a] * kBinom[j][b] * c[a][b] * o.c[i - a][j - b];
            r.c[i][j] = s;
        }
    return r;
}

Jet Jet::operator*(double s) const {
    Jet r = *this;
    for (auto& row : r.c)
        for (auto& v : row) v *= s;
    return r;
}

Jet Jet::reciprocal() const {
    if (std::abs(c[0][0]) < 1e-300) throw std::runtime_error("jet reciprocal at zero value");
    Jet r;
    r.ord = ord;
    // solve (this * r) = 1 degree by degree
    for (int total = 0; total <= ord; ++total) {
        for (int i = 0; i <= total; ++i) {
            int j = total - i;
            double s = (total == 0) ? 1.0 : 0.0;
            for (int a = 0; a <= i; ++a)
                for (int b = 0; b <= j; ++b) {
                    if (a == 0 && b == 0) continue;
                    s -= kBinom[i][a] * kBinom[j][b] * c[a][b] * r.c[i - a][j - b];
                }
            r.c[i][j] = s / c[0][0];
        }
    }
    return r;
}

Jet Jet::d1() const {
    Jet r;
    r.ord = ord - 1;
    for (int i = 0; i <= r.ord; ++i)
        for (int j = 0; i + j <= r.ord; ++j) r.c[i][j] = c[i + 1][j];
    return r;
}

Jet Jet::d2() const {
    Jet r;
    r.ord = ord - 1;
    for (int i = 0; i <= r.ord; ++i)
        for (int j = 0; i + j <= r.ord; ++j) r.c[i][j] = c[i][j + 1];
    return r;
}

Jet AxisMap::pullback(const Jet& patch_jet) const {
    Jet r;
    r.ord = patch_jet.ord;
    double s1 = sign_axis1(), s2 = sign_axis2();
    for (int i = 0; i <= r.ord; ++i)
        for (int j = 0; i + j <= r.ord; ++j) {
            // view derivative (i, j): patch orders (i, j) or swapped
            int pi = swap ? j : i;
            int pj = swap ? i : j;
            double sign = std::pow(s1, pi) * std::pow(s2, pj);
            r.c[i][j] = sign * patch_jet.c[pi][pj];
        }
    return r;
}

GeometryMap::GeometryMap(int degree, std::vector<Vec2> net) : deg_(degree), net_(std::move(net)) {
    if (degree < 1 || degree > kMaxDegree) throw std::invalid_argument("patch bi-degree must be in [1, 9]");
    if (static_cast<int>(net_.size()) != (degree + 1) * (degree + 1))
        throw std::invalid_argument("control net size must be (d+1)^2");
    bern_ = SplineSpace1D::make(degree, degree - 1, 0);
}

Vec2 GeometryMap::corner(int c) const {
    const int d = deg_;
    switch (c) {
        case 0: return net_[0];
        case 1: return net_[static_cast<size_t>(d) * (d + 1)];
        case 2: return net_[static_cast<size_t>(d) * (d + 1) + d];
        case 3: return net_[d];
        default: throw std::invalid_argument("corner index must be 0..3");
    }
}

Vec2 GeometryMap::eval(const Vec2& xi) const { return deriv(xi, 0, 0); }

Vec2 GeometryMap::deriv(const Vec2& xi, int d1, int d2) const {
    BasisEval e1 = bern_.eval_basis(xi[0], d1);
    BasisEval e2 = bern_.eval_basis(xi[1], d2);
    Vec2 out = Vec2::Zero();
    for (int i = 0; i <= deg_; ++i)
        for (int j = 0; j <= deg_; ++j)
            out += e1.der[d1][i] * e2.der[d2][j] * net_[static_cast<size_t>(i) * (deg_ + 1) + j];
    return out;
}

void GeometryMap::jets(const Vec2& xi, Jet& fx, Jet& fy) const {
    BasisEval e1 = bern_.eval_basis(xi[0], kMaxDeriv);
    BasisEval e2 = bern_.eval_basis(xi[1], kMaxDeriv);
    fx = Jet{};
    fy = Jet{};
    for (int a = 0; a <= kMaxDeriv; ++a)
        for (int b = 0; a + b <= kMaxDeriv; ++b) {
            Vec2 v = Vec2::Zero();
            for (int i = 0; i <= deg_; ++i)
                for (int j = 0; j <= deg_; ++j)
                    v += e1.der[a][i] * e2.der[b][j] * net_[static_cast<size_t>(i) * (deg_ + 1) + j];
            fx.c[a][b] = v[0];
            fy.c[a][b] = v[1];
        }
}

Mat2 GeometryMap::jacobian(const Vec2& xi) const {
    Mat2 J;
    Vec2 g1 = deriv(xi, 1, 0), g2 = deriv(xi, 0, 1);
    J << g1[0], g2[0], g1[1], g2[1];
    return J;
}

double GeometryMap::jacobian_det(const Vec2& xi) const { return jacobian(xi).determinant(); }

Mat2 GeometryMap::jacobian_inverse(const Vec2& xi) const {
    Mat2 J = jacobian(xi);
    double det = J.determinant();
    if (std::abs(det) < 1e-14) throw std::runtime_error("singular geometry jacobian");
    Mat2 inv;
    inv << J(1, 1), -J(0, 1), -J(1, 0), J(0, 0);
    return inv / det;
}

bool GeometryMap::is_regular() const {
    double sign = 0.0;
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) {
            Vec2 xi{i / 49.0, j / 49.0};
            double det = jacobian_det(xi);
            if (std::abs(det) < 1e-14) return false;
            if (sign == 0.0)
                sign = det > 0 ? 1.0 : -1.0;
            else if (det * sign < 0)
                return false;
        }
    return true;
}

int jet_index(int i, int j) {
    // groups of equal total order: (0,0) | (1,0),(0,1) | (2,0),(1,1),(0,2) | ...
    int t = i + j;
    return t * (t + 1) / 2 + j;
}

PhysicalDerivs chain_physical(const Jet& f, const Jet& gx, const Jet& gy) {
    // K = J^{-1} as jets, with J = [[gx.d1, gx.d2], [gy.d1, gy.d2]]
    Jet j11 = gx.d1(), j12 = gx.d2(), j21 = gy.d1(), j22 = gy.d2();
    Jet det = j11 * j22 - j12 * j21;
    Jet idet = det.reciprocal();
    Jet k11 = j22 * idet, k12 = j12 * (-1.0) * idet;
    Jet k21 = j21 * (-1.0) * idet, k22 = j11 * idet;

    PhysicalDerivs out;
    // level-by-level: G[(i,j)] is the jet of the physical partial d^i_x d^j_y f
    std::array<std::array<Jet, kMaxDeriv + 1>, kMaxDeriv + 1> G;
    G[0][0] = f;
    out.d[0][0] = f.value();
    for (int total = 1; total <= kMaxDeriv; ++total) {
        for (int i = total; i >= 0; --i) {
            int j = total - i;
            const Jet& base = (i > 0) ? G[i - 1][j] : G[i][j - 1];
            Jet b1 = base.d1(), b2 = base.d2();
            // physical x-derivative: K^T row 1; y-derivative: K^T row 2
            Jet next = (i > 0) ? (k11 * b1 + k21 * b2) : (k12 * b1 + k22 * b2);
            G[i][j] = next;
            out.d[i][j] = next.value();
        }
    }
    return out;
}

DerivativeTransfer::DerivativeTransfer(const GeometryMap& map, const Vec2& xi) {
    Jet gx, gy;
    map.jets(xi, gx, gy);
    det_ = gx.c[1][0] * gy.c[0][1] - gx.c[0][1] * gy.c[1][0];
    if (std::abs(det_) < 1e-14) throw std::runtime_error("singular geometry jacobian");
    jinv_ << gy.c[0][1], -gx.c[0][1], -gy.c[1][0], gx.c[1][0];
    jinv_ /= det_;
    // columns: images of unit parametric jets
    for (int a = 0; a <= kMaxDeriv; ++a)
        for (int b = 0; a + b <= kMaxDeriv; ++b) {
            Jet e{};
            e.c[a][b] = 1.0;
            PhysicalDerivs pd = chain_physical(e, gx, gy);
            int col = jet_index(a, b);
            for (int i = 0; i <= kMaxDeriv; ++i)
                for (int j = 0; i + j <= kMaxDeriv; ++j) op_(jet_index(i, j), col) = pd.d[i][j];
        }
}

PhysicalDerivs DerivativeTransfer::apply(const Jet& parametric) const {
    Eigen::Matrix<double, kJetLen, 1> v;
    for (int i = 0; i <= kMaxDeriv; ++i)
        for (int j = 0; i + j <= kMaxDeriv; ++j) v(jet_index(i, j)) = parametric.c[i][j];
    Eigen::Matrix<double, kJetLen, 1> w = op_ * v;
    PhysicalDerivs out;
    for (int i = 0; i <= kMaxDeriv; ++i)
        for (int j = 0; i + j <= kMaxDeriv; ++j) out.d[i][j] = w(jet_index(i, j));
    return out;
}

Vec2 DerivativeTransfer::gradient(const Vec2& parametric_grad) const {
    return jinv_.transpose() * parametric_grad;
}

}  // namespace sc
