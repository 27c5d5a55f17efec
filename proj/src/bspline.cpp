#include "smoothcolloc/bspline.hpp"

#include <algorithm>
#include <cmath>

namespace sc {

SplineSpace1D SplineSpace1D::make(int p, int r, int k) {
    if (p < 1 || p > kMaxDegree) throw std::invalid_argument("spline degree must be in [1, 9]");
    if (r < 0 || r >= p) throw std::invalid_argument("regularity must satisfy 0 <= r <= p-1");
    if (k < 0) throw std::invalid_argument("inner knot count must be nonnegative");
    SplineSpace1D s;
    s.p_ = p;
    s.r_ = r;
    s.k_ = k;
    s.h_ = 1.0 / (k + 1);
    s.n_ = p + 1 + k * (p - r);
    s.knots_.reserve(2 * (p + 1) + k * (p - r));
    for (int i = 0; i <= p; ++i) s.knots_.push_back(0.0);
    for (int i = 1; i <= k; ++i)
        for (int m = 0; m < p - r; ++m) s.knots_.push_back(static_cast<double>(i) / (k + 1));
    for (int i = 0; i <= p; ++i) s.knots_.push_back(1.0);
    return s;
}

int SplineSpace1D::find_span(double x) const {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("evaluation point outside [0,1]");
    // last nonempty span starts at index n-1
    if (x >= 1.0) return n_ - 1;
    int lo = p_, hi = n_;  // span in [p, n-1]
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (x < knots_[mid])
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

BasisEval SplineSpace1D::eval_basis(double x, int max_deriv) const {
    if (max_deriv < 0 || max_deriv > kMaxDeriv)
        throw std::invalid_argument("derivative order must be in [0, 4]");
    BasisEval out;
    const int p = p_;
    const int span = find_span(x);
    out.span = span;
    out.first = span - p;
    out.count = p + 1;

    // Cox-de Boor triangle with saved knot differences (Piegl-Tiller A2.3).
    double ndu[kMaxDegree + 1][kMaxDegree + 1];
    double left[kMaxDegree + 1], right[kMaxDegree + 1];
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - knots_[span + 1 - j];
        right[j] = knots_[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    for (int j = 0; j <= p; ++j) out.der[0][j] = ndu[j][p];

    const int du = std::min(max_deriv, p);
    double a[2][kMaxDegree + 1];
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int kk = 1; kk <= du; ++kk) {
            double d = 0.0;
            int rk = r - kk, pk = p - kk;
            if (r >= kk) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            int j1 = (rk >= -1) ? 1 : -rk;
            int j2 = (r - 1 <= pk) ? kk - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][kk] = -a[s1][kk - 1] / ndu[pk + 1][r];
                d += a[s2][kk] * ndu[r][pk];
            }
            out.der[kk][r] = d;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int kk = 1; kk <= du; ++kk) {
        for (int j = 0; j <= p; ++j) out.der[kk][j] *= factor;
        factor *= (p - kk);
    }
    // derivatives beyond the polynomial degree vanish
    for (int kk = du + 1; kk <= max_deriv; ++kk)
        for (int j = 0; j <= p; ++j) out.der[kk][j] = 0.0;
    return out;
}

double SplineSpace1D::eval_one(int j, double x, int deriv) const {
    BasisEval e = eval_basis(x, deriv);
    if (j < e.first || j >= e.first + e.count) return 0.0;
    return e.der[deriv][j - e.first];
}

std::vector<double> SplineSpace1D::greville() const {
    std::vector<double> g(n_);
    for (int j = 0; j < n_; ++j) {
        double s = 0.0;
        for (int m = 1; m <= p_; ++m) s += knots_[j + m];
        g[j] = s / p_;
    }
    return g;
}

double SplineSpace1D::eval_spline(const std::vector<double>& coeffs, double x, int deriv) const {
    if (static_cast<int>(coeffs.size()) != n_)
        throw std::invalid_argument("coefficient count does not match space dimension");
    BasisEval e = eval_basis(x, deriv);
    double v = 0.0;
    for (int j = 0; j < e.count; ++j) v += coeffs[e.first + j] * e.der[deriv][j];
    return v;
}

std::vector<double> SplineSpace1D::insert_knot(const std::vector<double>& coeffs, double u,
                                               std::vector<double>* new_knots) const {
    if (static_cast<int>(coeffs.size()) != n_)
        throw std::invalid_argument("coefficient count does not match space dimension");
    if (u <= 0.0 || u >= 1.0) throw std::invalid_argument("can only insert interior knots");
    const int p = p_;
    const int mu = find_span(u);
    std::vector<double> out(n_ + 1);
    for (int i = 0; i <= mu - p; ++i) out[i] = coeffs[i];
    for (int i = mu - p + 1; i <= mu; ++i) {
        double denom = knots_[i + p] - knots_[i];
        double a = denom > 0.0 ? (u - knots_[i]) / denom : 0.0;
        out[i] = a * coeffs[i] + (1.0 - a) * coeffs[i - 1];
    }
    for (int i = mu + 1; i <= n_; ++i) out[i] = coeffs[i - 1];
    if (new_knots) {
        *new_knots = knots_;
        new_knots->insert(new_knots->begin() + mu + 1, u);
    }
    return out;
}

std::vector<double> SplineSpace1D::refine_to(const SplineSpace1D& target,
                                             const std::vector<double>& coeffs) const {
    if (target.degree() != p_) throw std::invalid_argument("refinement must preserve the degree");
    // multiset difference of inner knots
    std::vector<double> to_insert;
    {
        auto count_inner = [](const std::vector<double>& kn, double u) {
            return std::count_if(kn.begin(), kn.end(), [&](double t) { return t == u; });
        };
        std::vector<double> distinct;
        for (double t : target.knots())
            if (t > 0.0 && t < 1.0 && (distinct.empty() || distinct.back() != t))
                distinct.push_back(t);
        for (double u : distinct) {
            long need = count_inner(target.knots(), u) - count_inner(knots_, u);
            if (need < 0) throw std::invalid_argument("target knot vector does not refine source");
            for (long m = 0; m < need; ++m) to_insert.push_back(u);
        }
    }
    std::vector<double> c = coeffs;
    // re-run insertion against a working copy of the space
    SplineSpace1D work = *this;
    for (double u : to_insert) {
        std::vector<double> kn;
        c = work.insert_knot(c, u, &kn);
        work.knots_ = kn;
        work.n_ += 1;
    }
    if (work.n_ != target.dim()) throw std::logic_error("refinement dimension mismatch");
    return c;
}

Interpolant1D::Interpolant1D(const SplineSpace1D& space)
    : Interpolant1D(space, space.greville()) {}

Interpolant1D::Interpolant1D(const SplineSpace1D& space, const std::vector<double>& nodes)
    : space_(space), nodes_(nodes) {
    if (static_cast<int>(nodes_.size()) != space.dim())
        throw std::invalid_argument("node count must equal space dimension");
    factor();
}

void Interpolant1D::factor() {
    const int n = space_.dim();
    lu_.assign(static_cast<size_t>(n) * n, 0.0);
    piv_.resize(n);
    for (int i = 0; i < n; ++i) {
        BasisEval e = space_.eval_basis(nodes_[i], 0);
        for (int j = 0; j < e.count; ++j) lu_[static_cast<size_t>(i) * n + e.first + j] = e.der[0][j];
    }
    // LU with partial pivoting
    for (int c = 0; c < n; ++c) {
        int pr = c;
        double best = std::abs(lu_[static_cast<size_t>(c) * n + c]);
        for (int r = c + 1; r < n; ++r) {
            double v = std::abs(lu_[static_cast<size_t>(r) * n + c]);
            if (v > best) { best = v; pr = r; }
        }
        if (best < 1e-14) throw std::runtime_error("interpolation matrix is singular");
        piv_[c] = pr;
        if (pr != c)
            for (int j = 0; j < n; ++j)
                std::swap(lu_[static_cast<size_t>(c) * n + j], lu_[static_cast<size_t>(pr) * n + j]);
        double d = lu_[static_cast<size_t>(c) * n + c];
        for (int r = c + 1; r < n; ++r) {
            double m = lu_[static_cast<size_t>(r) * n + c] / d;
            lu_[static_cast<size_t>(r) * n + c] = m;
            if (m != 0.0)
                for (int j = c + 1; j < n; ++j)
                    lu_[static_cast<size_t>(r) * n + j] -= m * lu_[static_cast<size_t>(c) * n + j];
        }
    }
}

std::vector<double> Interpolant1D::solve(const std::vector<double>& values) const {
    const int n = space_.dim();
    if (static_cast<int>(values.size()) != n)
        throw std::invalid_argument("value count must equal space dimension");
    std::vector<double> x = values;
    for (int c = 0; c < n; ++c)
        if (piv_[c] != c) std::swap(x[c], x[piv_[c]]);
    for (int c = 0; c < n; ++c)
        for (int r = c + 1; r < n; ++r) x[r] -= lu_[static_cast<size_t>(r) * n + c] * x[c];
    for (int r = n - 1; r >= 0; --r) {
        for (int j = r + 1; j < n; ++j) x[r] -= lu_[static_cast<size_t>(r) * n + j] * x[j];
        x[r] /= lu_[static_cast<size_t>(r) * n + r];
    }
    return x;
}

}  // namespace sc
