/** @file assembly.hpp

    @brief Collocation system assembly: bilaplacian rows at PDE points,
    Dirichlet value rows and (averaged) outward-normal derivative rows,
    with right-hand sides from manufactured or spline-borne data.
*/

#pragma once

#include <Eigen/Sparse>
#include <functional>

#include "smoothcolloc/smooth_space.hpp"

namespace sc {

/// Exact solution data: evaluators receive the owner patch, local coordinates
/// and the physical point (closed-form solutions only use the latter).
struct ManufacturedSolution {
    std::function<double(int, const Vec2&, const Vec2&)> u;
    std::function<Vec2(int, const Vec2&, const Vec2&)> grad;
    std::function<double(int, const Vec2&, const Vec2&)> lap;
    std::function<Vec2(int, const Vec2&, const Vec2&)> grad_lap;
    std::function<double(int, const Vec2&, const Vec2&)> bilap;
    bool closed_form = true;

    /// u(x, y) = cos(x/2) sin(y/2)
    static ManufacturedSolution trig();
    /// data generated from a member of the discretization space
    static ManufacturedSolution from_coefficients(const SmoothSpace& space,
                                                  Eigen::VectorXd coefficients);

    /// finite-difference consistency of lap/grad/bilap against u at sample
    /// points of the domain; returns the largest relative deviation
    double validate_fd(const MultiPatchDomain& dom, int samples = 20) const;
};

enum class RowKind { pde, value, normal, normal_averaged };

struct RowMeta {
    RowKind kind;
    int point = -1;
    int partner = -1;  // second member of an averaged pair
};

struct CollocationSystem {
    Eigen::SparseMatrix<double, Eigen::RowMajor> A;
    Eigen::VectorXd b;
    std::vector<RowMeta> rows;

    /// coordinate-format text dump (row, col, value) and rhs values
    void dump(std::ostream& matrix_os, std::ostream& rhs_os) const;
};

/// Outward unit normal of the physical boundary on a boundary side.
Vec2 outward_normal(const MultiPatchDomain& dom, int patch, int side, double t);

/// Assembles all rows in deterministic order: PDE rows by point id, then
/// value rows, then plain normal rows, then averaged pairs.
CollocationSystem assemble(const SmoothSpace& space, const GlobalPointSet& pts,
                           const ManufacturedSolution& data);

}  // namespace sc
