/** @file domain.hpp

    @brief Multi-patch domain model: patch geometry maps, edge/vertex topology
    with orientation handling, and interface gluing data.

    Sides of the parametric square are named S0..S3 counterclockwise starting
    at {xi2 = 0}; corners 0..3 sit at (0,0), (1,0), (1,1), (0,1). Each side
    carries the natural parameter given by its increasing free coordinate.
*/

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "smoothcolloc/geometry.hpp"

namespace sc {

struct PatchSide {
    int patch = -1;
    int side = -1;  // 0..3
    bool operator==(const PatchSide&) const = default;
};

struct PatchCorner {
    int patch = -1;
    int corner = -1;  // 0..3
    bool operator==(const PatchCorner&) const = default;
};

struct Edge {
    bool inner = false;
    PatchSide a;                  // always valid
    PatchSide b;                  // valid for inner edges
    bool reversed = false;        // side parameters run in opposite directions
};

struct Vertex {
    bool inner = false;
    std::vector<PatchCorner> fan;  // patches in cyclic walk order around the vertex
    std::vector<int> fan_edges;    // edges along the walk; inner: fan_edges[r] joins
                                   // fan[r] and fan[r+1 mod v]; boundary: size v+1 with
                                   // fan_edges[0], fan_edges[v] the two boundary edges
    int valency() const { return static_cast<int>(fan.size()); }
};

/// Two oriented views of an inner edge: view [t] maps a standard square with
/// the edge at {xi1 = 0} onto incident patch t, with a shared run parameter.
/// Index 0 is the side whose relabeled map has negative Jacobian determinant.
struct EdgeFrame {
    int edge = -1;
    std::array<int, 2> patch{-1, -1};
    std::array<AxisMap, 2> view;
};

/// Linear gluing polynomials of an inner edge in a given frame,
/// stored by endpoint values: q(s) = q0 * (1 - s) + q1 * s.
struct InterfaceGluing {
    EdgeFrame frame;
    double lambda = 1.0;
    std::array<double, 2> alpha0{}, alpha1{};  // per side
    std::array<double, 2> beta0{}, beta1{};
    double fit_residual = 0.0;  // worst deviation of alpha, beta from linear

    double alpha(int side, double s) const { return alpha0[side] * (1.0 - s) + alpha1[side] * s; }
    double beta(int side, double s) const { return beta0[side] * (1.0 - s) + beta1[side] * s; }
};

class MultiPatchDomain {
public:
    static MultiPatchDomain load(const std::string& text);
    static MultiPatchDomain load_file(const std::string& path);
    /// one-patch | two-patch-L | three-patch | five-patch
    static MultiPatchDomain builtin(const std::string& name);
    static const std::vector<std::string>& builtin_names();
    static std::string builtin_text(const std::string& name);

    int patch_count() const { return static_cast<int>(patches_.size()); }
    const GeometryMap& patch(int i) const { return patches_[i]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Vertex>& vertices() const { return vertices_; }

    int edge_at(int patch, int side) const { return side_edge_[patch][side]; }
    int vertex_at(int patch, int corner) const { return corner_vertex_[patch][corner]; }
    bool side_is_boundary(int patch, int side) const { return !edges_[edge_at(patch, side)].inner; }

    std::vector<int> inner_edges() const;
    std::vector<int> boundary_edges() const;

    /// standard frame of an inner edge; origin_at_end swaps the run direction
    /// so that parameter 0 sits at the other end of the edge
    EdgeFrame edge_frame(int edge, bool origin_at_end = false) const;

    /// endpoints of a side's natural parameter as corner ids (t = 0 and t = 1)
    static std::pair<int, int> side_corners(int side);
    /// view of one patch side: side mapped to {xi1 = 0} of the view square
    static AxisMap side_view(int side, bool reverse_along = false);
    /// view with the given corner at (0,0); axes_swapped selects which of the
    /// two adjacent sides becomes {xi1 = 0}
    static AxisMap corner_view(int corner, bool axes_swapped);

    /// evaluates derivative of (patch map composed with view) in view coordinates
    Vec2 view_deriv(int patch, const AxisMap& vw, const Vec2& u, int d1, int d2) const;

private:
    std::vector<GeometryMap> patches_;
    std::vector<Edge> edges_;
    std::vector<Vertex> vertices_;
    std::vector<std::array<int, 4>> side_edge_;
    std::vector<std::array<int, 4>> corner_vertex_;

    void build_topology();
    void validate_geometry() const;
};

/// Gluing data with lambda minimizing || alpha_{i0} + 1 ||^2 + || alpha_{i1} - 1 ||^2,
/// computed in closed form from the linear determinant traces.
/// Throws when lambda <= 0 or when alpha/beta deviate from linear polynomials.
InterfaceGluing compute_gluing(const MultiPatchDomain& dom, const EdgeFrame& frame);

struct BilinearLikeReport {
    bool accepted = false;
    double max_residual = 0.0;
    std::string detail;
};

/// Checks every inner edge for linear gluing functions satisfying the
/// order-4 transversal matching relations at 20 sample points.
BilinearLikeReport validate_bilinear_like(const MultiPatchDomain& dom, double tol = 1e-8);

}  // namespace sc
