/** @file points.hpp

    @brief Univariate Greville / superconvergent collocation points, their
    tensorization into deduplicated global point sets, and equation-role
    assignment (PDE / boundary value / normal / averaged / omitted).
*/

#pragma once

#include <string>
#include <vector>

#include "smoothcolloc/domain.hpp"

namespace sc {

enum class PointFamily { greville, superconvergent };

PointFamily family_from_string(const std::string& s);
std::string to_string(PointFamily f);

enum class PointProvenance { root, greville, added_boundary, added_knot };
std::string to_string(PointProvenance p);

struct UnivariatePoints {
    PointFamily family = PointFamily::greville;
    int p = 0, r = 0, k = 0;
    std::vector<double> points;                 // strictly increasing, first 0, last 1
    std::vector<PointProvenance> provenance;    // per point
    std::vector<double> removed;                // clustering removals (reporting only)
};

UnivariatePoints greville_1d(int p, int r, int k);

/// Supported (p, r): (9,4), (8,3), (7,3). Reference roots per knot span plus
/// the family-specific cardinality adjustment; |points| = dim S_h^{p,r}.
UnivariatePoints superconvergent_1d(int p, int r, int k);

/// Reference-interval roots on [-1,1] for a supported (p, r).
std::vector<double> superconvergent_reference_roots(int p, int r);

UnivariatePoints make_univariate(PointFamily f, int p, int r, int k);

enum class PointRole {
    pde,
    boundary,            // carries a value row and possibly a normal row
    omitted_ring,        // interior point next to the physical boundary
    omitted_interface };  // non-smooth locus excluded for the C3 variant

enum class NormalMode { none, plain, averaged };

struct GlobalPoint {
    Vec2 phys;
    int owner = 0;       // lowest incident patch index
    Vec2 local;          // coordinates in the owner patch
    PointRole role = PointRole::pde;
    bool value_row = false;
    NormalMode normal = NormalMode::none;
    int partner = -1;      // other member of an averaged pair
    int pair_vertex = -1;  // boundary vertex the pair belongs to
    bool on_boundary = false;
    bool on_inner_closure = false;  // lies on the closure of some inner edge
};

struct GlobalPointSet {
    int n1 = 0;          // univariate point count per direction
    int mesh_lines = 0;  // k + 1, number of knot spans of the generating family
    std::vector<GlobalPoint> points;
    // grid[patch][i1 * n1 + i2] = global point id
    std::vector<std::vector<int>> grid;

    int grid_id(int patch, int i1, int i2) const { return grid[patch][i1 * n1 + i2]; }
    struct RowCounts {
        int pde = 0, value = 0, normal_plain = 0, normal_pairs = 0;
        int total() const { return pde + value + normal_plain + normal_pairs; }
    };
    RowCounts row_counts() const;
};

/// Tensorizes the same univariate points on every patch and identifies shared
/// edge/vertex points through the topology (no geometric search); each global
/// point is kept once for its lowest incident patch index.
GlobalPointSet tensor_and_globalize(const MultiPatchDomain& dom, const UnivariatePoints& uni);

/// Boundary points become value rows plus (away from corners) normal rows;
/// at every boundary vertex the two adjacent boundary points share one
/// averaged normal row. The interior layer hugging the physical boundary is
/// omitted. Interface points interior to the domain keep PDE roles.
void assign_roles(const MultiPatchDomain& dom, GlobalPointSet& pts);

/// For smoothness 3, removes every equation collocated on the closure of an
/// inner edge and verifies no remaining PDE point sits on an inner knot line.
void avoid_nonsmooth_loci(const MultiPatchDomain& dom, GlobalPointSet& pts, int smoothness);

}  // namespace sc
