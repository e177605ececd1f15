#pragma once

#include "whmap/modgroup.hpp"
#include "whmap/moebius.hpp"

#include <array>
#include <vector>

namespace whmap {

/// Unordered pair of distinct boundary points, stored with the smaller
/// endpoint (in the linear order with infinity greatest) first.
struct Edge {
    BoundaryPoint a;
    BoundaryPoint b;

    Edge(BoundaryPoint x, BoundaryPoint y);
    explicit Edge(const OrientedEdge& e) : Edge(e.from, e.to) {}

    OrientedEdge oriented() const { return OrientedEdge(a, b); }
    bool operator==(const Edge&) const = default;
    std::string str() const;
};

/// Classical characterization of geodesics of the base triangulation:
/// endpoints p/q, r/s (reduced, infinity = 1/0) with |p s - q r| = 1.
bool farey_is_edge(const Edge& e);

/// Ideal triangle, vertices in counterclockwise cyclic order, rotated so the
/// smallest vertex (linear order) comes first.
struct Triangle {
    std::array<BoundaryPoint, 3> v;

    Triangle(const BoundaryPoint& x, const BoundaryPoint& y, const BoundaryPoint& z);
    std::array<Edge, 3> sides() const;
    bool has_vertex(const BoundaryPoint& p) const;
    bool operator==(const Triangle&) const = default;
};

/// Invariant tessellation of the hyperbolic plane, queried lazily (it is
/// never materialized). Either the image A(F) of the base tessellation F
/// under a rational hyperbolic map A, or the result of flipping one orbit of
/// edges of such an image to the opposite diagonals of their quadrilaterals.
class Tessellation {
public:
    /// The base tessellation F with distinguished oriented edge (0 -> inf).
    static Tessellation farey();
    /// A(F) with distinguished edge the A-image of (0 -> inf).
    static Tessellation farey_image(const MoebiusMap& A);

    bool is_moved() const { return moved_; }
    const MoebiusMap& base_map() const { return A_; }
    const OrientedEdge& distinguished() const { return dist_; }

    bool is_edge(const Edge& e) const;

    /// Third vertex of the triangle on the left of the oriented edge e (the
    /// side {z : ccw(e.from, z, e.to)}). Pass e.reversed() for the other
    /// side. Throws if e is not an edge of the tessellation.
    BoundaryPoint third_vertex(const OrientedEdge& e) const;

    /// Triangle on the left of the distinguished oriented edge.
    Triangle base_triangle() const;

    /// Breadth-first triangle closure from the base triangle, crossing each
    /// frontier side once per step; depth d yields 1 + 3(2^d - 1) triangles.
    std::vector<Triangle> enumerate_triangles(int depth) const;

    // Moved-variant accessors (throw std::logic_error on an unmoved value).
    const Edge& flipped() const;
    const Edge& flipped_new() const;
    /// Symmetry group driving the flipped orbit, expressed in coordinates of
    /// the base tessellation F (i.e. conjugated by A^-1).
    const Subgroup& farey_symmetry() const;

    friend Tessellation whitehead_move(const Tessellation& t, const Subgroup& g,
                                       const Edge& e);
    friend Tessellation whitehead_move_single(const Tessellation& t, const Edge& e);

private:
    Tessellation() = default;

    // Everything below lives in coordinates of the base tessellation F.
    bool flipped_orbit_contains(const Edge& e) const;

    MoebiusMap A_;        // base map; the tessellation is A(F) (pre-move)
    MoebiusMap Ainv_;
    OrientedEdge dist_{BoundaryPoint(0), BoundaryPoint::infinity()};
    bool moved_ = false;
    bool single_orbit_ = false;  // orbit is just {flip_} (degenerate group)
    Subgroup sym_;        // conjugated symmetry group (Moved only)
    Edge flip_{BoundaryPoint(0), BoundaryPoint(1)};       // erased orbit seed
    Edge fnew_{BoundaryPoint(0), BoundaryPoint(1)};       // inserted diagonal
    // Quadrilateral around flip_: corners (q0, q1, q2, q3) counterclockwise
    // with (q0, q2) = flip_ and (q1, q3) = fnew_.
    std::array<BoundaryPoint, 4> quad_{};
};

/// Flip the G-orbit of the edge e of the unmoved tessellation t, where G (a
/// subgroup of the integral symmetries in ambient coordinates: g preserves t)
/// is given as a coset table. Validates that the distinguished edge is not in
/// the orbit and that no two orbit edges share a triangle.
Tessellation whitehead_move(const Tessellation& t, const Subgroup& g, const Edge& e);

/// Flip the single edge e of the unmoved tessellation t (degenerate orbit of
/// one edge, no group). This is the combinatorial counterpart of the limit
/// single-flip maps and is used to cross-check their piecewise form.
Tessellation whitehead_move_single(const Tessellation& t, const Edge& e);

/// The geodesic (s, t) crossed with the base tessellation F: all edges of F
/// strictly separating s from t, in order from s to t. Both endpoints must be
/// vertices (extended rationals). Internal workhorse for diagonal detection.
std::vector<Edge> farey_edges_between(const BoundaryPoint& s, const BoundaryPoint& t);

/// "p/q r/s" debugging format, one edge per line, for an enumerated window.
std::string edge_list_text(const Tessellation& t, int depth);

}  // namespace whmap
