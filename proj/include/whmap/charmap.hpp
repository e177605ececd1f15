#pragma once

#include "whmap/modgroup.hpp"
#include "whmap/moebius.hpp"
#include "whmap/tessellation.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace whmap {

/// The unique boundary homeomorphism carrying one tessellation onto another
/// while matching their distinguished oriented edges. Evaluated lazily by a
/// triangle-by-triangle walk that mirrors source crossings in the target.
class CharMap {
public:
    CharMap(Tessellation source, Tessellation target);

    const Tessellation& source() const { return src_; }
    const Tessellation& target() const { return tgt_; }

    /// Exact image of a vertex of the source tessellation.
    BoundaryPoint eval_vertex(const BoundaryPoint& v) const;

    /// Arc (lo, hi) with vertex endpoints, of circular width < delta,
    /// containing the image of the boundary point x: the counterclockwise
    /// arc from lo to hi. For a vertex value of x the arc may be degenerate
    /// (lo == hi == image).
    std::pair<BoundaryPoint, BoundaryPoint> eval_interval(double x, double delta) const;

    /// If this map conjugates gamma (a symmetry of the source) to a single
    /// Moebius map, return it: fit on the base triangle, then verify exactly
    /// on 20 deterministic pseudo-random vertices. Returns nullopt when the
    /// conjugate is not Moebius.
    std::optional<MoebiusMap> conjugate_by(const MoebiusMap& gamma) const;

private:
    struct Aligned {
        std::array<BoundaryPoint, 3> s;  // source triangle, counterclockwise
        std::array<BoundaryPoint, 3> t;  // aligned target triangle
    };
    Aligned base_aligned() const;
    void cross(Aligned& a, int i) const;
    /// Shared triangle walk toward xr. With delta > 0, stops as soon as the
    /// image is pinned to an arc narrower than delta; with delta <= 0, stops
    /// only on exact arrival (vertex evaluation). Long runs of crossings
    /// around a common vertex are galloped in whole fan periods.
    std::pair<BoundaryPoint, BoundaryPoint> walk(const BoundaryPoint& xr, double delta,
                                                 long cap, bool vertex_mode) const;

    Tessellation src_;
    Tessellation tgt_;
};

CharMap characteristic_map(const Tessellation& t1, const Tessellation& t2);

/// Circular-arc piece of a piecewise-Moebius boundary map: the closed
/// counterclockwise arc [from, to] carried by a single Moebius map.
struct PiecewisePiece {
    BoundaryPoint from;
    BoundaryPoint to;
    MoebiusMap map;
};

/// Piecewise-Moebius circle homeomorphism: consecutive closed arcs covering
/// the circle, with the maps of adjacent pieces agreeing exactly at the
/// shared breakpoints (validated at construction).
class PiecewiseMoebius {
public:
    explicit PiecewiseMoebius(std::vector<PiecewisePiece> pieces);

    const std::vector<PiecewisePiece>& pieces() const { return pieces_; }
    BoundaryPoint eval(const BoundaryPoint& x) const;

private:
    std::vector<PiecewisePiece> pieces_;
};

/// The boundary map of the single-edge flip along (1, infinity): the
/// characteristic map from the flipped tessellation back to the base one,
/// fixing the distinguished edge (0 -> infinity). Four pieces with
/// breakpoints 0, 1, 2, infinity; the identity on the arc through the
/// negative reals.
PiecewiseMoebius single_flip();

/// Its inverse (breakpoints 0, 1/2, 1, infinity).
PiecewiseMoebius single_flip_inverse();

/// The conjugated single-flip map for the scaled tessellation A(F): arcs and
/// maps of single_flip() pushed forward by A. For A = identity this is
/// single_flip() itself.
PiecewiseMoebius piecewise_single_flip(const MoebiusMap& A);

/// Cusp combinatorics of a tessellation at the vertex y, relative to the
/// subgroup G (a coset table interpreted in base-tessellation coordinates,
/// i.e. conjugated by the inverse of the base map):
///   gen = the smallest power of the primitive tessellation parabolic at y
///         that lies in G (returned in ambient coordinates);
///   k   = the number of edges of t with endpoint y between a reference edge
///         l and gen(l), counting l but not gen(l).
struct CuspData {
    int k = 0;
    MoebiusMap gen;
};
CuspData cusp_data(const Tessellation& t, const BoundaryPoint& y, const Subgroup& g);

/// The paired flip homeomorphisms of a scaling A = diag(p, q) at congruence
/// level N, built over the shared subgroup G = (symmetries common to the
/// base and scaled tessellations) ∩ (level-N principal congruence group):
/// f flips the G-orbit of the edge (1, infinity) in the base tessellation
/// and maps back to it; g does the same for the A-image edge in the scaled
/// tessellation. Both fix the distinguished edge (0 -> infinity), and the
/// composition g ∘ f⁻¹ conjugates G into the integral group.
struct FlipPair {
    MoebiusMap A;
    Subgroup group;  // ambient coordinates
    CharMap f;       // flipped base tessellation -> base tessellation
    CharMap f_inv;
    CharMap g;       // flipped scaled tessellation -> scaled tessellation
    CharMap g_inv;

    /// g(f⁻¹(x)), the conjugating circle homeomorphism.
    BoundaryPoint conjugator(const BoundaryPoint& x) const;
};
FlipPair flip_pair(const MoebiusMap& A, int level);
/// Same construction with the shared subgroup supplied (e.g. from a cache);
/// the caller is responsible for it matching G_A ∩ Γ(level).
FlipPair flip_pair(const MoebiusMap& A, const Subgroup& group);

/// Difference-quotient estimate of the asymptotic linear slope of h near the
/// cusp y, after normalizing both sides so the cusp sits at infinity, a
/// reference edge spans (0, infinity), and the primitive integral parabolic
/// becomes the unit translation. Evaluated on the parabolic ladder at rungs
/// 2^(depth-1) and 2^depth.
double cusp_slope_empirical(const CharMap& h, const BoundaryPoint& y, int depth);

}  // namespace whmap
