#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <compare>
#include <iosfwd>
#include <string>

namespace whmap {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Point of the boundary circle in half-plane coordinates: a reduced
/// rational num/den, with den == 0 (and num == 1) encoding infinity.
struct BoundaryPoint {
    Int num;
    Int den;

    BoundaryPoint() : num(0), den(1) {}
    BoundaryPoint(Int n, Int d);
    BoundaryPoint(long n) : num(n), den(1) {}

    static BoundaryPoint infinity() { return BoundaryPoint(1, 0); }
    bool is_infinity() const { return den == 0; }

    Rational as_rational() const;   // throws on infinity
    double as_double() const;       // +inf for infinity

    bool operator==(const BoundaryPoint&) const = default;
    std::string str() const;
};

/// Linear order on the extended reals with infinity as the greatest element.
/// The circular (cyclic) order used everywhere is derived from this one.
bool lt(const BoundaryPoint& a, const BoundaryPoint& b);

/// Strict cyclic order: b lies in the open arc from a to c (increasing
/// direction, wrapping through infinity). False if any two coincide.
bool ccw(const BoundaryPoint& a, const BoundaryPoint& b, const BoundaryPoint& c);

/// Endpoint pairs (a,s,b) and (a,t,b) on opposite sides: the geodesics
/// (s,t) and (a,b) cross.
bool separates(const BoundaryPoint& a, const BoundaryPoint& b,
               const BoundaryPoint& s, const BoundaryPoint& t);

/// Projective class of an integer 2x2 matrix with positive determinant.
/// Canonical form: entries primitive, first nonzero of (a,b,c,d) positive,
/// so projective equality is plain field equality.
struct MoebiusMap {
    Int a, b, c, d;

    MoebiusMap() : a(1), b(0), c(0), d(1) {}
    MoebiusMap(Int a_, Int b_, Int c_, Int d_);

    static MoebiusMap identity() { return MoebiusMap(); }
    static MoebiusMap S() { return MoebiusMap(0, -1, 1, 0); }
    static MoebiusMap T() { return MoebiusMap(1, 1, 0, 1); }
    /// diag(p,q): the hyperbolic translation z -> (p/q) z with axis (0, inf).
    static MoebiusMap scaling(Int p, Int q) { return MoebiusMap(p, 0, 0, q); }

    Int det() const { return a * d - b * c; }
    MoebiusMap inverse() const { return MoebiusMap(d, -b, -c, a); }
    MoebiusMap pow(long k) const;

    bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
    bool operator==(const MoebiusMap&) const = default;
    std::string str() const;
};

MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n);

struct OrientedEdge {
    BoundaryPoint from;
    BoundaryPoint to;

    OrientedEdge(BoundaryPoint f, BoundaryPoint t);
    OrientedEdge reversed() const { return OrientedEdge(to, from); }
    bool operator==(const OrientedEdge&) const = default;
};

BoundaryPoint apply(const MoebiusMap& m, const BoundaryPoint& x);
OrientedEdge apply(const MoebiusMap& m, const OrientedEdge& e);

/// cr(a,b,c,d) = ((a-c)(b-d)) / ((a-d)(b-c)), extended to infinity by limits.
/// The four points must be pairwise distinct.
Rational cross_ratio(const BoundaryPoint& a, const BoundaryPoint& b,
                     const BoundaryPoint& c, const BoundaryPoint& d);

/// Unique projective class sending xi -> yi. Both triples must be pairwise
/// distinct and in the same cyclic orientation; otherwise the fit would be
/// orientation-reversing and is rejected.
MoebiusMap three_point_map(const std::array<BoundaryPoint, 3>& x,
                           const std::array<BoundaryPoint, 3>& y);

/// True iff the canonical representative has determinant 1 (entries are
/// integral by construction).
bool in_psl2z(const MoebiusMap& m);

std::ostream& operator<<(std::ostream& os, const BoundaryPoint& p);
std::ostream& operator<<(std::ostream& os, const MoebiusMap& m);

}  // namespace whmap
