#include "whmap/moebius.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace whmap {

BoundaryPoint::BoundaryPoint(Int n, Int d) : num(std::move(n)), den(std::move(d)) {
    if (den == 0) {
        if (num == 0) throw std::invalid_argument("BoundaryPoint: 0/0");
        num = 1;
        return;
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Int g = gcd(abs(num), den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational BoundaryPoint::as_rational() const {
    if (is_infinity()) throw std::domain_error("BoundaryPoint: infinity has no rational value");
    return Rational(num, den);
}

double BoundaryPoint::as_double() const {
    if (is_infinity()) return std::numeric_limits<double>::infinity();
    return static_cast<double>(Rational(num, den));
}

std::string BoundaryPoint::str() const {
    if (is_infinity()) return "inf";
    std::ostringstream os;
    os << num;
    if (den != 1) os << "/" << den;
    return os.str();
}

bool lt(const BoundaryPoint& a, const BoundaryPoint& b) {
    if (a.is_infinity()) return false;
    if (b.is_infinity()) return true;
    return a.num * b.den < b.num * a.den;
}

bool ccw(const BoundaryPoint& a, const BoundaryPoint& b, const BoundaryPoint& c) {
    if (a == b || b == c || a == c) return false;
    if (lt(a, b)) return lt(b, c) || lt(c, a);
    return lt(b, c) && lt(c, a);
}

bool separates(const BoundaryPoint& a, const BoundaryPoint& b,
               const BoundaryPoint& s, const BoundaryPoint& t) {
    if (s == a || s == b || t == a || t == b) return false;
    return ccw(a, s, b) != ccw(a, t, b);
}

MoebiusMap::MoebiusMap(Int a_, Int b_, Int c_, Int d_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
    if (a * d - b * c <= 0)
        throw std::invalid_argument("MoebiusMap: determinant must be positive");
    Int g = gcd(gcd(abs(a), abs(b)), gcd(abs(c), abs(d)));
    if (g > 1) {
        a /= g;
        b /= g;
        c /= g;
        d /= g;
    }
    Int* first = &a;
    if (a == 0) first = (b != 0) ? &b : (c != 0 ? &c : &d);
    if (*first < 0) {
        a = -a;
        b = -b;
        c = -c;
        d = -d;
    }
}

MoebiusMap MoebiusMap::pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    MoebiusMap r;
    MoebiusMap base = *this;
    while (k > 0) {
        if (k & 1) r = r * base;
        base = base * base;
        k >>= 1;
    }
    return r;
}

std::string MoebiusMap::str() const {
    std::ostringstream os;
    os << "[[" << a << "," << b << "],[" << c << "," << d << "]]";
    return os.str();
}

MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n) {
    return MoebiusMap(m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                      m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d);
}

OrientedEdge::OrientedEdge(BoundaryPoint f, BoundaryPoint t)
    : from(std::move(f)), to(std::move(t)) {
    if (from == to) throw std::invalid_argument("OrientedEdge: endpoints coincide");
}

BoundaryPoint apply(const MoebiusMap& m, const BoundaryPoint& x) {
    return BoundaryPoint(m.a * x.num + m.b * x.den, m.c * x.num + m.d * x.den);
}

OrientedEdge apply(const MoebiusMap& m, const OrientedEdge& e) {
    return OrientedEdge(apply(m, e.from), apply(m, e.to));
}

namespace {

// (x - y) in homogeneous coordinates: numerator of the difference.
Int hdiff(const BoundaryPoint& x, const BoundaryPoint& y) {
    return x.num * y.den - y.num * x.den;
}

}  // namespace

Rational cross_ratio(const BoundaryPoint& a, const BoundaryPoint& b,
                     const BoundaryPoint& c, const BoundaryPoint& d) {
    const BoundaryPoint* pts[4] = {&a, &b, &c, &d};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (*pts[i] == *pts[j])
                throw std::invalid_argument("cross_ratio: repeated point");
    // Homogeneous form: all infinity cases reduce to cancelling factors.
    Int n = hdiff(a, c) * hdiff(b, d);
    Int m = hdiff(a, d) * hdiff(b, c);
    if (m == 0) throw std::invalid_argument("cross_ratio: degenerate quadruple");
    if (m < 0) { n = -n; m = -m; }
    return Rational(n, m);
}

namespace {

// Integral matrix sending (0,1,inf) to the triple (x1,x2,x3); determinant
// sign records the triple's cyclic orientation.
void base_to_triple(const std::array<BoundaryPoint, 3>& x, Int out[4]) {
    // Row construction: N maps x1 -> 0, x3 -> inf, scaled so x2 -> 1;
    // we build the inverse direction and invert by adjugate at the caller.
    const Int& p1 = x[0].num;
    const Int& q1 = x[0].den;
    const Int& p2 = x[1].num;
    const Int& q2 = x[1].den;
    const Int& p3 = x[2].num;
    const Int& q3 = x[2].den;
    Int u = q3 * p2 - p3 * q2;
    Int v = q1 * p2 - p1 * q2;
    // N = [[u q1, -u p1],[v q3, -v p3]] sends x1->0, x2->1, x3->inf.
    out[0] = u * q1;
    out[1] = -u * p1;
    out[2] = v * q3;
    out[3] = -v * p3;
}

}  // namespace

MoebiusMap three_point_map(const std::array<BoundaryPoint, 3>& x,
                           const std::array<BoundaryPoint, 3>& y) {
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (x[i] == x[j] || y[i] == y[j])
                throw std::invalid_argument("three_point_map: repeated point in triple");
    Int nx[4], ny[4];
    base_to_triple(x, nx);
    base_to_triple(y, ny);
    // m = ny^{-1} * nx (adjugate of ny).
    Int a = ny[3] * nx[0] - ny[1] * nx[2];
    Int b = ny[3] * nx[1] - ny[1] * nx[3];
    Int c = -ny[2] * nx[0] + ny[0] * nx[2];
    Int d = -ny[2] * nx[1] + ny[0] * nx[3];
    Int det = a * d - b * c;
    if (det == 0) throw std::invalid_argument("three_point_map: degenerate triples");
    if (det < 0)
        throw std::domain_error("three_point_map: orientation-reversing triple");
    return MoebiusMap(a, b, c, d);
}

bool in_psl2z(const MoebiusMap& m) { return m.det() == 1; }

std::ostream& operator<<(std::ostream& os, const BoundaryPoint& p) { return os << p.str(); }
std::ostream& operator<<(std::ostream& os, const MoebiusMap& m) { return os << m.str(); }

}  // namespace whmap
