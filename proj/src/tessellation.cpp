#include "whmap/tessellation.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace whmap {

namespace {

const BoundaryPoint kZero(0);
const BoundaryPoint kInf = BoundaryPoint::infinity();

/// Third vertex of the base-tessellation triangle on the left of the
/// oriented edge e: one of the mediant (p+r)/(q+s) and the anti-mediant
/// (p-r)/(q-s), whichever lies in the left arc.
BoundaryPoint farey_third(const OrientedEdge& e) {
    BoundaryPoint mediant(e.from.num + e.to.num, e.from.den + e.to.den);
    BoundaryPoint anti(e.from.num - e.to.num, e.from.den - e.to.den);
    if (ccw(e.from, mediant, e.to)) return mediant;
    if (!ccw(e.from, anti, e.to))
        throw std::logic_error("farey_third: no candidate on the requested side");
    return anti;
}

// The unique base edge crossed by the diagonal (a, b) of a base
// quadrilateral, if any. The two triangle apexes of a base edge (u, v) are
// u + v and u - v in vector form, so the crossed edge is recovered as
// ((a + b)/2, (a - b)/2) up to the sign ambiguity of the vector
// representatives; no walk is needed.
std::optional<Edge> diagonal_crossing(const BoundaryPoint& a, const BoundaryPoint& b) {
    const Int det = a.num * b.den - b.num * a.den;
    if (det != 2 && det != -2) return std::nullopt;
    for (int s : {1, -1}) {
        const Int un = a.num + s * b.num, ud = a.den + s * b.den;
        const Int vn = a.num - s * b.num, vd = a.den - s * b.den;
        if (un % 2 != 0 || ud % 2 != 0 || vn % 2 != 0 || vd % 2 != 0) continue;
        const Int hn = un / 2, hd = ud / 2, kn = vn / 2, kd = vd / 2;
        if ((hn == 0 && hd == 0) || (kn == 0 && kd == 0)) continue;
        if (abs(hn * kd - kn * hd) != 1) continue;
        return Edge(BoundaryPoint(hn, hd), BoundaryPoint(kn, kd));
    }
    return std::nullopt;
}

// Which of the three arcs between consecutive triangle vertices holds v:
// returns the index i such that v lies strictly between v[i] and v[(i+1)%3].
int arc_of(const Triangle& tri, const BoundaryPoint& v) {
    for (int i = 0; i < 3; ++i)
        if (ccw(tri.v[i], v, tri.v[(i + 1) % 3])) return i;
    throw std::logic_error("arc_of: point is a vertex");
}

constexpr long kWalkCap = 10000000;

}  // namespace

Edge::Edge(BoundaryPoint x, BoundaryPoint y) : a(std::move(x)), b(std::move(y)) {
    if (a == b) throw std::invalid_argument("Edge: endpoints must be distinct");
    if (lt(b, a)) std::swap(a, b);
}

std::string Edge::str() const { return a.str() + " " + b.str(); }

bool farey_is_edge(const Edge& e) {
    Int d = e.a.num * e.b.den - e.a.den * e.b.num;
    return d == 1 || d == -1;
}

Triangle::Triangle(const BoundaryPoint& x, const BoundaryPoint& y,
                   const BoundaryPoint& z) {
    if (x == y || y == z || x == z)
        throw std::invalid_argument("Triangle: vertices must be distinct");
    v = ccw(x, y, z) ? std::array<BoundaryPoint, 3>{x, y, z}
                     : std::array<BoundaryPoint, 3>{x, z, y};
    // Rotate the smallest vertex (linear order) to the front.
    int lo = 0;
    for (int i = 1; i < 3; ++i)
        if (lt(v[i], v[lo])) lo = i;
    std::rotate(v.begin(), v.begin() + lo, v.end());
}

std::array<Edge, 3> Triangle::sides() const {
    return {Edge(v[0], v[1]), Edge(v[1], v[2]), Edge(v[2], v[0])};
}

bool Triangle::has_vertex(const BoundaryPoint& p) const {
    return v[0] == p || v[1] == p || v[2] == p;
}

std::vector<Edge> farey_edges_between(const BoundaryPoint& s, const BoundaryPoint& t) {
    if (s == t) throw std::invalid_argument("farey_edges_between: equal endpoints");
    // Phase 1: walk from the base triangle until s is a vertex.
    Triangle tri(kZero, BoundaryPoint(1), kInf);
    long steps = 0;
    while (!tri.has_vertex(s)) {
        if (++steps > kWalkCap)
            throw std::runtime_error("farey_edges_between: walk cap exceeded");
        int i = arc_of(tri, s);
        OrientedEdge side(tri.v[i], tri.v[(i + 1) % 3]);
        tri = Triangle(side.from, farey_third(side), side.to);
    }
    // Phase 2: walk toward t, collecting crossed edges that separate s and t.
    std::vector<Edge> out;
    while (!tri.has_vertex(t)) {
        if (++steps > kWalkCap)
            throw std::runtime_error("farey_edges_between: walk cap exceeded");
        int i = arc_of(tri, t);
        OrientedEdge side(tri.v[i], tri.v[(i + 1) % 3]);
        if (separates(side.from, side.to, s, t)) out.emplace_back(side.from, side.to);
        tri = Triangle(side.from, farey_third(side), side.to);
    }
    return out;
}

Tessellation Tessellation::farey() { return farey_image(MoebiusMap::identity()); }

Tessellation Tessellation::farey_image(const MoebiusMap& A) {
    Tessellation t;
    t.A_ = A;
    t.Ainv_ = A.inverse();
    t.dist_ = apply(A, OrientedEdge(kZero, kInf));
    return t;
}

const Edge& Tessellation::flipped() const {
    if (!moved_) throw std::logic_error("Tessellation: no flipped orbit");
    return flip_;
}

const Edge& Tessellation::flipped_new() const {
    if (!moved_) throw std::logic_error("Tessellation: no flipped orbit");
    return fnew_;
}

const Subgroup& Tessellation::farey_symmetry() const {
    if (!moved_ || single_orbit_)
        throw std::logic_error("Tessellation: no orbit symmetry group");
    return sym_;
}

bool Tessellation::flipped_orbit_contains(const Edge& e) const {
    if (single_orbit_) return e == flip_;
    return edge_in_orbit(sym_, flip_.oriented(), e.oriented()).has_value();
}

namespace {

// Resolution of a non-base-edge candidate in a moved tessellation: the
// candidate is an inserted diagonal iff it crosses exactly one base edge,
// that edge is in the flipped orbit, and the candidate matches the opposite
// diagonal of its quadrilateral.
struct DiagonalHit {
    OrientedEdge erased;  // the orbit edge the diagonal replaces
    MoebiusMap witness;   // group element taking the seed to `erased`
};

}  // namespace

bool Tessellation::is_edge(const Edge& e) const {
    Edge ef(apply(Ainv_, e.oriented()));
    if (!moved_) return farey_is_edge(ef);
    if (farey_is_edge(ef)) return !flipped_orbit_contains(ef);
    std::optional<Edge> crossing = diagonal_crossing(ef.a, ef.b);
    if (!crossing) return false;
    OrientedEdge y = crossing->oriented();
    if (!flipped_orbit_contains(*crossing)) return false;
    return Edge(farey_third(y), farey_third(y.reversed())) == ef;
}

BoundaryPoint Tessellation::third_vertex(const OrientedEdge& e) const {
    OrientedEdge ef = apply(Ainv_, e);
    Edge efe(ef);
    if (!moved_) {
        if (!farey_is_edge(efe))
            throw std::invalid_argument("third_vertex: not an edge of the tessellation");
        return apply(A_, farey_third(ef));
    }
    if (farey_is_edge(efe)) {
        if (flipped_orbit_contains(efe))
            throw std::invalid_argument("third_vertex: edge was flipped away");
        BoundaryPoint w = farey_third(ef);
        // At most one side of the base triangle (ef, w) lies in the flipped
        // orbit (no two orbit edges share a triangle). If one does, the
        // triangle merges across it and the far corner of that side's
        // quadrilateral becomes the third vertex.
        for (const OrientedEdge& z :
             {OrientedEdge(ef.from, w), OrientedEdge(w, ef.to)}) {
            if (!flipped_orbit_contains(Edge(z))) continue;
            BoundaryPoint c1 = farey_third(z);
            BoundaryPoint c2 = farey_third(z.reversed());
            BoundaryPoint far = (c1 == ef.from || c1 == ef.to || c1 == w) ? c2 : c1;
            return apply(A_, far);
        }
        return apply(A_, w);
    }
    // Candidate must be an inserted diagonal; its triangles are spanned by
    // the erased edge's endpoints.
    std::optional<Edge> crossing = diagonal_crossing(efe.a, efe.b);
    if (crossing && flipped_orbit_contains(*crossing)) {
        OrientedEdge y = crossing->oriented();
        if (Edge(farey_third(y), farey_third(y.reversed())) == efe) {
            BoundaryPoint cand = ccw(ef.from, y.from, ef.to) ? y.from : y.to;
            return apply(A_, cand);
        }
    }
    throw std::invalid_argument("third_vertex: not an edge of the tessellation");
}

Triangle Tessellation::base_triangle() const {
    return Triangle(dist_.from, third_vertex(dist_), dist_.to);
}

std::vector<Triangle> Tessellation::enumerate_triangles(int depth) const {
    // Frontier edges oriented so their left side is the unexplored one.
    std::vector<Triangle> out;
    BoundaryPoint u = third_vertex(dist_);
    out.emplace_back(dist_.from, u, dist_.to);
    std::vector<OrientedEdge> frontier{OrientedEdge(dist_.from, u),
                                       OrientedEdge(u, dist_.to),
                                       OrientedEdge(dist_.to, dist_.from)};
    for (int d = 0; d < depth; ++d) {
        std::vector<OrientedEdge> next;
        next.reserve(frontier.size() * 2);
        for (const OrientedEdge& oe : frontier) {
            BoundaryPoint w = third_vertex(oe);
            out.emplace_back(oe.from, w, oe.to);
            next.emplace_back(oe.from, w);
            next.emplace_back(w, oe.to);
        }
        frontier = std::move(next);
    }
    return out;
}

namespace {

// Table of A^-1 G A as a subgroup of the integral group, for G given in
// ambient coordinates. Every generator of G must conjugate to an integral
// map (i.e. G must actually preserve A applied to the base tessellation).
Subgroup conjugated_symmetry(const Subgroup& g, const MoebiusMap& A) {
    if (A.is_identity()) return g.canonicalized();
    MoebiusMap adjA(A.d, -A.b, -A.c, A.a);
    auto down = [&](const MoebiusMap& m) { return adjA * m * A; };    // A^-1 m A
    auto up = [&](const MoebiusMap& m) { return A * m * adjA; };      // A m A^-1
    for (const MoebiusMap& gen : schreier_generators(g)) {
        if (!in_psl2z(down(gen)))
            throw std::invalid_argument(
                "whitehead_move: symmetry group does not preserve the tessellation");
    }
    auto oracle = [&](const MoebiusMap& n) {
        MoebiusMap cand = up(n);
        return in_psl2z(cand) && g.contains(cand);
    };
    // Conjugation preserves covolume, so the index is unchanged.
    int bound = g.index + 8;
    bool diagonal = (A.b == 0 && A.c == 0);
    if (diagonal) {
        int p = static_cast<int>(A.a), q = static_cast<int>(A.d);
        // A^-1 G A sits inside {q | b, p | c} when G conjugates integrally.
        auto label = [p, q](const MoebiusMap& n) {
            return divisor_coset_label(n, q, p);
        };
        return subgroup_from_oracle(oracle, bound, label);
    }
    return subgroup_from_oracle(oracle, bound);
}

}  // namespace

Tessellation whitehead_move(const Tessellation& t, const Subgroup& g, const Edge& e) {
    if (t.moved_)
        throw std::invalid_argument("whitehead_move: base must be an unmoved tessellation");
    Edge ef(apply(t.Ainv_, e.oriented()));
    if (!farey_is_edge(ef))
        throw std::invalid_argument("whitehead_move: not an edge of the tessellation");
    Subgroup sym = conjugated_symmetry(g, t.A_);
    OrientedEdge seed = ef.oriented();
    if (edge_in_orbit(sym, seed, OrientedEdge(kZero, kInf)).has_value())
        throw std::invalid_argument("whitehead_move: distinguished edge lies in the orbit");
    BoundaryPoint u = farey_third(seed);
    BoundaryPoint w = farey_third(seed.reversed());
    // Finite certificate that no two orbit edges share a triangle: by
    // equivariance it is enough that no side of the seed's two triangles is
    // itself in the orbit.
    for (const Edge& side : {Edge(seed.from, u), Edge(u, seed.to), Edge(seed.to, w),
                            Edge(w, seed.from)}) {
        if (edge_in_orbit(sym, seed, side.oriented()).has_value())
            throw std::invalid_argument("whitehead_move: adjacent orbit edges");
    }
    Tessellation out = t;
    out.moved_ = true;
    out.sym_ = std::move(sym);
    out.flip_ = ef;
    out.fnew_ = Edge(u, w);
    out.quad_ = {seed.from, u, seed.to, w};
    return out;
}

Tessellation whitehead_move_single(const Tessellation& t, const Edge& e) {
    if (t.moved_)
        throw std::invalid_argument("whitehead_move_single: base must be unmoved");
    Edge ef(apply(t.Ainv_, e.oriented()));
    if (!farey_is_edge(ef))
        throw std::invalid_argument("whitehead_move_single: not an edge");
    if (ef == Edge(kZero, kInf))
        throw std::invalid_argument("whitehead_move_single: cannot flip the distinguished edge");
    OrientedEdge seed = ef.oriented();
    BoundaryPoint u = farey_third(seed);
    BoundaryPoint w = farey_third(seed.reversed());
    Tessellation out = t;
    out.moved_ = true;
    out.single_orbit_ = true;
    out.flip_ = ef;
    out.fnew_ = Edge(u, w);
    out.quad_ = {seed.from, u, seed.to, w};
    return out;
}

std::string edge_list_text(const Tessellation& t, int depth) {
    std::vector<Edge> edges;
    for (const Triangle& tri : t.enumerate_triangles(depth))
        for (const Edge& e : tri.sides())
            if (std::find(edges.begin(), edges.end(), e) == edges.end())
                edges.push_back(e);
    std::ostringstream os;
    for (const Edge& e : edges) os << e.str() << "\n";
    return os.str();
}

}  // namespace whmap
