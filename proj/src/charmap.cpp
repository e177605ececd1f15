#include "whmap/charmap.hpp"

#include "whmap/diskmodel.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>

namespace whmap {

namespace {

// Crossing budget for the vertex walk. Generously quadratic in the bit size
// of the vertex so that integer cusp ladders (walk length comparable to the
// vertex magnitude at the depths we use) fit, while a non-vertex input still
// fails fast instead of descending forever.
long eval_cap(const BoundaryPoint& v) {
    Int size = (v.num < 0 ? -v.num : v.num) + v.den;
    const long bits = static_cast<long>(boost::multiprecision::msb(size)) + 1;
    return 256 * (bits + 2) * (bits + 2);
}

constexpr long kIntervalCap = 5000000;
constexpr int kPeriodBound = 10000;
constexpr long kFanBound = 100000;

// Exact dyadic rational equal to the double x (infinity for +-inf).
BoundaryPoint exact_from_double(double x) {
    if (std::isnan(x)) throw std::invalid_argument("eval_interval: NaN input");
    if (std::isinf(x)) return BoundaryPoint::infinity();
    int exp = 0;
    const double frac = std::frexp(x, &exp);
    const auto mant = static_cast<long long>(std::ldexp(frac, 53));
    exp -= 53;
    Int n(mant), d(1);
    if (exp >= 0) n <<= exp; else d <<= -exp;
    if (d < 0) { n = -n; d = -d; }
    return BoundaryPoint(n, d);
}

// The primitive parabolic of PSL2(Z) fixing the extended rational y,
// normalized (among the class and its inverse) so that the trace-+2
// representative has c > 0, or c == 0 and b > 0. Sends the fan of edges at y
// one step in a fixed rotational direction; T for y = infinity.
MoebiusMap primitive_parabolic(const BoundaryPoint& y) {
    const Int& r = y.num;
    const Int& s = y.den;
    if (s == 0) return MoebiusMap::T();
    return MoebiusMap(1 + r * s, -r * r, s * s, 1 - r * s);
}

MoebiusMap moebius_power(MoebiusMap g, Int e) {
    MoebiusMap r;
    while (e > 0) {
        if ((e & 1) != 0) r = r * g;
        e >>= 1;
        if (e > 0) g = g * g;
    }
    return r;
}

bool is_triangle_of(const Tessellation& t, const BoundaryPoint& a, const BoundaryPoint& b,
                    const BoundaryPoint& c) {
    try {
        if (t.third_vertex(OrientedEdge(a, b)) == c) return true;
    } catch (const std::exception&) {
    }
    try {
        return t.third_vertex(OrientedEdge(b, a)) == c;
    } catch (const std::exception&) {
    }
    return false;
}

BoundaryPoint random_vertex(std::mt19937& rng) {
    std::uniform_int_distribution<int> len(1, 12);
    std::uniform_int_distribution<int> pick(0, 2);
    MoebiusMap g;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
        switch (pick(rng)) {
            case 0: g = g * MoebiusMap::S(); break;
            case 1: g = g * MoebiusMap::T(); break;
            default: g = g * MoebiusMap(1, -1, 0, 1); break;
        }
    }
    return apply(g, BoundaryPoint(0));
}

}  // namespace

CharMap::CharMap(Tessellation source, Tessellation target)
    : src_(std::move(source)), tgt_(std::move(target)) {
    base_aligned();  // validates both base triangles exist
}

CharMap::Aligned CharMap::base_aligned() const {
    Aligned a;
    const OrientedEdge& ds = src_.distinguished();
    const OrientedEdge& dt = tgt_.distinguished();
    a.s = {ds.from, ds.to, src_.third_vertex(ds)};
    a.t = {dt.from, dt.to, tgt_.third_vertex(dt)};
    return a;
}

void CharMap::cross(Aligned& a, int i) const {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    BoundaryPoint us = src_.third_vertex(OrientedEdge(a.s[j], a.s[k]));
    if (us == a.s[i]) us = src_.third_vertex(OrientedEdge(a.s[k], a.s[j]));
    BoundaryPoint ut = tgt_.third_vertex(OrientedEdge(a.t[j], a.t[k]));
    if (ut == a.t[i]) ut = tgt_.third_vertex(OrientedEdge(a.t[k], a.t[j]));
    a.s[i] = us;
    a.t[i] = ut;
}

BoundaryPoint CharMap::eval_vertex(const BoundaryPoint& v) const {
    return walk(v, 0.0, eval_cap(v), true).first;
}

std::pair<BoundaryPoint, BoundaryPoint> CharMap::eval_interval(double x, double delta) const {
    if (!(delta > 0)) throw std::invalid_argument("eval_interval: delta must be positive");
    return walk(exact_from_double(x), delta, kIntervalCap, false);
}

std::pair<BoundaryPoint, BoundaryPoint> CharMap::walk(const BoundaryPoint& xr, double delta,
                                                      long cap, bool vertex_mode) const {
    Aligned a = base_aligned();

    // Fan state: maximal run of crossed edges sharing one endpoint (the
    // pivot). Long runs happen exactly when x hugs a cusp, and both
    // tessellations repeat around the pivot with some period, so once the
    // period map is detected the run can be galloped in whole periods
    // instead of one triangle at a time.
    bool fan_active = false;
    BoundaryPoint pivot_s, pivot_t;
    std::vector<BoundaryPoint> fan_s, fan_t;
    struct EdgeRec {
        BoundaryPoint s1, s2, t1, t2;
    };
    std::optional<EdgeRec> prev;
    bool fan_blocked = false;  // verification failed; stop retrying this fan
    constexpr size_t kFanWindow = 200;
    constexpr size_t kFanDetect = 8;
    size_t fan_next_try = kFanDetect;

    for (long step = 0; step <= cap; ++step) {
        for (int i = 0; i < 3; ++i)
            if (a.s[i] == xr) return {a.t[i], a.t[i]};
        int side = -1;
        for (int i = 0; i < 3; ++i) {
            if (separates(a.s[(i + 1) % 3], a.s[(i + 2) % 3], xr, a.s[i])) {
                side = i;
                break;
            }
        }
        if (side < 0) {
            if (vertex_mode)
                throw std::invalid_argument("eval_vertex: point is not a vertex");
            throw std::logic_error("eval_interval: separation test failed");
        }
        // The image lies in the target arc beyond the chord being crossed,
        // on the side away from the current third vertex.
        const int j = (side + 1) % 3, k = (side + 2) % 3;
        if (delta > 0) {
            BoundaryPoint lo = a.t[j], hi = a.t[k];
            if (ccw(lo, a.t[side], hi)) std::swap(lo, hi);
            if (arc_width(lo, hi) < delta) return {lo, hi};
        }

        const EdgeRec cur{a.s[j], a.s[k], a.t[j], a.t[k]};
        bool extended = false;
        if (fan_active && (cur.s1 == pivot_s || cur.s2 == pivot_s)) {
            const bool first = cur.s1 == pivot_s;
            if ((first ? cur.t1 : cur.t2) == pivot_t) {
                fan_s.push_back(first ? cur.s2 : cur.s1);
                fan_t.push_back(first ? cur.t2 : cur.t1);
                extended = true;
            }
        }
        if (!extended) {
            fan_active = false;
            fan_blocked = false;
            fan_next_try = kFanDetect;
            fan_s.clear();
            fan_t.clear();
            if (prev) {
                for (int pi = 0; pi < 2 && !fan_active; ++pi) {
                    const BoundaryPoint& ps = pi == 0 ? prev->s1 : prev->s2;
                    const BoundaryPoint& pos = pi == 0 ? prev->s2 : prev->s1;
                    const BoundaryPoint& pt = pi == 0 ? prev->t1 : prev->t2;
                    const BoundaryPoint& pot = pi == 0 ? prev->t2 : prev->t1;
                    for (int ci = 0; ci < 2 && !fan_active; ++ci) {
                        const BoundaryPoint& cs = ci == 0 ? cur.s1 : cur.s2;
                        const BoundaryPoint& cos_ = ci == 0 ? cur.s2 : cur.s1;
                        const BoundaryPoint& ct = ci == 0 ? cur.t1 : cur.t2;
                        const BoundaryPoint& cot = ci == 0 ? cur.t2 : cur.t1;
                        if (ps == cs && pt == ct) {
                            fan_active = true;
                            pivot_s = ps;
                            pivot_t = pt;
                            fan_s = {pos, cos_};
                            fan_t = {pot, cot};
                        }
                    }
                }
            }
        }
        if (fan_s.size() > kFanWindow) {
            fan_s.erase(fan_s.begin());
            fan_t.erase(fan_t.begin());
        }
        prev = cur;

        if (fan_active && !fan_blocked && fan_s.size() >= fan_next_try) {
            const size_t n = fan_s.size();
            fan_next_try = n + std::max<size_t>(4, n / 2);
            bool jumped = false;
            for (size_t r = 1; !jumped && 3 * r + 1 <= n; ++r) {
                MoebiusMap gs, gt;
                try {
                    gs = three_point_map({pivot_s, fan_s[n - 1 - r], fan_s[n - 2 - r]},
                                         {pivot_s, fan_s[n - 1], fan_s[n - 2]});
                    gt = three_point_map({pivot_t, fan_t[n - 1 - r], fan_t[n - 2 - r]},
                                         {pivot_t, fan_t[n - 1], fan_t[n - 2]});
                } catch (const std::exception&) {
                    continue;
                }
                // A genuine fan period map is parabolic; anything else would
                // blow up exponentially under powering.
                const auto parabolic = [](const MoebiusMap& m) {
                    const Int tr = m.a + m.d;
                    return tr * tr == 4 * m.det();
                };
                if (!parabolic(gs) || !parabolic(gt)) continue;
                bool periodic = true;
                for (size_t m = 0; m + r < n && periodic; ++m)
                    periodic = apply(gs, fan_s[m]) == fan_s[m + r] &&
                               apply(gt, fan_t[m]) == fan_t[m + r];
                if (!periodic) continue;

                // x lies beyond the edge about to be crossed; count how many
                // whole periods it stays beyond, doubling then bisecting.
                const BoundaryPoint& w = fan_s[n - 1];
                const BoundaryPoint& near_ref = fan_s[n - 2];
                std::optional<BoundaryPoint> hit;  // x equals a fan vertex
                const auto beyond = [&](const Int& e) {
                    const MoebiusMap p = moebius_power(gs, e);
                    const BoundaryPoint v = apply(p, w);
                    if (v == xr) {
                        hit = apply(moebius_power(gt, e), fan_t[n - 1]);
                        return true;
                    }
                    return separates(pivot_s, v, xr, near_ref);
                };
                Int good = 0, probe = 1;
                while (beyond(probe) && !hit) {
                    good = probe;
                    probe <<= 1;
                }
                if (hit) return {*hit, *hit};
                Int bad = probe;
                while (bad - good > 1) {
                    const Int mid = (good + bad) / 2;
                    if (beyond(mid) && !hit)
                        good = mid;
                    else if (hit)
                        return {*hit, *hit};
                    else
                        bad = mid;
                }
                if (good == 0) break;  // period fits but x is inside this one

                const MoebiusMap ps = moebius_power(gs, good);
                const MoebiusMap pt = moebius_power(gt, good);
                Aligned landed;
                landed.s = {pivot_s, apply(ps, fan_s[n - 2]), apply(ps, fan_s[n - 1])};
                landed.t = {pivot_t, apply(pt, fan_t[n - 2]), apply(pt, fan_t[n - 1])};
                const bool src_ok = is_triangle_of(src_, landed.s[0], landed.s[1], landed.s[2]);
                if (!src_ok ||
                    !is_triangle_of(tgt_, landed.t[0], landed.t[1], landed.t[2])) {
                    fan_blocked = true;  // extrapolation disagrees; walk it out
                    break;
                }
                a = landed;
                fan_active = false;
                fan_s.clear();
                fan_t.clear();
                prev.reset();
                jumped = true;
            }
            if (jumped) continue;
        }
        cross(a, side);
    }
    if (vertex_mode)
        throw std::invalid_argument("eval_vertex: walk budget exceeded; point is not a vertex");
    throw std::runtime_error("eval_interval: refinement budget exceeded");
}

std::optional<MoebiusMap> CharMap::conjugate_by(const MoebiusMap& gamma) const {
    const Aligned a = base_aligned();
    std::array<BoundaryPoint, 3> hv, w;
    try {
        for (int i = 0; i < 3; ++i) {
            hv[i] = a.t[i];
            w[i] = eval_vertex(apply(gamma, a.s[i]));
        }
        const MoebiusMap fit = three_point_map(hv, w);
        std::mt19937 rng(271828u);
        for (int trial = 0; trial < 20; ++trial) {
            const BoundaryPoint v = random_vertex(rng);
            if (eval_vertex(apply(gamma, v)) != apply(fit, eval_vertex(v)))
                return std::nullopt;
        }
        return fit;
    } catch (const std::domain_error&) {
        return std::nullopt;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

CharMap characteristic_map(const Tessellation& t1, const Tessellation& t2) {
    return CharMap(t1, t2);
}

PiecewiseMoebius::PiecewiseMoebius(std::vector<PiecewisePiece> pieces)
    : pieces_(std::move(pieces)) {
    const size_t n = pieces_.size();
    if (n < 2) throw std::invalid_argument("PiecewiseMoebius: need at least two pieces");
    for (size_t i = 0; i < n; ++i) {
        const PiecewisePiece& cur = pieces_[i];
        const PiecewisePiece& nxt = pieces_[(i + 1) % n];
        if (cur.from == cur.to)
            throw std::invalid_argument("PiecewiseMoebius: degenerate arc");
        if (cur.to != nxt.from)
            throw std::invalid_argument("PiecewiseMoebius: arcs are not consecutive");
        if (apply(cur.map, cur.to) != apply(nxt.map, nxt.from))
            throw std::invalid_argument("PiecewiseMoebius: discontinuity at a breakpoint");
    }
    if (n >= 3) {
        for (size_t i = 0; i < n; ++i) {
            if (!ccw(pieces_[i].from, pieces_[i].to, pieces_[(i + 1) % n].to))
                throw std::invalid_argument("PiecewiseMoebius: breakpoints out of cyclic order");
        }
    }
}

BoundaryPoint PiecewiseMoebius::eval(const BoundaryPoint& x) const {
    for (const PiecewisePiece& p : pieces_) {
        if (x == p.from || x == p.to || ccw(p.from, x, p.to))
            return apply(p.map, x);
    }
    throw std::logic_error("PiecewiseMoebius: point not covered by any arc");
}

PiecewiseMoebius single_flip() {
    const BoundaryPoint inf = BoundaryPoint::infinity();
    std::vector<PiecewisePiece> p;
    p.push_back({inf, BoundaryPoint(0), MoebiusMap::identity()});
    p.push_back({BoundaryPoint(0), BoundaryPoint(1), MoebiusMap(1, 0, 1, 1)});
    p.push_back({BoundaryPoint(1), BoundaryPoint(2), MoebiusMap(0, 1, -1, 3)});
    p.push_back({BoundaryPoint(2), inf, MoebiusMap(1, -1, 0, 1)});
    return PiecewiseMoebius(std::move(p));
}

PiecewiseMoebius single_flip_inverse() {
    const BoundaryPoint inf = BoundaryPoint::infinity();
    std::vector<PiecewisePiece> p;
    p.push_back({inf, BoundaryPoint(0), MoebiusMap::identity()});
    p.push_back({BoundaryPoint(0), BoundaryPoint(Int(1), Int(2)), MoebiusMap(1, 0, -1, 1)});
    p.push_back({BoundaryPoint(Int(1), Int(2)), BoundaryPoint(1), MoebiusMap(3, -1, 1, 0)});
    p.push_back({BoundaryPoint(1), inf, MoebiusMap::T()});
    return PiecewiseMoebius(std::move(p));
}

PiecewiseMoebius piecewise_single_flip(const MoebiusMap& A) {
    if (A.b != 0 || A.c != 0)
        throw std::invalid_argument("piecewise_single_flip: expected a diagonal map");
    const MoebiusMap Ainv = A.inverse();
    std::vector<PiecewisePiece> p;
    for (const PiecewisePiece& base : single_flip().pieces())
        p.push_back({apply(A, base.from), apply(A, base.to), A * base.map * Ainv});
    return PiecewiseMoebius(std::move(p));
}

CuspData cusp_data(const Tessellation& t, const BoundaryPoint& y, const Subgroup& g) {
    const MoebiusMap& A = t.base_map();
    const MoebiusMap Ainv = A.inverse();
    const BoundaryPoint yf = apply(Ainv, y);
    const MoebiusMap gen0 = primitive_parabolic(yf);

    int p = 0;
    MoebiusMap power;
    for (int k = 1; k <= kPeriodBound; ++k) {
        power = power * gen0;
        if (g.contains(power)) { p = k; break; }
    }
    if (p == 0) throw std::runtime_error("cusp_data: parabolic period exceeds bound");

    CuspData out;
    out.gen = A * power * Ainv;

    // Reference edge at y: walk from the base triangle to a triangle with
    // vertex y, then take its side at y with the smaller far endpoint. The
    // count per parabolic period does not depend on this choice.
    const OrientedEdge& d = t.distinguished();
    std::array<BoundaryPoint, 3> tri = {d.from, d.to, t.third_vertex(d)};
    BoundaryPoint x0;
    for (long step = 0;; ++step) {
        if (step > kFanBound)
            throw std::runtime_error("cusp_data: walk budget exceeded");
        int at = -1;
        for (int i = 0; i < 3; ++i)
            if (tri[i] == y) { at = i; break; }
        if (at >= 0) {
            const BoundaryPoint& u = tri[(at + 1) % 3];
            const BoundaryPoint& v = tri[(at + 2) % 3];
            x0 = lt(u, v) ? u : v;
            break;
        }
        int side = -1;
        for (int i = 0; i < 3; ++i) {
            if (separates(tri[(i + 1) % 3], tri[(i + 2) % 3], y, tri[i])) {
                side = i;
                break;
            }
        }
        if (side < 0) throw std::invalid_argument("cusp_data: y is not a vertex");
        const int j = (side + 1) % 3, k = (side + 2) % 3;
        BoundaryPoint u = t.third_vertex(OrientedEdge(tri[j], tri[k]));
        if (u == tri[side]) u = t.third_vertex(OrientedEdge(tri[k], tri[j]));
        tri[side] = u;
    }

    // Rotate the fan of edges at y in one direction until the reference edge
    // returns as its image under the period parabolic (either direction).
    const BoundaryPoint t1 = apply(out.gen, x0);
    const BoundaryPoint t2 = apply(out.gen.inverse(), x0);
    BoundaryPoint x = x0;
    for (long k = 1; k <= kFanBound; ++k) {
        x = t.third_vertex(OrientedEdge(y, x));
        if (x == t1 || x == t2) {
            out.k = static_cast<int>(k);
            return out;
        }
    }
    throw std::runtime_error("cusp_data: fan rotation budget exceeded");
}

BoundaryPoint FlipPair::conjugator(const BoundaryPoint& x) const {
    return g.eval_vertex(f_inv.eval_vertex(x));
}

FlipPair flip_pair(const MoebiusMap& A, int level) {
    return flip_pair(A, intersect(ga_subgroup(A), congruence_subgroup(level)));
}

FlipPair flip_pair(const MoebiusMap& A, const Subgroup& group) {
    const Tessellation base = Tessellation::farey();
    const Tessellation scaled = Tessellation::farey_image(A);
    const Edge seed(BoundaryPoint(1), BoundaryPoint::infinity());
    const Edge seed_scaled(apply(A, BoundaryPoint(1)), apply(A, BoundaryPoint::infinity()));
    const Tessellation moved_base = whitehead_move(base, group, seed);
    const Tessellation moved_scaled = whitehead_move(scaled, group, seed_scaled);
    return FlipPair{A,
                    group,
                    CharMap(moved_base, base),
                    CharMap(base, moved_base),
                    CharMap(moved_scaled, scaled),
                    CharMap(scaled, moved_scaled)};
}

double cusp_slope_empirical(const CharMap& h, const BoundaryPoint& y, int depth) {
    if (depth < 1) throw std::invalid_argument("cusp_slope_empirical: depth must be >= 1");
    const BoundaryPoint y2 = h.eval_vertex(y);

    const auto normalizer = [](const BoundaryPoint& cusp) {
        MoebiusMap gen = primitive_parabolic(cusp);
        const BoundaryPoint xl =
            cusp.is_infinity() ? BoundaryPoint(0) : BoundaryPoint::infinity();
        if (!ccw(cusp, xl, apply(gen, xl))) gen = gen.inverse();
        return std::pair<MoebiusMap, MoebiusMap>(
            three_point_map({cusp, xl, apply(gen, xl)},
                            {BoundaryPoint::infinity(), BoundaryPoint(0), BoundaryPoint(1)}),
            gen);
    };
    const auto [M, gen_src] = normalizer(y);
    const auto [N, gen_tgt] = normalizer(y2);
    const MoebiusMap Minv = M.inverse();

    // Rungs of the parabolic ladder: M maps the n-th rung to n exactly.
    const auto rung_value = [&](long n) {
        const BoundaryPoint v = apply(Minv, BoundaryPoint(n));
        const BoundaryPoint w = apply(N, h.eval_vertex(v));
        if (w.is_infinity())
            throw std::runtime_error("cusp_slope_empirical: ladder image escapes");
        return w.as_rational();
    };
    const long n1 = 1L << (depth - 1);
    const long n2 = 1L << depth;
    const Rational slope = (rung_value(n2) - rung_value(n1)) / Rational(n2 - n1);
    return slope.convert_to<double>();
}

}  // namespace whmap
