#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "whmap/charmap.hpp"
#include "whmap/diskmodel.hpp"

#include <cmath>
#include <random>
#include <set>
#include <vector>

using namespace whmap;

namespace {

const BoundaryPoint kInf = BoundaryPoint::infinity();

BoundaryPoint bp(long n, long d) { return BoundaryPoint(Int(n), Int(d)); }

BoundaryPoint random_vertex(std::mt19937& rng) {
    std::uniform_int_distribution<int> len(1, 10);
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

std::vector<BoundaryPoint> window_vertices(const Tessellation& t, int depth) {
    std::set<std::string> seen;
    std::vector<BoundaryPoint> out;
    for (const Triangle& tri : t.enumerate_triangles(depth))
        for (const BoundaryPoint& v : tri.v)
            if (seen.insert(v.str()).second) out.push_back(v);
    return out;
}

// The Whitehead homeomorphism fixing (0 -> infinity): flipped tessellation
// (orbit of the edge (1, infinity) under g) back to the base one.
CharMap whitehead_homeo(const Subgroup& g) {
    Tessellation moved = whitehead_move(Tessellation::farey(), g, Edge(bp(1, 1), kInf));
    return characteristic_map(moved, Tessellation::farey());
}

}  // namespace

TEST_CASE("identity characteristic map") {
    CharMap h = characteristic_map(Tessellation::farey(), Tessellation::farey());
    CHECK(h.eval_vertex(bp(5, 7)) == bp(5, 7));
    std::mt19937 rng(1u);
    for (int i = 0; i < 50; ++i) {
        BoundaryPoint v = random_vertex(rng);
        CHECK(h.eval_vertex(v) == v);
    }
}

TEST_CASE("translated target gives the translation") {
    CharMap h = characteristic_map(Tessellation::farey(),
                                   Tessellation::farey_image(MoebiusMap::T()));
    CHECK(h.target().distinguished() == OrientedEdge(bp(1, 1), kInf));
    CHECK(h.eval_vertex(BoundaryPoint(0)) == bp(1, 1));
    std::mt19937 rng(2u);
    for (int i = 0; i < 50; ++i) {
        BoundaryPoint v = random_vertex(rng);
        CHECK(h.eval_vertex(v) == apply(MoebiusMap::T(), v));
    }
}

TEST_CASE("scaled target agrees with the direct action on 500 vertices") {
    MoebiusMap A = MoebiusMap::scaling(2, 1);
    CharMap h = characteristic_map(Tessellation::farey(), Tessellation::farey_image(A));
    std::vector<BoundaryPoint> verts = window_vertices(Tessellation::farey(), 8);
    REQUIRE(verts.size() >= 500);
    for (size_t i = 0; i < 500; ++i)
        CHECK(h.eval_vertex(verts[i]) == apply(A, verts[i]));
}

TEST_CASE("flipping the level-2 congruence orbit and mapping back") {
    CharMap h = whitehead_homeo(congruence_subgroup(2));
    CHECK(h.eval_vertex(bp(1, 1)) == bp(1, 2));
    CHECK(h.eval_vertex(bp(2, 1)) == bp(1, 1));
    CHECK(h.eval_vertex(bp(1, 2)) == bp(1, 4));
    CHECK(h.eval_vertex(BoundaryPoint(0)) == BoundaryPoint(0));
    CHECK(h.eval_vertex(kInf) == kInf);
    // At the seed vertex 1 the value matches the single-flip formula.
    CHECK(h.eval_vertex(bp(1, 1)) == single_flip().eval(bp(1, 1)));

    SUBCASE("circular order is preserved") {
        std::mt19937 rng(3u);
        int checked = 0;
        while (checked < 1000) {
            BoundaryPoint a = random_vertex(rng), b = random_vertex(rng),
                          c = random_vertex(rng);
            if (a == b || b == c || a == c) continue;
            ++checked;
            CHECK(ccw(a, b, c) == ccw(h.eval_vertex(a), h.eval_vertex(b), h.eval_vertex(c)));
        }
    }

    SUBCASE("the reverse characteristic map inverts it") {
        Tessellation moved =
            whitehead_move(Tessellation::farey(), congruence_subgroup(2), Edge(bp(1, 1), kInf));
        CharMap back = characteristic_map(Tessellation::farey(), moved);
        std::mt19937 rng(4u);
        for (int i = 0; i < 60; ++i) {
            BoundaryPoint v = random_vertex(rng);
            CHECK(back.eval_vertex(h.eval_vertex(v)) == v);
        }
    }
}

TEST_CASE("deep cusp ladders evaluate without grinding") {
    CharMap h = characteristic_map(Tessellation::farey(), Tessellation::farey());
    // Reaching an integer that large crosses around a billion triangles; the
    // periodic-fan gallop collapses the ladder into a handful of jumps.
    CHECK(h.eval_vertex(bp(1000000000, 1)) == bp(1000000000, 1));
    CHECK(h.eval_vertex(bp(1, 1000000000)) == bp(1, 1000000000));
}

TEST_CASE("interval evaluation") {
    CharMap h = characteristic_map(Tessellation::farey(), Tessellation::farey());
    const double x = std::sqrt(2.0);

    auto [lo, hi] = h.eval_interval(x, 1e-3);
    CHECK(arc_width(lo, hi) < 1e-3);
    CHECK(lo.as_double() < x);
    CHECK(hi.as_double() > x);

    SUBCASE("nesting under refinement") {
        auto [lo2, hi2] = h.eval_interval(x, 1e-2);
        auto [lo4, hi4] = h.eval_interval(x, 1e-4);
        CHECK(lo2.as_double() <= lo4.as_double());
        CHECK(hi4.as_double() <= hi2.as_double());
        CHECK(arc_width(lo4, hi4) < 1e-4);
    }

    SUBCASE("vertex input degenerates") {
        CharMap f = whitehead_homeo(congruence_subgroup(2));
        auto [a, b] = f.eval_interval(1.0, 1e-6);
        CHECK(a == bp(1, 2));
        CHECK(b == bp(1, 2));
    }

    SUBCASE("bad tolerance is rejected") {
        CHECK_THROWS_AS(h.eval_interval(x, 0.0), std::invalid_argument&);
    }
}

TEST_CASE("conjugation extraction") {
    SUBCASE("identity map conjugates to the element itself") {
        CharMap h = characteristic_map(Tessellation::farey(), Tessellation::farey());
        auto d = h.conjugate_by(MoebiusMap::T());
        REQUIRE(d.has_value());
        CHECK(*d == MoebiusMap::T());
    }

    SUBCASE("scaling map conjugates by the scaling") {
        MoebiusMap A = MoebiusMap::scaling(2, 1);
        CharMap h = characteristic_map(Tessellation::farey(), Tessellation::farey_image(A));
        auto dT = h.conjugate_by(MoebiusMap::T());
        REQUIRE(dT.has_value());
        CHECK(*dT == A * MoebiusMap::T() * A.inverse());
        CHECK(in_psl2z(*dT));  // z + 2
        auto dS = h.conjugate_by(MoebiusMap::S());
        REQUIRE(dS.has_value());
        CHECK(*dS == A * MoebiusMap::S() * A.inverse());
        CHECK_FALSE(in_psl2z(*dS));  // -4/z
    }

    SUBCASE("flip homeomorphism conjugates group elements into the integral group") {
        MoebiusMap A = MoebiusMap::scaling(2, 1);
        Subgroup g = intersect(ga_subgroup(A), congruence_subgroup(2));
        CharMap h = whitehead_homeo(g);
        std::vector<MoebiusMap> gens = schreier_generators(g);
        REQUIRE(!gens.empty());
        std::mt19937 rng(5u);
        int tested = 0;
        for (const MoebiusMap& gamma : gens) {
            if (tested == 3) break;
            ++tested;
            auto d = h.conjugate_by(gamma);
            REQUIRE(d.has_value());
            CHECK(in_psl2z(*d));
            for (int i = 0; i < 20; ++i) {
                BoundaryPoint v = random_vertex(rng);
                CHECK(h.eval_vertex(apply(gamma, v)) == apply(*d, h.eval_vertex(v)));
            }
        }
    }
}

TEST_CASE("piecewise single-flip maps") {
    SUBCASE("continuity and breakpoints") {
        PiecewiseMoebius f = single_flip();
        REQUIRE(f.pieces().size() == 4);
        CHECK(f.pieces()[0].map.is_identity());
        CHECK(f.eval(bp(-3, 1)) == bp(-3, 1));
        CHECK(f.eval(bp(1, 1)) == bp(1, 2));
        CHECK(f.eval(bp(2, 1)) == bp(1, 1));
        CHECK(f.eval(bp(1, 2)) == bp(1, 3));
    }

    SUBCASE("a discontinuous piece list is rejected") {
        std::vector<PiecewisePiece> p;
        p.push_back({kInf, BoundaryPoint(0), MoebiusMap::identity()});
        p.push_back({BoundaryPoint(0), kInf, MoebiusMap::T()});
        CHECK_THROWS_AS(PiecewiseMoebius(std::move(p)), std::invalid_argument&);
    }

    SUBCASE("inverse composes to the identity") {
        PiecewiseMoebius f = single_flip();
        PiecewiseMoebius fi = single_flip_inverse();
        std::mt19937 rng(6u);
        for (int i = 0; i < 200; ++i) {
            BoundaryPoint v = random_vertex(rng);
            CHECK(fi.eval(f.eval(v)) == v);
            CHECK(f.eval(fi.eval(v)) == v);
        }
    }

    SUBCASE("matches the combinatorial single-edge flip") {
        Tessellation moved = whitehead_move_single(Tessellation::farey(), Edge(bp(1, 1), kInf));
        CHECK(moved.flipped_new() == Edge(BoundaryPoint(0), bp(2, 1)));
        CharMap h = characteristic_map(moved, Tessellation::farey());
        CharMap hinv = characteristic_map(Tessellation::farey(), moved);
        PiecewiseMoebius f = single_flip();
        PiecewiseMoebius fi = single_flip_inverse();
        for (const BoundaryPoint& v : window_vertices(moved, 6)) {
            CHECK(h.eval_vertex(v) == f.eval(v));
            CHECK(hinv.eval_vertex(v) == fi.eval(v));
        }
    }

    SUBCASE("scaled version matches the flip of the scaled tessellation") {
        MoebiusMap A = MoebiusMap::scaling(2, 1);
        PiecewiseMoebius g = piecewise_single_flip(A);
        CHECK(g.eval(bp(1, 1)) == bp(2, 3));
        CHECK(g.eval(bp(4, 1)) == bp(2, 1));
        Tessellation moved =
            whitehead_move_single(Tessellation::farey_image(A), Edge(bp(2, 1), kInf));
        CharMap h = characteristic_map(moved, Tessellation::farey_image(A));
        for (const BoundaryPoint& v : window_vertices(moved, 6))
            CHECK(h.eval_vertex(v) == g.eval(v));
    }

    SUBCASE("identity scaling reproduces the base flip map") {
        PiecewiseMoebius g = piecewise_single_flip(MoebiusMap::identity());
        PiecewiseMoebius f = single_flip();
        std::mt19937 rng(7u);
        for (int i = 0; i < 100; ++i) {
            BoundaryPoint v = random_vertex(rng);
            CHECK(g.eval(v) == f.eval(v));
        }
    }

    SUBCASE("flip followed by the conjugated un-flip is not a single map") {
        MoebiusMap A = MoebiusMap::scaling(2, 1);
        PiecewiseMoebius g = piecewise_single_flip(A);
        PiecewiseMoebius fi = single_flip_inverse();
        auto w = [&](const BoundaryPoint& x) { return g.eval(fi.eval(x)); };
        CHECK(w(bp(-1, 1)) == bp(-1, 1));
        CHECK(w(bp(-2, 1)) == bp(-2, 1));
        CHECK(w(kInf) == kInf);
        CHECK(w(bp(1, 2)) == bp(2, 3));
        // A map fixing three points yet moving a fourth cannot come from a
        // single projective class.
        MoebiusMap fit = three_point_map({bp(-1, 1), bp(-2, 1), kInf},
                                         {w(bp(-1, 1)), w(bp(-2, 1)), w(kInf)});
        CHECK(fit.is_identity());
        CHECK(apply(fit, bp(1, 2)) != w(bp(1, 2)));
    }
}

TEST_CASE("cusp combinatorics") {
    Tessellation farey = Tessellation::farey();
    Subgroup full = Subgroup::full();
    Subgroup g2 = congruence_subgroup(2);

    SUBCASE("base tessellation at infinity") {
        CuspData c = cusp_data(farey, kInf, full);
        CHECK(c.k == 1);
        CHECK(c.gen == MoebiusMap::T());
    }

    SUBCASE("base tessellation at zero") {
        CuspData c = cusp_data(farey, BoundaryPoint(0), full);
        CHECK(c.k == 1);
        CHECK(c.gen == MoebiusMap(1, 0, 1, 1));
    }

    SUBCASE("level-2 stabilizer doubles the period at infinity") {
        CuspData c = cusp_data(farey, kInf, g2);
        CHECK(c.k == 2);
        CHECK(c.gen == MoebiusMap::T().pow(2));
    }

    SUBCASE("flipping the orbit erases one edge per period at infinity") {
        Tessellation moved = whitehead_move(farey, g2, Edge(bp(1, 1), kInf));
        CuspData c = cusp_data(moved, kInf, g2);
        CHECK(c.gen == MoebiusMap::T().pow(2));
        CHECK(c.k == 1);  // two base edges per period, one erased
    }
}

TEST_CASE("empirical cusp slopes") {
    SUBCASE("identity map has slope one") {
        CharMap h = characteristic_map(Tessellation::farey(), Tessellation::farey());
        CHECK(cusp_slope_empirical(h, kInf, 8) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(cusp_slope_empirical(h, BoundaryPoint(0), 8) == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("scaling map has slope two at infinity") {
        MoebiusMap A = MoebiusMap::scaling(2, 1);
        CharMap h = characteristic_map(Tessellation::farey(), Tessellation::farey_image(A));
        CHECK(cusp_slope_empirical(h, kInf, 8) == doctest::Approx(2.0).epsilon(1e-6));
    }

    SUBCASE("flip homeomorphism matches the combinatorial edge-count ratio") {
        Subgroup g2 = congruence_subgroup(2);
        Tessellation moved =
            whitehead_move(Tessellation::farey(), g2, Edge(bp(1, 1), kInf));
        CharMap h = characteristic_map(moved, Tessellation::farey());
        double predicted =
            static_cast<double>(cusp_data(moved, kInf, g2).k) /
            static_cast<double>(cusp_data(Tessellation::farey(), kInf, g2).k);
        CHECK(predicted == doctest::Approx(0.5));
        double slope = cusp_slope_empirical(h, kInf, 12);
        CHECK(slope == doctest::Approx(predicted).epsilon(1e-2));
    }
}
