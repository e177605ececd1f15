#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "whmap/charmap.hpp"
#include "whmap/qsmetric.hpp"
#include "whmap/tessellation.hpp"

#include <random>
#include <vector>

using namespace whmap;

namespace {

const BoundaryPoint kInf = BoundaryPoint::infinity();

VertexEvaluator moebius_evaluator(const MoebiusMap& m) {
    return [m](const BoundaryPoint& x) { return apply(m, x); };
}

VertexEvaluator identity_evaluator() {
    return [](const BoundaryPoint& x) { return x; };
}

std::vector<BoundaryPoint> sample_vertices(unsigned seed, int count) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> len(1, 10);
    std::uniform_int_distribution<int> pick(0, 2);
    std::vector<BoundaryPoint> out;
    while (static_cast<int>(out.size()) < count) {
        MoebiusMap g;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) {
            switch (pick(rng)) {
                case 0: g = g * MoebiusMap::S(); break;
                case 1: g = g * MoebiusMap::T(); break;
                default: g = g * MoebiusMap(1, -1, 0, 1); break;
            }
        }
        out.push_back(apply(g, BoundaryPoint(0)));
    }
    return out;
}

}  // namespace

TEST_CASE("identity map measures as projective") {
    QSReport r = qs_report(identity_evaluator(), 0);
    CHECK(r.m_estimate == Rational(1));
    CHECK(r.cr_distortion == 0.0);
    MoebiusDeviation d = moebius_deviation(identity_evaluator(), sample_vertices(11, 50));
    CHECK(d.deviation == 0.0);
    CHECK_FALSE(d.witness.has_value());
}

TEST_CASE("affine scaling has symmetric ratio one") {
    VertexEvaluator two_z = moebius_evaluator(MoebiusMap::scaling(2, 1));
    CHECK(qs_constant_estimate(two_z, standard_grid()) == Rational(1));
    CHECK(crossratio_distortion(two_z, standard_quads(0)) == 0.0);
    MoebiusDeviation d = moebius_deviation(two_z, sample_vertices(12, 50));
    CHECK(d.deviation == 0.0);
    CHECK_FALSE(d.witness.has_value());

    SUBCASE("walked evaluation gives the same measurements") {
        CharMap h = characteristic_map(Tessellation::farey(),
                                       Tessellation::farey_image(MoebiusMap::scaling(2, 1)));
        VertexEvaluator walked = [&h](const BoundaryPoint& x) { return h.eval_vertex(x); };
        std::vector<QSGridPoint> grid = standard_grid();
        grid.resize(200);
        CHECK(qs_constant_estimate(walked, grid) == Rational(1));
    }
}

TEST_CASE("projective maps have zero cross-ratio distortion") {
    std::mt19937 rng(13u);
    std::uniform_int_distribution<int> coef(-3, 3);
    std::vector<std::array<BoundaryPoint, 4>> quads = standard_quads(1);
    quads.resize(150);
    for (int trial = 0; trial < 5; ++trial) {
        MoebiusMap m;
        for (;;) {
            const Int a = coef(rng), b = coef(rng), c = coef(rng), d = coef(rng);
            if (a * d - b * c > 0) { m = MoebiusMap(a, b, c, d); break; }
        }
        CHECK(crossratio_distortion(moebius_evaluator(m), quads) == 0.0);
        CHECK(teich_proxy_distance(identity_evaluator(), moebius_evaluator(m), quads) == 0.0);
    }
}

TEST_CASE("post-composition invariance of the distortion") {
    PiecewiseMoebius fi = single_flip_inverse();
    PiecewiseMoebius g = piecewise_single_flip(MoebiusMap::scaling(2, 1));
    VertexEvaluator w = [&](const BoundaryPoint& x) { return g.eval(fi.eval(x)); };
    MoebiusMap post(2, 1, 1, 1);
    VertexEvaluator pw = [&](const BoundaryPoint& x) { return apply(post, w(x)); };
    std::vector<std::array<BoundaryPoint, 4>> quads = standard_quads(2);
    quads.resize(300);
    CHECK(crossratio_distortion(w, quads) == crossratio_distortion(pw, quads));
}

TEST_CASE("single-flip composition is distorted yet linear on the negative arc") {
    PiecewiseMoebius fi = single_flip_inverse();
    PiecewiseMoebius g = piecewise_single_flip(MoebiusMap::scaling(2, 1));
    VertexEvaluator w = [&](const BoundaryPoint& x) { return g.eval(fi.eval(x)); };

    CHECK(crossratio_distortion(w, standard_quads(0)) > 0.0);

    std::vector<BoundaryPoint> samples = sample_vertices(14, 100);
    samples.push_back(BoundaryPoint(Int(1), Int(2)));
    MoebiusDeviation d = moebius_deviation(w, samples);
    CHECK(d.deviation > 0.0);
    REQUIRE(d.witness.has_value());

    // Identity on every tested vertex of the closed negative arc.
    for (const BoundaryPoint& v : sample_vertices(15, 200)) {
        if (!v.is_infinity() && v.num > 0) continue;
        CHECK(w(v) == v);
    }
}

TEST_CASE("conjugating composition is measurably non-projective") {
    FlipPair pair = flip_pair(MoebiusMap::scaling(2, 1), 2);
    VertexEvaluator h = [&pair](const BoundaryPoint& x) { return pair.conjugator(x); };

    std::vector<QSGridPoint> grid;
    for (const QSGridPoint& p : standard_grid())
        if (p.t == Rational(1, 4) && p.x >= 0 && p.x <= 2) grid.push_back(p);
    REQUIRE(!grid.empty());
    const Rational m = qs_constant_estimate(h, grid);
    CHECK(m > 1);

    SUBCASE("refinement monotonicity") {
        std::vector<QSGridPoint> half(grid.begin(), grid.begin() + grid.size() / 2);
        CHECK(qs_constant_estimate(h, half) <= m);
    }
}

TEST_CASE("reports are deterministic and serializable") {
    std::vector<std::array<BoundaryPoint, 4>> a = standard_quads(7);
    std::vector<std::array<BoundaryPoint, 4>> b = standard_quads(7);
    CHECK(a == b);
    QSReport r1 = qs_report(identity_evaluator(), 7);
    QSReport r2 = qs_report(identity_evaluator(), 7);
    CHECK(r1.to_json() == r2.to_json());
    CHECK(r1.to_json().find("\"m_estimate\":\"1\"") != std::string::npos);
}
