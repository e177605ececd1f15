#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "whmap/orbitseq.hpp"

#include <stdexcept>

using namespace whmap;

TEST_CASE("empty schedule is trivially complete") {
    ScheduleResult r = build_schedule(0, {{Int(2), Int(1), 2}});
    CHECK(r.entries.empty());
    CHECK(r.complete());

    CompositionState s = compose_and_trace(r);
    CHECK(s.cauchy_trace.empty());
    CHECK(s.verdicts.empty());
    CHECK(s.composed(BoundaryPoint(5, 7)) == BoundaryPoint(5, 7));
    CHECK(s.composed(BoundaryPoint::infinity()) == BoundaryPoint::infinity());
}

TEST_CASE("conjugation fitting recovers exact relations") {
    const VertexEvaluator id = [](const BoundaryPoint& x) { return x; };
    auto m = fit_conjugation(id, MoebiusMap::T());
    REQUIRE(m.has_value());
    CHECK(*m == MoebiusMap::T());

    // Through the scaling h(x) = 2x, conjugating T gives x -> x + 2.
    const MoebiusMap two = MoebiusMap::scaling(2, 1);
    const VertexEvaluator h = [&](const BoundaryPoint& x) { return apply(two, x); };
    auto c = fit_conjugation(h, MoebiusMap::T());
    REQUIRE(c.has_value());
    CHECK(*c == MoebiusMap(1, 2, 0, 1));
    CHECK(in_psl2z(*c));
}

TEST_CASE("one-entry schedule traces the stage distortion") {
    ScheduleResult r;
    r.entries.push_back({MoebiusMap::scaling(2, 1), 2, 0.1, 0.25});
    ScheduleParams params;
    CompositionState s = compose_and_trace(r, params);
    REQUIRE(s.cauchy_trace.size() == 1);

    const FlipPair pair = flip_pair(MoebiusMap::scaling(2, 1), 2);
    const double cr = crossratio_distortion(
        [&pair](const BoundaryPoint& x) { return pair.conjugator(x); },
        standard_quads(params.seed));
    CHECK(s.cauchy_trace[0] == doctest::Approx(cr).epsilon(1e-12));
    CHECK(s.cauchy_trace[0] > 0.0);

    REQUIRE(s.verdicts.size() == 1);
    CHECK(s.verdicts[0].conjugates);
    CHECK(s.verdicts[0].generators_checked > 0);
}

TEST_CASE("tampered schedules are rejected") {
    ScheduleResult r;
    r.entries.push_back({MoebiusMap::scaling(2, 1), 2, 0.1, 0.25});
    r.entries.push_back({MoebiusMap::scaling(3, 2), 3, 0.05, 0.125});
    r.entries.push_back({MoebiusMap::scaling(9, 8), 4, 0.02, 0.5});  // budget grew
    CHECK_THROWS_AS(compose_and_trace(r), std::invalid_argument);

    r.entries[2].budget = 0.0625;
    r.entries[2].level = 3;  // level did not increase
    CHECK_THROWS_AS(compose_and_trace(r), std::invalid_argument);

    r.entries[2].level = 4;
    r.entries[2].measured_norm = 0.1;  // over budget
    CHECK_THROWS_AS(compose_and_trace(r), std::invalid_argument);
}

TEST_CASE("impossible budgets yield a shortfall report") {
    // A single candidate cannot serve two stages (levels must increase), so
    // stage 2 must fall short.
    ScheduleParams params;
    params.de.quad_nodes = 64;
    ScheduleResult r = build_schedule(2, {{Int(2), Int(1), 2}}, params);
    CHECK(!r.complete());
    REQUIRE(r.shortfall.has_value());
    CHECK(r.shortfall->stage <= 2);
    CHECK(r.shortfall->budget > 0.0);
    CHECK(!r.shortfall->note.empty());
}
