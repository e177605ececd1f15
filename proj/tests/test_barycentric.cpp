#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "whmap/barycentric.hpp"

#include <cmath>
#include <random>

using namespace whmap;

namespace {

Complex random_disk_point(std::mt19937& rng, double rmax) {
    std::uniform_real_distribution<double> rad(0.0, rmax);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    return std::polar(rad(rng), ang(rng));
}

// Disk automorphism w -> e^{i theta} (w + a) / (1 + conj(a) w).
struct DiskMoebius {
    Complex a;
    double theta = 0.0;
    Complex operator()(const Complex& w) const {
        return std::polar(1.0, theta) * (w + a) / (1.0 + std::conj(a) * w);
    }
};

DiskMoebius random_disk_moebius(std::mt19937& rng) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    DiskMoebius m;
    m.a = random_disk_point(rng, 0.5);
    m.theta = ang(rng);
    return m;
}

CharMap flip_homeo() {
    Tessellation moved = whitehead_move(Tessellation::farey(), congruence_subgroup(2),
                                        Edge(BoundaryPoint(1), BoundaryPoint::infinity()));
    return characteristic_map(moved, Tessellation::farey());
}

}  // namespace

TEST_CASE("extension of the identity is the identity") {
    BoundaryMap id = boundary_identity();
    std::mt19937 rng(21u);
    for (int i = 0; i < 100; ++i) {
        const Complex z = random_disk_point(rng, 0.9);
        const DEResult r = de_extend(id, z);
        CHECK(r.converged);
        CHECK(std::abs(r.w - z) < 1e-9);
    }
}

TEST_CASE("extension of a projective boundary trace is the map itself") {
    const Complex i_half(0.0, 1.0);
    for (const MoebiusMap& m :
         {MoebiusMap::T(), MoebiusMap::S(), MoebiusMap(2, 1, 1, 1), MoebiusMap::scaling(2, 1)}) {
        const DEResult r = de_extend(boundary_of(m), Complex(0.0, 0.0));
        CHECK(r.converged);
        const double a = m.a.convert_to<double>(), b = m.b.convert_to<double>();
        const double c = m.c.convert_to<double>(), d = m.d.convert_to<double>();
        const Complex expected = disk_from_half((a * i_half + b) / (c * i_half + d));
        CHECK(std::abs(r.w - expected) < 1e-6);
    }
}

TEST_CASE("discretized conformal naturality") {
    std::mt19937 rng(22u);
    for (int pair = 0; pair < 10; ++pair) {
        const DiskMoebius m1 = random_disk_moebius(rng);
        const DiskMoebius m2 = random_disk_moebius(rng);
        BoundaryMap composed = [&](const Complex& w) { return m1(m2(w)); };
        for (int pt = 0; pt < 10; ++pt) {
            const Complex z = random_disk_point(rng, 0.8);
            const DEResult r = de_extend(composed, z);
            CHECK(r.converged);
            CHECK(std::abs(r.w - m1(m2(z))) < 1e-6);
        }
    }
}

TEST_CASE("quadrature doubling self-consistency") {
    std::mt19937 rng(23u);
    DEParams p1, p2;
    p1.quad_nodes = 512;
    p2.quad_nodes = 1024;
    BoundaryMap f = boundary_of(MoebiusMap(2, 1, 1, 1));
    for (int i = 0; i < 10; ++i) {
        const Complex z = random_disk_point(rng, 0.8);
        const DEResult a = de_extend(f, z, p1);
        const DEResult b = de_extend(f, z, p2);
        CHECK(a.converged);
        CHECK(b.converged);
        CHECK(std::abs(a.w - b.w) < 1e-8);
    }
}

TEST_CASE("dilatation vanishes for conformal data") {
    std::mt19937 rng(24u);
    for (int i = 0; i < 5; ++i) {
        const Complex z = random_disk_point(rng, 0.7);
        const BeltramiSample s0 = beltrami_at(boundary_identity(), z);
        CHECK(s0.converged);
        CHECK(std::abs(s0.mu) < 1e-6);
        const BeltramiSample s1 = beltrami_at(boundary_of(MoebiusMap(2, 1, 1, 1)), z);
        CHECK(s1.converged);
        CHECK(std::abs(s1.mu) < 1e-6);
    }
}

TEST_CASE("flip homeomorphism dilatation localizes near the flipped orbit") {
    CharMap h = flip_homeo();
    DEParams p;
    p.quad_nodes = 256;
    BoundaryMap f = boundary_of(interval_map(h), p.boundary_delta);

    const Complex near_flip = disk_from_half(Complex(1.0, 1.0));  // on the seed edge
    const Complex far_cusp = disk_from_half(Complex(0.0, 148.0));

    const BeltramiSample sn = beltrami_at(f, near_flip, p);
    const BeltramiSample sf = beltrami_at(f, far_cusp, p);
    REQUIRE(sn.converged);
    REQUIRE(sf.converged);
    CHECK(std::abs(sn.mu) < 1.0);
    CHECK(std::abs(sf.mu) < 1.0);
    CHECK(std::abs(sf.mu) < std::abs(sn.mu));

    SUBCASE("support profile separates near from far") {
        std::vector<Complex> pts = {near_flip, disk_from_half(Complex(-1.0, 1.0)), far_cusp,
                                    disk_from_half(Complex(0.0, 90.0))};
        std::vector<Complex> orbit =
            orbit_points(congruence_subgroup(2), Complex(0.0, 1.0), 2);
        REQUIRE(orbit.size() > 3);
        std::vector<ProfilePoint> prof = support_profile(f, pts, 20, orbit, p);
        REQUIRE(prof.size() == 4);
        for (const ProfilePoint& q : prof) {
            CHECK(q.converged);
            CHECK(q.in_V == (q.abs_mu >= 1.0 / 20));
        }
        CHECK(prof[0].orbit_distance < prof[2].orbit_distance);
        CHECK(prof[1].orbit_distance < prof[3].orbit_distance);
        CHECK(prof[2].abs_mu < prof[0].abs_mu);
    }
}

TEST_CASE("projective maps produce an empty level set") {
    std::vector<Complex> pts = {Complex(0.2, 0.1), Complex(-0.4, 0.3), Complex(0.0, 0.0)};
    std::vector<Complex> orbit = {Complex(0.0, 0.0)};
    std::vector<ProfilePoint> prof =
        support_profile(boundary_of(MoebiusMap(2, 1, 1, 1)), pts, 10, orbit);
    for (const ProfilePoint& q : prof) {
        CHECK(q.converged);
        CHECK_FALSE(q.in_V);
    }
}
