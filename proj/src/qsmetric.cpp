#include "whmap/qsmetric.hpp"

#include "whmap/tessellation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace whmap {

namespace {

BoundaryPoint bp_of(const Rational& r) {
    return BoundaryPoint(numerator(r), denominator(r));
}

Rational finite_value(const VertexEvaluator& h, const BoundaryPoint& x) {
    const BoundaryPoint y = h(x);
    if (y.is_infinity())
        throw std::invalid_argument("qsmetric: map sends a finite sample to infinity");
    return y.as_rational();
}

// Sorted finite vertices of the depth-8 base window (all of them; callers
// filter further).
std::vector<BoundaryPoint> window_vertices() {
    std::set<std::string> seen;
    std::vector<BoundaryPoint> out;
    const Tessellation f = Tessellation::farey();
    for (const Triangle& tri : f.enumerate_triangles(8)) {
        for (const BoundaryPoint& v : tri.v) {
            if (v.is_infinity()) continue;
            if (seen.insert(v.str()).second) out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end(), lt);
    return out;
}

double log_abs_cross_ratio(const std::array<BoundaryPoint, 4>& q) {
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (q[i] == q[j])
                throw std::logic_error("qsmetric: degenerate quadruple");
    const Rational cr = cross_ratio(q[0], q[1], q[2], q[3]);
    return std::log(std::abs(cr.convert_to<double>()));
}

}  // namespace

std::vector<QSGridPoint> standard_grid() {
    std::vector<QSGridPoint> grid;
    for (const BoundaryPoint& v : window_vertices()) {
        const Rational x = v.as_rational();
        if (x < -4 || x > 4) continue;
        Rational t = 1;
        for (int k = 0; k <= 6; ++k, t /= 2) grid.push_back({x, t});
    }
    return grid;
}

std::vector<std::array<BoundaryPoint, 4>> standard_quads(unsigned seed) {
    const std::vector<BoundaryPoint> verts = window_vertices();
    std::vector<std::array<BoundaryPoint, 4>> quads;
    for (size_t i = 0; i + 3 < verts.size(); ++i)
        quads.push_back({verts[i], verts[i + 1], verts[i + 2], verts[i + 3]});
    std::mt19937 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, verts.size() - 1);
    const size_t target = quads.size() + 200;
    while (quads.size() < target) {
        std::array<size_t, 4> idx = {pick(rng), pick(rng), pick(rng), pick(rng)};
        const bool distinct = idx[0] != idx[1] && idx[0] != idx[2] && idx[0] != idx[3] &&
                              idx[1] != idx[2] && idx[1] != idx[3] && idx[2] != idx[3];
        if (!distinct) continue;
        quads.push_back({verts[idx[0]], verts[idx[1]], verts[idx[2]], verts[idx[3]]});
    }
    return quads;
}

Rational qs_constant_estimate(const VertexEvaluator& h, const std::vector<QSGridPoint>& grid) {
    Rational best = 1;
    for (const QSGridPoint& g : grid) {
        if (!(g.t > 0)) throw std::invalid_argument("qs_constant_estimate: offset must be positive");
        const Rational yp = finite_value(h, bp_of(g.x + g.t));
        const Rational y0 = finite_value(h, bp_of(g.x));
        const Rational ym = finite_value(h, bp_of(g.x - g.t));
        const Rational num = yp - y0;
        const Rational den = y0 - ym;
        if (!(num > 0) || !(den > 0))
            throw std::logic_error("qs_constant_estimate: map is not increasing on the grid");
        const Rational rho = num / den;
        best = std::max(best, std::max(rho, Rational(1) / rho));
    }
    return best;
}

double crossratio_distortion(const VertexEvaluator& h,
                             const std::vector<std::array<BoundaryPoint, 4>>& quads) {
    double worst = 0.0;
    for (const std::array<BoundaryPoint, 4>& q : quads) {
        const std::array<BoundaryPoint, 4> img = {h(q[0]), h(q[1]), h(q[2]), h(q[3])};
        worst = std::max(worst, std::abs(log_abs_cross_ratio(img) - log_abs_cross_ratio(q)));
    }
    return worst;
}

MoebiusDeviation moebius_deviation(const VertexEvaluator& h,
                                   const std::vector<BoundaryPoint>& samples) {
    if (h(BoundaryPoint(0)) != BoundaryPoint(0) ||
        h(BoundaryPoint::infinity()) != BoundaryPoint::infinity())
        throw std::invalid_argument("moebius_deviation: map must fix 0 and infinity");
    const Rational c = finite_value(h, BoundaryPoint(1));
    if (!(c > 0)) throw std::logic_error("moebius_deviation: image of 1 must be positive");

    MoebiusDeviation out;
    for (const BoundaryPoint& x : samples) {
        const BoundaryPoint hx = h(x);
        BoundaryPoint expected;
        if (x.is_infinity()) {
            expected = BoundaryPoint::infinity();
        } else {
            const Rational e = c * x.as_rational();
            expected = bp_of(e);
        }
        if (hx != expected && !out.witness) out.witness = x;
        if (!x.is_infinity() && x.num != 0 && !hx.is_infinity() && hx.num != 0) {
            const Rational ratio = hx.as_rational() / (c * x.as_rational());
            if (!(ratio > 0))
                throw std::logic_error("moebius_deviation: sign-violating image");
            out.deviation = std::max(out.deviation, std::abs(std::log(ratio.convert_to<double>())));
        }
    }
    return out;
}

double teich_proxy_distance(const VertexEvaluator& h1, const VertexEvaluator& h2,
                            const std::vector<std::array<BoundaryPoint, 4>>& quads) {
    double worst = 0.0;
    for (const std::array<BoundaryPoint, 4>& q : quads) {
        const std::array<BoundaryPoint, 4> i1 = {h1(q[0]), h1(q[1]), h1(q[2]), h1(q[3])};
        const std::array<BoundaryPoint, 4> i2 = {h2(q[0]), h2(q[1]), h2(q[2]), h2(q[3])};
        worst = std::max(worst, std::abs(log_abs_cross_ratio(i1) - log_abs_cross_ratio(i2)));
    }
    return worst;
}

std::string QSReport::to_json() const {
    nlohmann::json j;
    j["m_estimate"] = m_estimate.str();
    j["cr_distortion"] = cr_distortion;
    j["seed"] = seed;
    j["grid"] = sample_description;
    return j.dump();
}

std::vector<BoundaryPoint> standard_deviation_samples() {
    return {BoundaryPoint(1, 1), BoundaryPoint(2, 1), BoundaryPoint(3, 1),
            BoundaryPoint(1, 2), BoundaryPoint(1, 3), BoundaryPoint(2, 3),
            BoundaryPoint(3, 2), BoundaryPoint(1, 4), BoundaryPoint(3, 4),
            BoundaryPoint(4, 1)};
}

QSReport qs_report(const VertexEvaluator& h, unsigned seed) {
    QSReport r;
    r.seed = seed;
    r.sample_description =
        "depth-8 window vertices in [-4,4], offsets 2^-k k=0..6; "
        "consecutive quadruples plus 200 seeded random quadruples";
    r.m_estimate = qs_constant_estimate(h, standard_grid());
    r.cr_distortion = crossratio_distortion(h, standard_quads(seed));
    return r;
}

}  // namespace whmap
