#pragma once

#include "whmap/moebius.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace whmap {

/// A circle homeomorphism evaluated exactly on extended-rational vertices.
using VertexEvaluator = std::function<BoundaryPoint(const BoundaryPoint&)>;

struct QSGridPoint {
    Rational x;
    Rational t;  // > 0
};

/// Fixed reproducible sample set: vertices of the depth-8 base-tessellation
/// window in [-4, 4], each paired with offsets t = 2^-k for k = 0..6.
std::vector<QSGridPoint> standard_grid();

/// Fixed quadruple set: consecutive 4-tuples of the sorted depth-8 window
/// vertices plus 200 seeded random distinct 4-tuples.
std::vector<std::array<BoundaryPoint, 4>> standard_quads(unsigned seed);

/// Max over the grid of max(rho, 1/rho) for the symmetric ratio
/// rho = (h(x+t) - h(x)) / (h(x) - h(x-t)), exact rational arithmetic.
/// Requires h to fix 0 and infinity (so it is increasing on the reals).
Rational qs_constant_estimate(const VertexEvaluator& h, const std::vector<QSGridPoint>& grid);

/// Max over quadruples Q of |log |cr(h(Q))| - log |cr(Q)||; zero iff h
/// preserves every sampled cross-ratio. A degenerate image quadruple is an
/// evaluator bug and throws.
double crossratio_distortion(const VertexEvaluator& h,
                             const std::vector<std::array<BoundaryPoint, 4>>& quads);

/// Comparison against the linear map z -> h(1) z (the projective fit through
/// the images of 0, 1, infinity, which h is required to fix respectively to
/// 0, h(1), infinity): the first exact mismatch sample, and the max
/// |log(h(x) / (h(1) x))| over the samples.
struct MoebiusDeviation {
    double deviation = 0.0;
    std::optional<BoundaryPoint> witness;
};
MoebiusDeviation moebius_deviation(const VertexEvaluator& h,
                                   const std::vector<BoundaryPoint>& samples);

/// Fixed small vertex set used for deviation certification.
std::vector<BoundaryPoint> standard_deviation_samples();

/// Max over quadruples of |log |cr(h1(Q))| - log |cr(h2(Q))||: symmetric,
/// zero when the maps agree on the samples, and invariant under
/// post-composition of either map with a projective map.
double teich_proxy_distance(const VertexEvaluator& h1, const VertexEvaluator& h2,
                            const std::vector<std::array<BoundaryPoint, 4>>& quads);

struct QSReport {
    Rational m_estimate = 1;
    double cr_distortion = 0.0;
    unsigned seed = 0;
    std::string sample_description;

    std::string to_json() const;
};

/// Full report on the standard grid and quadruple set.
QSReport qs_report(const VertexEvaluator& h, unsigned seed);

}  // namespace whmap
