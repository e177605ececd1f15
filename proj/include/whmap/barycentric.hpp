#pragma once

#include "whmap/charmap.hpp"
#include "whmap/diskmodel.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace whmap {

/// Circle homeomorphism in disk coordinates: unit-circle point to
/// unit-circle point. Must be safe for concurrent calls.
using BoundaryMap = std::function<Complex(const Complex&)>;

/// Interval oracle in half-plane boundary coordinates: (x, delta) -> a
/// vertex-endpoint arc of circular width < delta containing the image of x.
using IntervalMap =
    std::function<std::pair<BoundaryPoint, BoundaryPoint>(double, double)>;

struct DEParams {
    int quad_nodes = 512;
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
    double fd_step = 1e-4;
    double boundary_delta = 1e-6;
};

BoundaryMap boundary_identity();
/// Boundary trace of a real projective map, acting through the half-plane
/// correspondence.
BoundaryMap boundary_of(const MoebiusMap& m);
/// Arc-midpoint sampling of an interval oracle at width delta.
BoundaryMap boundary_of(const IntervalMap& im, double delta);
/// Convenience: the interval oracle of a characteristic map.
IntervalMap interval_map(const CharMap& h);

struct DEResult {
    Complex w;
    bool converged = false;
};

/// Barycentric extension of f at z (|z| < 1): solves the discretized
/// vanishing-barycenter equation mean_j (f(zeta_j) - w)/(1 - conj(w) f(zeta_j)) = 0
/// with nodes pushed to z's viewpoint, by damped Newton iteration.
/// Non-convergence is reported, never papered over.
DEResult de_extend(const BoundaryMap& f, const Complex& z, const DEParams& p = {});

struct BeltramiSample {
    Complex z;
    Complex mu;
    bool converged = false;
};

/// Dilatation mu = (d/d conj z)E / (d/dz)E of the extension at z, via a
/// centered four-point finite-difference stencil of step p.fd_step.
BeltramiSample beltrami_at(const BoundaryMap& f, const Complex& z, const DEParams& p = {});

struct ProfilePoint {
    Complex z;
    double abs_mu = 0.0;
    bool in_V = false;  // |mu| >= 1/N
    double orbit_distance = 0.0;
    bool converged = false;
};

/// Per-point dilatation magnitude, membership in the level set
/// {|mu| >= 1/N}, and hyperbolic distance to the nearest supplied orbit
/// point. Points with |z| > 0.999 are skipped (no room for the stencil).
std::vector<ProfilePoint> support_profile(const BoundaryMap& f,
                                          const std::vector<Complex>& points, int N,
                                          const std::vector<Complex>& orbit,
                                          const DEParams& p = {});

/// Orbit of the half-plane point z0 under short words in the subgroup's
/// Schreier generators, returned as disk points (deduplicated).
std::vector<Complex> orbit_points(const Subgroup& g, const Complex& z0_half, int word_len);

}  // namespace whmap
