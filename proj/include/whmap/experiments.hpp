#pragma once

#include "whmap/orbitseq.hpp"
#include "whmap/tessellation.hpp"

#include <string>
#include <utility>
#include <vector>

namespace whmap {

/// Sweep over scalings lambda = p/q > 1 and congruence levels N; one output
/// row per (lambda, N) pair, rows in the given order.
struct SweepConfig {
    std::vector<std::pair<Int, Int>> lambdas = {{4, 1}, {2, 1}, {3, 2}, {9, 8}};
    std::vector<int> levels = {2};
    unsigned seed = 20240701u;
    DEParams de{.quad_nodes = 128};
    std::string cache_dir;  // empty: no on-disk coset-table cache
};

/// CSV table (RFC 4180, one header row, preceded by one '#' comment line
/// recording the seed and sampling parameters). Columns per (lambda, N):
/// subgroup index, boundary-ratio constant, cross-ratio distortion,
/// non-projective flag + witness vertex, sampled dilatation difference
/// between the two stage extensions, and an error column (empty on success;
/// on failure the row carries the message and no partial numbers).
std::string run_sweep(const SweepConfig& cfg);

/// Unit-disk SVG: boundary circle plus one path per distinct geodesic of the
/// depth-d triangle closure. The distinguished edge carries class "dist",
/// edges of a moved tessellation's flipped orbit carry class "flip", all
/// others class "edge".
std::string render_svg(const Tessellation& t, int depth);

struct OrbitConfig {
    int stages = 3;
    std::vector<StageCandidate> candidates;
    ScheduleParams params;
};

struct OrbitOutcome {
    std::string json;
    bool complete = false;
};

/// Build a schedule, compose it, and serialize schedule + cauchy trace +
/// per-stage conjugation verdicts.
OrbitOutcome run_orbit_report(const OrbitConfig& cfg);

struct ProfileConfig {
    std::pair<Int, Int> lambda{2, 1};
    int level = 2;
    int threshold_n = 20;           // level-set threshold |mu| >= 1/N
    std::vector<double> radii = {0.3, 0.6, 0.8};
    int per_ring = 8;
    int orbit_word_len = 2;
    DEParams de{.quad_nodes = 128};
    std::string cache_dir;
};

/// Dilatation scan of the base-side flip map on a polar grid: CSV with
/// per-point |mu|, level-set membership, hyperbolic distance to the sampled
/// subgroup orbit, and convergence flag.
std::string run_profile(const ProfileConfig& cfg);

/// Cache filename stem for the subgroup of (A, level).
std::string cache_key(const MoebiusMap& A, int level);

/// Load the coset table of G_A ∩ Γ(level) from dir (if present), otherwise
/// build it and, when dir is nonempty, store it.
Subgroup cached_subgroup(const MoebiusMap& A, int level, const std::string& dir);

}  // namespace whmap
