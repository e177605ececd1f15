#pragma once

#include "whmap/barycentric.hpp"
#include "whmap/charmap.hpp"
#include "whmap/qsmetric.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace whmap {

/// One accepted stage of the composition driver: the scaling A = diag(p, q),
/// the congruence level N (stage subgroup G = G_A ∩ Γ(N)), the sampled
/// sup |mu| of the stage map's barycentric extension, and the stage budget
/// 2^-(i+1) it was accepted against.
struct ScheduleEntry {
    MoebiusMap A;
    int level = 2;
    double measured_norm = 0.0;
    double budget = 0.0;
};

/// Why schedule construction stopped early: the stage that had no admissible
/// candidate, its budget, and the best (smallest) norm seen among candidates
/// that at least certified as non-projective.
struct ScheduleShortfall {
    int stage = 0;
    double budget = 0.0;
    double best_norm = 0.0;
    std::string note;
};

struct ScheduleResult {
    std::vector<ScheduleEntry> entries;
    std::optional<ScheduleShortfall> shortfall;

    bool complete() const { return !shortfall.has_value(); }
};

/// Tuning knobs for candidate measurement. The norm is a sampled sup over a
/// small fixed point set near the flip orbit, so acceptance is conservative
/// in the reported direction (a sampled sup under-estimates the true sup).
struct ScheduleParams {
    DEParams de{.quad_nodes = 64};
    unsigned seed = 20240701u;
    /// Per-stage cap on Schreier generators fitted in the conjugation
    /// verdicts (0 = no cap); the count actually checked is reported.
    int max_generators_checked = 25;
};

/// Candidate stage map: lambda = p/q > 1 as the pair (p, q).
struct StageCandidate {
    Int p;
    Int q;
    int level = 2;
};

/// Greedy budgeted selection: for stage i = 1..max_stages pick the first
/// candidate whose level exceeds the previous stage's level, whose map
/// g ∘ f⁻¹ certifies as non-projective (deviation witness), and whose
/// sampled extension norm is below 2^-(i+1). Candidates are scanned in the
/// given order each stage.
ScheduleResult build_schedule(int max_stages, const std::vector<StageCandidate>& candidates,
                              const ScheduleParams& params = {});

/// Sampled sup |mu(E(h))| of the stage map of (A, level) over the standard
/// point set: disk images of i, 1+i, the point above A(1) at height 1, and
/// two subgroup translates of i.
double stage_norm(const FlipPair& pair, const ScheduleParams& params = {});

/// Fit the projective map m with m(h(x)) = h(gamma(x)) from the images of
/// (infinity, 0, 1) and verify the relation exactly on 20 pseudorandom
/// vertices; nullopt if the fit fails or any verification vertex disagrees.
std::optional<MoebiusMap> fit_conjugation(const VertexEvaluator& h, const MoebiusMap& gamma,
                                          unsigned seed = 314159u);

struct StageVerdict {
    int stage = 0;              // 1-based
    bool conjugates = true;     // every stage Schreier generator fitted into PSL2(Z)
    int generators_checked = 0;
};

struct CompositionState {
    std::vector<ScheduleEntry> entries;
    /// h_k = f_k ∘ ... ∘ f_1 for the last accepted stage k; identity when
    /// the schedule is empty.
    VertexEvaluator composed;
    /// cauchy_trace[i] = teich_proxy_distance(h_i, h_{i+1}) with h_0 = id,
    /// on the standard quadruple set.
    std::vector<double> cauchy_trace;
    std::vector<StageVerdict> verdicts;

    std::string to_json() const;
};

/// Compose the stage maps in schedule order, recording the proxy distance
/// between successive partial compositions and, per stage, whether the
/// partial composition conjugates the stage subgroup's Schreier generators
/// into the integral group. Evaluator failures rethrow with the stage index.
CompositionState compose_and_trace(const ScheduleResult& schedule,
                                   const ScheduleParams& params = {});

}  // namespace whmap
