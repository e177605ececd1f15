#include "whmap/orbitseq.hpp"

#include "whmap/diskmodel.hpp"
#include "whmap/modgroup.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace whmap {

namespace {

Complex apply_half(const MoebiusMap& m, const Complex& z) {
    const Complex a(static_cast<double>(m.a), 0.0), b(static_cast<double>(m.b), 0.0);
    const Complex c(static_cast<double>(m.c), 0.0), d(static_cast<double>(m.d), 0.0);
    return (a * z + b) / (c * z + d);
}

double half_value(const BoundaryPoint& v) {
    if (v.is_infinity()) return std::numeric_limits<double>::infinity();
    return static_cast<double>(Rational(v.num, v.den));
}

/// Half-plane coordinate of the midpoint of a circle arc (lo, hi).
double arc_mid_coordinate(const BoundaryPoint& lo, const BoundaryPoint& hi) {
    const double a = std::arg(circle_point(hi)) + 0.5 * arc_width(lo, hi);
    const Complex mid = std::polar(1.0, a);
    if (std::abs(1.0 - mid) < 1e-14) return std::numeric_limits<double>::infinity();
    return half_from_disk(mid).real();
}

/// Interval oracle of the composition g ∘ f⁻¹: resolve the inner factor to
/// an arc of width < delta, then evaluate the outer factor at its midpoint
/// (exactly, when the inner walk lands on a vertex).
IntervalMap composed_interval(std::shared_ptr<const FlipPair> pair) {
    return [pair](double x, double delta) -> std::pair<BoundaryPoint, BoundaryPoint> {
        auto [lo, hi] = pair->f_inv.eval_interval(x, delta);
        if (lo == hi) {
            // Evaluate exactly only when the vertex is small; a deep walk
            // can land on vertices with huge entries, where the numeric
            // arc is both cheap and accurate enough for the quadrature.
            const Int size = (lo.num < 0 ? -lo.num : lo.num) + lo.den;
            if (boost::multiprecision::msb(size) < 64) {
                BoundaryPoint v = pair->g.eval_vertex(lo);
                return {v, v};
            }
            return pair->g.eval_interval(lo.as_double(), delta);
        }
        const double y = arc_mid_coordinate(lo, hi);
        return pair->g.eval_interval(y, delta);
    };
}

BoundaryPoint random_small_vertex(std::mt19937& rng) {
    std::uniform_int_distribution<int> len_dist(1, 10);
    std::uniform_int_distribution<int> letter(0, 2);
    MoebiusMap m = MoebiusMap::identity();
    const int n = len_dist(rng);
    for (int i = 0; i < n; ++i) {
        switch (letter(rng)) {
            case 0: m = m * MoebiusMap::S(); break;
            case 1: m = m * MoebiusMap::T(); break;
            default: m = m * MoebiusMap::T().inverse(); break;
        }
    }
    return apply(m, BoundaryPoint(0, 1));
}

}  // namespace

double stage_norm(const FlipPair& pair, const ScheduleParams& params) {
    auto shared = std::make_shared<const FlipPair>(pair);
    const BoundaryMap bm = boundary_of(composed_interval(shared), params.de.boundary_delta);

    std::vector<Complex> half_points = {Complex(0.0, 1.0), Complex(1.0, 1.0)};
    const double a1 = half_value(apply(pair.A, BoundaryPoint(1, 1)));
    half_points.emplace_back(a1, 1.0);
    int used = 0;
    for (const MoebiusMap& g : schreier_generators(pair.group)) {
        if (g.is_identity()) continue;
        half_points.push_back(apply_half(g, Complex(0.0, 1.0)));
        if (++used == 2) break;
    }

    double norm = 0.0;
    for (const Complex& zh : half_points) {
        const Complex z = disk_from_half(zh);
        if (std::abs(z) > 0.95) continue;  // too close to the circle for stable quadrature
        BeltramiSample s = beltrami_at(bm, z, params.de);
        if (!s.converged) return std::numeric_limits<double>::infinity();
        norm = std::max(norm, std::abs(s.mu));
    }
    return norm;
}

ScheduleResult build_schedule(int max_stages, const std::vector<StageCandidate>& candidates,
                              const ScheduleParams& params) {
    if (max_stages > 0 && candidates.empty())
        throw std::invalid_argument("build_schedule: no candidates");

    ScheduleResult result;
    std::map<std::pair<std::pair<Int, Int>, int>, std::shared_ptr<FlipPair>> cache;
    std::map<std::pair<std::pair<Int, Int>, int>, double> norm_cache;
    int prev_level = 0;

    for (int stage = 1; stage <= max_stages; ++stage) {
        const double budget = std::ldexp(1.0, -(stage + 1));
        double best_norm = std::numeric_limits<double>::infinity();
        bool accepted = false;

        for (const StageCandidate& cand : candidates) {
            if (cand.level <= prev_level) continue;
            const auto key = std::make_pair(std::make_pair(cand.p, cand.q), cand.level);
            auto it = cache.find(key);
            if (it == cache.end()) {
                auto pair = std::make_shared<FlipPair>(
                    flip_pair(MoebiusMap::scaling(cand.p, cand.q), cand.level));
                it = cache.emplace(key, std::move(pair)).first;
            }
            const FlipPair& pair = *it->second;

            MoebiusDeviation dev = moebius_deviation(
                [&pair](const BoundaryPoint& x) { return pair.conjugator(x); },
                standard_deviation_samples());
            if (!dev.witness.has_value()) continue;

            auto nit = norm_cache.find(key);
            if (nit == norm_cache.end())
                nit = norm_cache.emplace(key, stage_norm(pair, params)).first;
            const double norm = nit->second;
            best_norm = std::min(best_norm, norm);
            if (norm < budget) {
                result.entries.push_back({pair.A, cand.level, norm, budget});
                prev_level = cand.level;
                accepted = true;
                break;
            }
        }

        if (!accepted) {
            ScheduleShortfall s;
            s.stage = stage;
            s.budget = budget;
            s.best_norm = best_norm;
            std::ostringstream os;
            os << "no candidate with level > " << prev_level
               << " met the sampled-norm budget " << budget << " at stage " << stage;
            s.note = os.str();
            result.shortfall = s;
            return result;
        }
    }
    return result;
}

std::optional<MoebiusMap> fit_conjugation(const VertexEvaluator& h, const MoebiusMap& gamma,
                                          unsigned seed) {
    const std::array<BoundaryPoint, 3> base = {BoundaryPoint::infinity(), BoundaryPoint(0, 1),
                                               BoundaryPoint(1, 1)};
    try {
        std::array<BoundaryPoint, 3> s, t;
        for (int i = 0; i < 3; ++i) {
            s[i] = h(base[i]);
            t[i] = h(apply(gamma, base[i]));
        }
        MoebiusMap m = three_point_map(s, t);
        std::mt19937 rng(seed);
        for (int i = 0; i < 20; ++i) {
            BoundaryPoint x = random_small_vertex(rng);
            if (apply(m, h(x)) != h(apply(gamma, x))) return std::nullopt;
        }
        return m;
    } catch (const std::domain_error&) {
        return std::nullopt;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

CompositionState compose_and_trace(const ScheduleResult& schedule,
                                   const ScheduleParams& params) {
    for (size_t i = 0; i < schedule.entries.size(); ++i) {
        const ScheduleEntry& e = schedule.entries[i];
        if (e.measured_norm > e.budget)
            throw std::invalid_argument("compose_and_trace: entry over budget");
        if (i > 0 && (e.budget >= schedule.entries[i - 1].budget ||
                      e.level <= schedule.entries[i - 1].level))
            throw std::invalid_argument(
                "compose_and_trace: budgets must decrease and levels must increase");
    }

    CompositionState state;
    state.entries = schedule.entries;

    auto pairs = std::make_shared<std::vector<FlipPair>>();
    for (const ScheduleEntry& e : schedule.entries)
        pairs->push_back(flip_pair(e.A, e.level));

    auto partial = [pairs](size_t k) -> VertexEvaluator {
        return [pairs, k](const BoundaryPoint& x) {
            BoundaryPoint y = x;
            for (size_t j = 0; j < k; ++j) {
                try {
                    y = (*pairs)[j].conjugator(y);
                } catch (const std::exception& e) {
                    throw std::runtime_error("stage " + std::to_string(j + 1) +
                                             " evaluator failure: " + e.what());
                }
            }
            return y;
        };
    };
    state.composed = partial(pairs->size());

    const auto quads = standard_quads(params.seed);
    for (size_t k = 0; k < pairs->size(); ++k)
        state.cauchy_trace.push_back(teich_proxy_distance(partial(k), partial(k + 1), quads));

    for (size_t k = 1; k <= pairs->size(); ++k) {
        StageVerdict v;
        v.stage = static_cast<int>(k);
        const VertexEvaluator h = partial(k);
        for (const MoebiusMap& g : schreier_generators((*pairs)[k - 1].group)) {
            if (g.is_identity()) continue;
            if (v.generators_checked >= params.max_generators_checked &&
                params.max_generators_checked > 0)
                break;
            auto fit = fit_conjugation(h, g, params.seed + static_cast<unsigned>(k));
            ++v.generators_checked;
            if (!fit.has_value() || !in_psl2z(*fit)) {
                v.conjugates = false;
                break;
            }
        }
        state.verdicts.push_back(v);
    }
    return state;
}

std::string CompositionState::to_json() const {
    nlohmann::json j;
    j["entries"] = nlohmann::json::array();
    for (const ScheduleEntry& e : entries) {
        nlohmann::json je;
        je["p"] = e.A.a.str();
        je["q"] = e.A.d.str();
        je["level"] = e.level;
        je["measured_norm"] = e.measured_norm;
        je["budget"] = e.budget;
        j["entries"].push_back(je);
    }
    j["cauchy_trace"] = cauchy_trace;
    j["verdicts"] = nlohmann::json::array();
    for (const StageVerdict& v : verdicts) {
        nlohmann::json jv;
        jv["stage"] = v.stage;
        jv["conjugates"] = v.conjugates;
        jv["generators_checked"] = v.generators_checked;
        j["verdicts"].push_back(jv);
    }
    return j.dump(2);
}

}  // namespace whmap
