#include "whmap/experiments.hpp"

#include "whmap/diskmodel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace whmap {

namespace {

std::string fixed9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9e", v);
    return std::string(buf);
}

Complex apply_half(const MoebiusMap& m, const Complex& z) {
    const double a = m.a.convert_to<double>(), b = m.b.convert_to<double>();
    const double c = m.c.convert_to<double>(), d = m.d.convert_to<double>();
    return (a * z + b) / (c * z + d);
}

/// The sampled point set shared by the sweep and the schedule driver:
/// half-plane i, 1+i, the point above A(1), and two subgroup translates of i.
std::vector<Complex> standard_half_points(const FlipPair& pair) {
    std::vector<Complex> pts = {Complex(0.0, 1.0), Complex(1.0, 1.0)};
    const BoundaryPoint a1 = apply(pair.A, BoundaryPoint(1, 1));
    pts.emplace_back(Rational(a1.num, a1.den).convert_to<double>(), 1.0);
    int used = 0;
    for (const MoebiusMap& g : schreier_generators(pair.group)) {
        if (g.is_identity()) continue;
        pts.push_back(apply_half(g, Complex(0.0, 1.0)));
        if (++used == 2) break;
    }
    return pts;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

std::string cache_key(const MoebiusMap& A, int level) {
    std::ostringstream os;
    os << "table_" << A.a.str() << "_" << A.d.str() << "_N" << level;
    return os.str();
}

Subgroup cached_subgroup(const MoebiusMap& A, int level, const std::string& dir) {
    namespace fs = std::filesystem;
    if (!dir.empty()) {
        const fs::path file = fs::path(dir) / (cache_key(A, level) + ".json");
        if (fs::exists(file)) {
            std::ifstream in(file);
            std::ostringstream buf;
            buf << in.rdbuf();
            return Subgroup::from_json(buf.str());
        }
    }
    Subgroup g = intersect(ga_subgroup(A), congruence_subgroup(level));
    if (!dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        std::ofstream out(std::filesystem::path(dir) / (cache_key(A, level) + ".json"));
        out << g.to_json();
    }
    return g;
}

std::string run_sweep(const SweepConfig& cfg) {
    for (const auto& [p, q] : cfg.lambdas)
        if (p <= q || q <= 0) throw std::invalid_argument("run_sweep: lambda must be > 1");
    for (int n : cfg.levels)
        if (n < 2) throw std::invalid_argument("run_sweep: level must be >= 2");

    std::ostringstream out;
    out << "# seed=" << cfg.seed << " quad_nodes=" << cfg.de.quad_nodes
        << " grid=depth-8-window offsets=2^-k beltrami_sample=5-point-standard-set"
        << " columns: lambda (ratio), level, index (cosets), qs_constant (>=1),"
        << " cr_distortion (log units), deviation (log units), witness (vertex),"
        << " beltrami_diff (|mu| units)\r\n";
    out << "lambda,level,index,qs_constant,cr_distortion,deviation,witness,beltrami_diff,"
           "error\r\n";

    const auto grid = standard_grid();
    const auto quads = standard_quads(cfg.seed);
    const auto dev_samples = standard_deviation_samples();

    for (const auto& [p, q] : cfg.lambdas) {
        for (int level : cfg.levels) {
            const std::string lambda_text = p.str() + "/" + q.str();
            try {
                const MoebiusMap A = MoebiusMap::scaling(p, q);
                const Subgroup group = cached_subgroup(A, level, cfg.cache_dir);
                const FlipPair pair = flip_pair(A, group);
                const VertexEvaluator h = [&pair](const BoundaryPoint& x) {
                    return pair.conjugator(x);
                };

                const Rational m = qs_constant_estimate(h, grid);
                const double cr = crossratio_distortion(h, quads);
                const MoebiusDeviation dev = moebius_deviation(h, dev_samples);

                const BoundaryMap bf =
                    boundary_of(interval_map(pair.f), cfg.de.boundary_delta);
                const BoundaryMap bg =
                    boundary_of(interval_map(pair.g), cfg.de.boundary_delta);
                double mu_diff = 0.0;
                for (const Complex& zh : standard_half_points(pair)) {
                    const Complex z = disk_from_half(zh);
                    if (std::abs(z) > 0.95) continue;  // too close to the circle for stable quadrature
                    const BeltramiSample sf = beltrami_at(bf, z, cfg.de);
                    const BeltramiSample sg = beltrami_at(bg, z, cfg.de);
                    if (!sf.converged || !sg.converged)
                        throw std::runtime_error("extension did not converge");
                    mu_diff = std::max(mu_diff, std::abs(sg.mu - sf.mu));
                }

                out << lambda_text << "," << level << "," << group.index << ","
                    << m.str() << "," << fixed9(cr) << "," << fixed9(dev.deviation) << ","
                    << (dev.witness ? dev.witness->str() : std::string()) << ","
                    << fixed9(mu_diff) << ",\r\n";
            } catch (const std::exception& e) {
                out << lambda_text << "," << level << ",,,,,,," << csv_quote(e.what())
                    << "\r\n";
            }
        }
    }
    return out.str();
}

std::string render_svg(const Tessellation& t, int depth) {
    if (depth < 0 || depth > 12) throw std::invalid_argument("render_svg: depth out of range");

    const auto cmp = [](const Edge& x, const Edge& y) {
        if (!(x.a == y.a)) return lt(x.a, y.a);
        return lt(x.b, y.b);
    };
    std::set<Edge, decltype(cmp)> edges(cmp);
    for (const Triangle& tri : t.enumerate_triangles(depth))
        for (const Edge& e : tri.sides()) edges.insert(e);

    const Edge dist_edge(t.distinguished());
    const MoebiusMap ainv = t.base_map().inverse();
    const auto is_flip_edge = [&](const Edge& e) {
        if (!t.is_moved()) return false;
        const OrientedEdge base(apply(ainv, e.a), apply(ainv, e.b));
        return edge_in_orbit(t.farey_symmetry(), t.flipped_new().oriented(), base).has_value();
    };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.1 -1.1 2.2 2.2\" "
           "width=\"600\" height=\"600\">\n"
        << "<style>.boundary{fill:none;stroke:#000;stroke-width:0.01}"
           ".edge{fill:none;stroke:#3366cc;stroke-width:0.005}"
           ".dist{fill:none;stroke:#cc2222;stroke-width:0.01}"
           ".flip{fill:none;stroke:#22aa55;stroke-width:0.007;stroke-dasharray:0.02 0.01}"
           "</style>\n"
        << "<circle class=\"boundary\" cx=\"0\" cy=\"0\" r=\"1\"/>\n";

    for (const Edge& e : edges) {
        const Complex u = circle_point(e.a);
        const Complex v = circle_point(e.b);
        const char* cls = (e == dist_edge) ? "dist" : (is_flip_edge(e) ? "flip" : "edge");
        char buf[256];
        const double dot = u.real() * v.real() + u.imag() * v.imag();
        if (dot < -1.0 + 1e-12) {
            // Antipodal endpoints: the geodesic is a diameter.
            std::snprintf(buf, sizeof(buf),
                          "<path class=\"%s\" d=\"M %.6f %.6f L %.6f %.6f\"/>\n", cls,
                          u.real(), u.imag(), v.real(), v.imag());
        } else {
            // Circle orthogonal to the unit circle through u, v.
            const Complex c = (u + v) / (1.0 + dot);
            const double r = std::sqrt(std::norm(c) - 1.0);
            const double d =
                std::remainder(std::arg(v - c) - std::arg(u - c), 2.0 * M_PI);
            const int sweep = d > 0 ? 1 : 0;
            std::snprintf(buf, sizeof(buf),
                          "<path class=\"%s\" d=\"M %.6f %.6f A %.6f %.6f 0 0 %d %.6f "
                          "%.6f\"/>\n",
                          cls, u.real(), u.imag(), r, r, sweep, v.real(), v.imag());
        }
        out << buf;
    }
    out << "</svg>\n";
    return out.str();
}

OrbitOutcome run_orbit_report(const OrbitConfig& cfg) {
    const ScheduleResult schedule = build_schedule(cfg.stages, cfg.candidates, cfg.params);
    const CompositionState state = compose_and_trace(schedule, cfg.params);

    nlohmann::json j = nlohmann::json::parse(state.to_json());
    j["complete"] = schedule.complete();
    if (schedule.shortfall) {
        nlohmann::json js;
        js["stage"] = schedule.shortfall->stage;
        js["budget"] = schedule.shortfall->budget;
        js["best_norm"] = schedule.shortfall->best_norm;
        js["note"] = schedule.shortfall->note;
        j["shortfall"] = js;
    }
    OrbitOutcome outcome;
    outcome.json = j.dump(2) + "\n";
    outcome.complete = schedule.complete();
    return outcome;
}

std::string run_profile(const ProfileConfig& cfg) {
    const MoebiusMap A = MoebiusMap::scaling(cfg.lambda.first, cfg.lambda.second);
    const Subgroup group = cached_subgroup(A, cfg.level, cfg.cache_dir);
    const FlipPair pair = flip_pair(A, group);
    const BoundaryMap bf = boundary_of(interval_map(pair.f), cfg.de.boundary_delta);

    std::vector<Complex> points;
    for (double r : cfg.radii)
        for (int k = 0; k < cfg.per_ring; ++k)
            points.push_back(std::polar(r, 2.0 * M_PI * k / cfg.per_ring));
    const std::vector<Complex> orbit =
        orbit_points(group, Complex(0.0, 1.0), cfg.orbit_word_len);

    std::ostringstream out;
    out << "# lambda=" << cfg.lambda.first.str() << "/" << cfg.lambda.second.str()
        << " level=" << cfg.level << " threshold=1/" << cfg.threshold_n
        << " quad_nodes=" << cfg.de.quad_nodes
        << " columns: re,im (disk coords), abs_mu (dilatation magnitude),"
        << " in_level_set (0/1), orbit_distance (hyperbolic), converged (0/1)\r\n";
    out << "re,im,abs_mu,in_level_set,orbit_distance,converged\r\n";
    for (const ProfilePoint& p :
         support_profile(bf, points, cfg.threshold_n, orbit, cfg.de)) {
        out << fixed9(p.z.real()) << "," << fixed9(p.z.imag()) << "," << fixed9(p.abs_mu)
            << "," << (p.in_V ? 1 : 0) << "," << fixed9(p.orbit_distance) << ","
            << (p.converged ? 1 : 0) << "\r\n";
    }
    return out.str();
}

}  // namespace whmap
