#include "whmap/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitInvariant = 4;

std::string default_cache_dir() {
    const char* env = std::getenv("WHMAP_CACHE_DIR");
    return env ? std::string(env) : std::string();
}

std::pair<whmap::Int, whmap::Int> parse_lambda(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return {whmap::Int(text), whmap::Int(1)};
    return {whmap::Int(text.substr(0, slash)), whmap::Int(text.substr(slash + 1))};
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

nlohmann::json load_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return nlohmann::json::parse(in);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace whmap;

    CLI::App app{"Invariant-tessellation flip maps: sweeps, renders, profiles"};
    app.require_subcommand(1);
    std::string config_path, out_path, cache_dir = default_cache_dir();
    app.add_option("--config", config_path, "JSON config file (flags override it)");
    app.add_option("--output", out_path, "Output file ('-' = stdout)");
    app.add_option("--cache-dir", cache_dir,
                   "Coset-table cache directory (default: WHMAP_CACHE_DIR)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Scaling/level sweep table (CSV)");
    std::vector<std::string> lambda_opts;
    std::vector<int> level_opts;
    unsigned seed = 20240701u;
    int quad_nodes = 0;
    sweep->add_option("--lambda", lambda_opts, "Scalings p/q > 1 (repeatable)");
    sweep->add_option("--level", level_opts, "Congruence levels N >= 2 (repeatable)");
    sweep->add_option("--seed", seed, "Sampling seed");
    sweep->add_option("--quad-nodes", quad_nodes, "Quadrature nodes override");

    // render
    auto* render = app.add_subcommand("render", "Tessellation SVG");
    std::string render_lambda = "1";
    int render_depth = 3;
    bool render_moved = false;
    int render_level = 2;
    render->add_option("--lambda", render_lambda, "Scaling p/q (1 = base tessellation)");
    render->add_option("--depth", render_depth, "Triangle closure depth (<= 12)");
    render->add_flag("--moved", render_moved, "Render the flipped tessellation");
    render->add_option("--level", render_level, "Congruence level for --moved");

    // orbit
    auto* orbit = app.add_subcommand("orbit", "Budgeted composition schedule (JSON)");
    int stages = 3;
    std::vector<std::string> cand_opts;
    orbit->add_option("--stages", stages, "Number of stages");
    orbit->add_option("--candidate", cand_opts, "Stage candidate p/q:N (repeatable)");
    orbit->add_option("--seed", seed, "Sampling seed");
    orbit->add_option("--quad-nodes", quad_nodes, "Quadrature nodes override");

    // profile
    auto* profile = app.add_subcommand("profile", "Dilatation support scan (CSV)");
    std::string profile_lambda = "2/1";
    int profile_level = 2, threshold_n = 20;
    profile->add_option("--lambda", profile_lambda, "Scaling p/q > 1");
    profile->add_option("--level", profile_level, "Congruence level N >= 2");
    profile->add_option("--threshold", threshold_n, "Level-set threshold 1/N");
    profile->add_option("--quad-nodes", quad_nodes, "Quadrature nodes override");

    // tables cache
    auto* tables = app.add_subcommand("tables", "Coset-table utilities");
    auto* cache = tables->add_subcommand("cache", "Manage the on-disk table cache");
    bool cache_list = false, cache_clear = false;
    std::string cache_build;
    int cache_level = 2;
    cache->add_flag("--list", cache_list, "List cached tables");
    cache->add_flag("--clear", cache_clear, "Delete cached tables");
    cache->add_option("--build", cache_build, "Build and store the table for scaling p/q");
    cache->add_option("--level", cache_level, "Congruence level for --build");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const nlohmann::json jc = load_config(config_path);
        if (cache_dir.empty() && jc.contains("cache_dir"))
            cache_dir = jc["cache_dir"].get<std::string>();
        if (sweep->count("--seed") == 0 && orbit->count("--seed") == 0 &&
            jc.contains("seed"))
            seed = jc["seed"].get<unsigned>();
        if (quad_nodes == 0 && jc.contains("quad_nodes"))
            quad_nodes = jc["quad_nodes"].get<int>();

        if (*sweep) {
            SweepConfig cfg;
            cfg.seed = seed;
            cfg.cache_dir = cache_dir;
            if (quad_nodes > 0) cfg.de.quad_nodes = quad_nodes;
            if (jc.contains("lambdas") && lambda_opts.empty())
                for (const auto& s : jc["lambdas"]) lambda_opts.push_back(s.get<std::string>());
            if (jc.contains("levels") && level_opts.empty())
                level_opts = jc["levels"].get<std::vector<int>>();
            if (!lambda_opts.empty()) {
                cfg.lambdas.clear();
                for (const auto& s : lambda_opts) cfg.lambdas.push_back(parse_lambda(s));
            }
            if (!level_opts.empty()) cfg.levels = level_opts;
            write_output(out_path, run_sweep(cfg));
            return kExitOk;
        }

        if (*render) {
            const auto [p, q] = parse_lambda(render_lambda);
            Tessellation t = (p == q) ? Tessellation::farey()
                                      : Tessellation::farey_image(MoebiusMap::scaling(p, q));
            if (render_moved) {
                const MoebiusMap A = MoebiusMap::scaling(p, q);
                const Subgroup g = cached_subgroup(A, render_level, cache_dir);
                const Edge seed_edge(apply(A, BoundaryPoint(1, 1)),
                                     apply(A, BoundaryPoint::infinity()));
                t = whitehead_move(t, g, seed_edge);
            }
            write_output(out_path, render_svg(t, render_depth));
            return kExitOk;
        }

        if (*orbit) {
            OrbitConfig cfg;
            cfg.stages = stages;
            cfg.params.seed = seed;
            if (quad_nodes > 0) cfg.params.de.quad_nodes = quad_nodes;
            if (jc.contains("candidates") && cand_opts.empty())
                for (const auto& s : jc["candidates"]) cand_opts.push_back(s.get<std::string>());
            for (const auto& s : cand_opts) {
                const auto colon = s.find(':');
                if (colon == std::string::npos)
                    throw std::invalid_argument("candidate must be p/q:N");
                const auto [p, q] = parse_lambda(s.substr(0, colon));
                cfg.candidates.push_back({p, q, std::stoi(s.substr(colon + 1))});
            }
            if (cfg.candidates.empty())
                cfg.candidates = {{Int(2), Int(1), 2}, {Int(3), Int(2), 3},
                                  {Int(9), Int(8), 4}, {Int(17), Int(16), 5}};
            const OrbitOutcome outcome = run_orbit_report(cfg);
            write_output(out_path, outcome.json);
            return outcome.complete ? kExitOk : kExitNumeric;
        }

        if (*profile) {
            ProfileConfig cfg;
            cfg.lambda = parse_lambda(profile_lambda);
            cfg.level = profile_level;
            cfg.threshold_n = threshold_n;
            cfg.cache_dir = cache_dir;
            if (quad_nodes > 0) cfg.de.quad_nodes = quad_nodes;
            write_output(out_path, run_profile(cfg));
            return kExitOk;
        }

        if (*cache) {
            if (cache_dir.empty())
                throw std::invalid_argument("no cache directory (flag or WHMAP_CACHE_DIR)");
            namespace fs = std::filesystem;
            if (cache_list) {
                if (fs::exists(cache_dir))
                    for (const auto& e : fs::directory_iterator(cache_dir))
                        std::cout << e.path().filename().string() << "\n";
                return kExitOk;
            }
            if (cache_clear) {
                if (fs::exists(cache_dir))
                    for (const auto& e : fs::directory_iterator(cache_dir))
                        fs::remove(e.path());
                return kExitOk;
            }
            if (!cache_build.empty()) {
                const auto [p, q] = parse_lambda(cache_build);
                const Subgroup g =
                    cached_subgroup(MoebiusMap::scaling(p, q), cache_level, cache_dir);
                std::cout << cache_key(MoebiusMap::scaling(p, q), cache_level)
                          << " index=" << g.index << "\n";
                return kExitOk;
            }
            throw std::invalid_argument("tables cache: pass --list, --clear, or --build");
        }
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
