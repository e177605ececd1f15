#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "whmap/experiments.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace whmap;

namespace {

size_t count_occurrences(const std::string& text, const std::string& needle) {
    size_t n = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

std::vector<std::string> data_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(line);
    }
    return rows;
}

std::string golden_path(const std::string& name) {
    return std::string(GOLDEN_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("base tessellation SVG at depth 0 has three arcs") {
    const std::string svg = render_svg(Tessellation::farey(), 0);
    CHECK(count_occurrences(svg, "<path") == 3);
    CHECK(count_occurrences(svg, "<circle") == 1);
    CHECK(count_occurrences(svg, "class=\"dist\"") == 1);
    CHECK(svg.find("class=\"flip\"") == std::string::npos);
}

TEST_CASE("base tessellation SVG at depth 3 has 45 distinct arcs") {
    const std::string svg = render_svg(Tessellation::farey(), 3);
    CHECK(count_occurrences(svg, "<path") == 45);
}

TEST_CASE("moved tessellation SVG styles the flipped orbit distinctly") {
    const Subgroup g = congruence_subgroup(2);
    const Tessellation moved = whitehead_move(
        Tessellation::farey(), g, Edge(BoundaryPoint(1, 1), BoundaryPoint::infinity()));
    const std::string svg = render_svg(moved, 3);
    CHECK(count_occurrences(svg, "class=\"flip\"") >= 1);
    CHECK(count_occurrences(svg, "class=\"dist\"") == 1);
}

TEST_CASE("subgroup cache round-trips through disk") {
    const std::string dir = (std::filesystem::temp_directory_path() / "whmap_cache_test").string();
    std::filesystem::remove_all(dir);
    const MoebiusMap A = MoebiusMap::scaling(2, 1);
    const Subgroup built = cached_subgroup(A, 2, dir);
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / (cache_key(A, 2) + ".json")));
    const Subgroup reloaded = cached_subgroup(A, 2, dir);
    CHECK(built == reloaded);
    CHECK(built == intersect(ga_subgroup(A), congruence_subgroup(2)));
    std::filesystem::remove_all(dir);
}

TEST_CASE("single-row sweep is complete, non-projective, and deterministic") {
    SweepConfig cfg;
    cfg.lambdas = {{Int(2), Int(1)}};
    cfg.levels = {2};
    cfg.de.quad_nodes = 64;
    const std::string csv = run_sweep(cfg);

    const auto rows = data_rows(csv);
    REQUIRE(rows.size() == 2);  // header + one data row
    CHECK(rows[0] ==
          "lambda,level,index,qs_constant,cr_distortion,deviation,witness,beltrami_diff,"
          "error");
    const std::string& row = rows[1];
    CHECK(row.substr(0, 4) == "2/1,");
    CHECK(row.back() == ',');               // empty error column
    CHECK(row.find(",,") == std::string::npos);  // every numeric cell filled

    CHECK(run_sweep(cfg) == csv);
}

TEST_CASE("profile scan reports every grid point") {
    ProfileConfig cfg;
    cfg.radii = {0.3, 0.6};
    cfg.per_ring = 4;
    cfg.de.quad_nodes = 64;
    const std::string csv = run_profile(cfg);
    const auto rows = data_rows(csv);
    REQUIRE(rows.size() == 1 + 8);
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].size() > 10);
        CHECK(rows[i].back() == '1');  // converged
    }
    CHECK(run_profile(cfg) == csv);
}

TEST_CASE("golden outputs are stable") {
    SweepConfig cfg;
    cfg.lambdas = {{Int(2), Int(1)}};
    cfg.levels = {2};
    cfg.de.quad_nodes = 64;
    CHECK(run_sweep(cfg) == read_file(golden_path("sweep_2_1_N2.csv")));

    CHECK(render_svg(Tessellation::farey(), 2) == read_file(golden_path("farey_depth2.svg")));
}
