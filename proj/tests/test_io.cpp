#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "wnl/error.hpp"
#include "wnl/experiments.hpp"
#include "wnl/function_spec.hpp"
#include "wnl/json_io.hpp"
#include "wnl/report.hpp"
#include "wnl/store.hpp"

using namespace wnl;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("wnl_test_io_" + name);
    std::filesystem::remove(p);
    return p.string();
}

void require_same_values(const GridFunction& a, const GridFunction& b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

}  // namespace

TEST_CASE("grids round-trip through JSON") {
    auto u = make_uniform_grid(make_box(std::vector<double>{-1.0, 0.0}, std::vector<double>{1.0, 0.5}), 4);
    auto u2 = grid_from_json(json::parse(grid_to_json(*u).dump()));
    CHECK(*u2 == *u);
    auto g = make_graded_grid(cube(1, 0.0, 1.0), 0.0, 0.5, 30, 3);
    auto g2 = grid_from_json(json::parse(grid_to_json(*g).dump()));
    CHECK(*g2 == *g);
    json bad = grid_to_json(*g);
    bad["dimension"] = 2;
    CHECK_THROWS_AS(grid_from_json(bad), UsageError);
    bad = grid_to_json(*g);
    bad["mesh"]["kind"] = "spiral";
    CHECK_THROWS_AS(grid_from_json(bad), UsageError);
}

TEST_CASE("providers round-trip and re-evaluate bit-exactly") {
    auto grid = make_uniform_grid(cube(2, -1.0, 1.0), 3);
    std::vector<Provider> ps{Provider::constant(2.5),
                             Provider::power(-0.75, 3.0),
                             Provider::log_abs(2.0, -1.0),
                             Provider::indicator(cube(2, 0.0, 0.5)),
                             Provider::restricted(Provider::power(0.5), cube(2, -0.5, 0.5)),
                             Provider::product({Provider::power(0.5), Provider::log_abs()}),
                             Provider::exp_scaled(0.25, LogAbsFamily{1.5, 0.0})};
    std::set<std::string> names;
    for (const auto& p : ps) {
        json j = json::parse(provider_to_json(p).dump());
        names.insert(j.at("family").get<std::string>());
        Provider back = provider_from_json(j);
        CHECK(back.name() == p.name());
        require_same_values(GridFunction(grid, back), GridFunction(grid, p));
    }
    CHECK(names.size() == ps.size());
    CHECK_THROWS_AS(provider_from_json(json{{"family", "gaussian"}, {"params", json::object()}}), UsageError);
    CHECK_THROWS_AS(provider_from_json(json{{"family", "power"}, {"params", {{"coef", 1.0}}}}), UsageError);
}

TEST_CASE("grid functions round-trip with and without a provider") {
    auto grid = make_graded_grid(cube(1, 0.0, 1.0), 0.0, 0.5, 40, 2);
    GridFunction f(grid, Provider::power(-0.9));
    json j = function_to_json(f);
    CHECK(j.at("cells").size() == grid->size());
    CHECK(j.at("provider").at("family") == "power");
    require_same_values(function_from_json(json::parse(j.dump())), f);

    GridFunction s = f.sampled().map([](double v) { return std::sqrt(v) + 1.0 / 3.0; });
    json js = json::parse(function_to_json(s).dump());
    CHECK(js.at("provider").is_null());
    require_same_values(function_from_json(js), s);

    js["cells"].erase(js["cells"].begin());
    CHECK_THROWS_AS(function_from_json(js), UsageError);
}

TEST_CASE("reports carry the common field set") {
    auto grid = make_uniform_grid(cube(1, 0.0, 1.0), 6);
    GridFunction w(grid, Provider::power(-0.5));
    auto fam = CubeFamily::standard(grid->box(), 6, 0);
    json r = to_json(ap_constant(w, 2.0, fam));
    for (const char* key : {"kind", "params", "estimate", "ceiling", "extremal_cube", "family", "pass"})
        CHECK(r.contains(key));
    CHECK(r.at("kind") == "ap-constant");
    CHECK(r.at("ceiling").is_null());
    Box q = box_from_json(r.at("extremal_cube"));
    CHECK(q.dim == 1);
    CubeFamily fam2 = family_from_json(json::parse(family_to_json(fam).dump()));
    CHECK(fam2 == fam);
}

TEST_CASE("contour configurations round-trip") {
    ContourConfig c = radius_rule(2, 3.5, 0.7, 3, 128);
    ContourConfig d = contour_config_from_json(json::parse(to_json(c).dump()));
    CHECK(d.radius == c.radius);
    CHECK(d.nodes == 128);
    CHECK(d.order == 3);
    CHECK(d.r_prime == c.r_prime);
    CHECK(d.from_rule == c.from_rule);
    CHECK(d.dim == 2);
    CHECK(d.a2 == 3.5);
    CHECK(d.bmo == 0.7);
}

TEST_CASE("function specs build the documented functions") {
    auto grid = make_uniform_grid(cube(1, -1.0, 1.0), 5);
    require_same_values(make_function("power:0.5", grid), GridFunction(grid, Provider::power(0.5)));
    require_same_values(make_function("logabs", grid), GridFunction(grid, Provider::log_abs()));
    require_same_values(make_function("logabs:2", grid), GridFunction(grid, Provider::log_abs(2.0)));
    require_same_values(make_function("const:3", grid), GridFunction::constant(grid, 3.0));
    auto ind = make_function("indicator:0,0.5", grid);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        double x = grid->midpoint(i)[0];
        CHECK(ind[i] == (x > 0.0 && x < 0.5 ? 1.0 : 0.0));
    }
    auto e = make_function("expbmo:0.25", grid);
    GridFunction pw(grid, Provider::power(0.25));
    for (std::size_t i = 0; i < grid->size(); ++i) CHECK(e[i] == doctest::Approx(pw[i]).epsilon(1e-12));

    for (const char* bad : {"power", "power:x", "power:1,2", "indicator:1,0", "stepdyadic:-1", "gauss:1", "const:inf"})
        CHECK_THROWS_AS(make_function(bad, grid), UsageError);
}

TEST_CASE("dyadic step weights are seeded powers of two") {
    auto grid = make_uniform_grid(cube(2, 0.0, 1.0), 5);
    auto a = dyadic_step_weight(grid, 7);
    auto b = make_function("stepdyadic:7", grid);
    require_same_values(a, b);
    std::set<double> seen;
    for (std::size_t i = 0; i < a.size(); ++i) {
        int e = 0;
        double m = std::frexp(a[i], &e);
        CHECK(m == 0.5);
        CHECK(e - 1 >= -3);
        CHECK(e - 1 <= 3);
        seen.insert(a[i]);
    }
    CHECK(seen.size() == 7);
    auto c = dyadic_step_weight(grid, 8);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i] != c[i];
    CHECK(differs);
}

TEST_CASE("FNV-1a matches the reference vectors") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
    CHECK(params_hash(json{{"b", 1}, {"a", 2.5}}) == params_hash(json::parse(R"({"a":2.5,"b":1})")));
    CHECK(params_hash(json{{"a", 1}}) != params_hash(json{{"a", 2}}));
    CHECK(params_hash(json{{"a", 1}}).size() == 16);
}

TEST_CASE("result store appends and reloads records") {
    ResultStore store(temp_path("store.jsonl"));
    CHECK(store.load().empty());
    json params{{"p", 2.0}, {"weight", "power:0"}};
    json payload{{"estimate", 1.0 / 3.0}, {"pass", true}};
    auto r1 = store.append("ap-constant", params, payload);
    store.append("bmo-norm", json{{"function", "logabs"}}, json{{"estimate", 0.1}});
    auto r3 = store.append("ap-constant", params, payload);
    auto all = store.load();
    REQUIRE(all.size() == 3);
    CHECK(all[0].payload == payload);
    CHECK(all[0].payload.at("estimate").get<double>() == 1.0 / 3.0);
    CHECK(all[0].hash == r1.hash);
    CHECK(r1.hash == r3.hash);
    CHECK(all[0].payload.dump() == all[2].payload.dump());
    CHECK(store.find("ap-constant").size() == 2);
    CHECK(store.find("", r1.hash).size() == 2);
    CHECK(store.find("bmo-norm", r1.hash).empty());
    CHECK(all[1].timestamp.size() == 20);

    std::ofstream(store.path(), std::ios::app) << "\n{not json\n";
    CHECK_THROWS_WITH_AS(store.load(), doctest::Contains("line 5"), UsageError);
}

TEST_CASE("reports tabulate stored experiments") {
    ExperimentParams p;
    p.deltas = {0.25, 0.125, 0.0625, 0.03125};
    json rec = record_to_json(hilbert_sharpness(p));
    std::vector<StoredRecord> records;
    auto add = [&](const std::string& cmd, const json& params, const json& payload) {
        records.push_back({cmd, params_hash(params), params, payload, "2026-01-01T00:00:00Z"});
    };
    add("sharpness-hilbert", params_to_json(p), rec);
    add("sharpness-hilbert", params_to_json(p), rec);
    add("rhi-check", json{{"weight", "power:0.5"}},
        report_json("rhi-check", json::object(), 1.25, 2.0, std::nullopt, "fam", true));

    auto none = build_report(records, "growth");
    CHECK(none.records == 0);
    CHECK(none.csv_files.empty());

    auto b = build_report(records, "sharpness-hilbert");
    CHECK(b.records == 2);
    CHECK(b.markdown.find("| δ | [w] estimate | ratio | margin |") != std::string::npos);
    CHECK(b.markdown.find("| 0.03125 |") != std::string::npos);
    CHECK(b.markdown.find("slope ") != std::string::npos);
    CHECK(b.markdown.find("| sharpness-hilbert | " + records[0].hash + " | 2 | identical |") != std::string::npos);
    CHECK(b.markdown.find("rhi-check") == std::string::npos);
    REQUIRE(b.csv_files.size() == 3);
    CHECK(b.csv_files.back().first == "slopes.csv");
    CHECK(b.csv_files[0].second == b.csv_files[1].second);
    CHECK(b.csv_files[0].second.find("\r\n") != std::string::npos);

    auto all = build_report(records, "");
    CHECK(all.records == 3);
    CHECK(all.markdown.find("| rhi-check | ") != std::string::npos);
    CHECK(all.markdown.find("| 1.25 | 2 | pass |") != std::string::npos);

    records[1].payload["slope"] = 9.0;
    auto diff = build_report(records, "sharpness-hilbert");
    CHECK(diff.markdown.find("| DIFFER |") != std::string::npos);
}
