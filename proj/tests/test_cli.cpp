#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "wnl/cli.hpp"
#include "wnl/store.hpp"

using namespace wnl;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string fresh(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("wnl_test_cli_" + name);
    std::filesystem::remove_all(p);
    return p.string();
}

}  // namespace

TEST_CASE("rhi-check on a power weight passes") {
    auto store = fresh("rhi.jsonl");
    auto r = run({"rhi-check", "--weight", "power:0.75", "--box", "-1,1", "--level", "10", "--store", store});
    CHECK(r.code == 0);
    CHECK(r.out.find("r_w = ") != std::string::npos);
    CHECK(r.out.find("<= 2 (pass)") != std::string::npos);
    auto recs = ResultStore(store).load();
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].command == "rhi-check");
    CHECK(recs[0].payload.at("estimate").get<double>() <= 2.0);
    CHECK(recs[0].params.at("weight") == "power:0.75");
    CHECK(recs[0].params.at("box") == json::array({-1.0, 1.0}));
    CHECK(recs[0].params.at("level") == 10);
}

TEST_CASE("the constant weight has A_2 constant one") {
    auto r = run({"ap-constant", "--weight", "power:0", "--p", "2", "--no-store"});
    CHECK(r.code == 0);
    CHECK(r.out.find("estimate 1.0 ") != std::string::npos);
}

TEST_CASE("the Hilbert sweep reproduces slope two") {
    auto store = fresh("hilbert.jsonl");
    auto r = run({"sharpness-hilbert", "--deltas", "0.25,0.125,0.0625,0.03125,0.015625", "--store", store});
    CHECK(r.code == 0);
    auto recs = ResultStore(store).load();
    REQUIRE(recs.size() == 1);
    double slope = recs[0].payload.at("slope").get<double>();
    CHECK(slope >= 1.9);
    CHECK(slope <= 2.1);
    CHECK(recs[0].payload.at("per_delta").size() == 5);
}

TEST_CASE("a failed slope check exits with 1") {
    auto r = run({"sharpness-hilbert", "--deltas", "0.25,0.125,0.0625,0.03125", "--tolerance", "0.001",
                  "--no-store"});
    CHECK(r.code == 1);
    CHECK(r.out.find("(FAIL)") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
    auto r = run({"frobnicate"});
    CHECK(r.code == 2);
    CHECK(r.err.find("unknown command 'frobnicate'") != std::string::npos);
    CHECK(r.err.find("Subcommands:") != std::string::npos);

    r = run({});
    CHECK(r.code == 2);

    r = run({"ap-constant", "--p", "0.5", "--no-store"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--p") != std::string::npos);

    r = run({"ap-constant", "--weight", "power:abc", "--no-store"});
    CHECK(r.code == 2);
    CHECK(r.err.find("power:abc") != std::string::npos);

    r = run({"ap-constant", "--dim", "2", "--box", "0,1,1", "--no-store"});
    CHECK(r.code == 2);
    CHECK(r.err.find("--box") != std::string::npos);

    r = run({"exp-bmo", "--s", "5", "--no-store"});
    CHECK(r.code == 2);
    CHECK(r.err.find("admissible") != std::string::npos);

    r = run({"sharpness-hilbert", "--deltas", "0.1,0.2,0.05,0.01", "--no-store"});
    CHECK(r.code == 2);
    CHECK(r.err.find("deltas") != std::string::npos);

    r = run({"op-norm", "--dim", "2", "--level", "9", "--op", "riesz:1", "--no-store"});
    CHECK(r.code == 2);
}

TEST_CASE("help lists the function grammar") {
    auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("stepdyadic:seed") != std::string::npos);
    r = run({"growth", "--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("--perturbations") != std::string::npos);
}

TEST_CASE("identical configurations store identical payloads") {
    auto store = fresh("determinism.jsonl");
    std::vector<std::string> args{"jn-check", "--function", "logabs", "--box", "-1,1", "--level", "8", "--store", store};
    CHECK(run(args).code == 0);
    CHECK(run(args).code == 0);
    auto recs = ResultStore(store).load();
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].hash == recs[1].hash);
    CHECK(recs[0].payload.dump() == recs[1].payload.dump());
    CHECK(recs[0].params == recs[1].params);
}

TEST_CASE("config files fill options the command line leaves unset") {
    auto cfg = fresh("config.ini");
    std::ofstream(cfg) << "# sweep settings\nweight = power:-0.5\nlevel = 8\np = 3\nfamily_depth = 6\n";
    auto store = fresh("config.jsonl");
    auto r = run({"ap-constant", "--config", cfg, "--p", "2", "--store", store});
    CHECK(r.code == 0);
    auto recs = ResultStore(store).load();
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].params.at("weight") == "power:-0.5");
    CHECK(recs[0].params.at("level") == 8);
    CHECK(recs[0].params.at("family_depth") == 6);
    CHECK(recs[0].params.at("p") == 2.0);
    // [w]_A2 of x^{-1/2} on [0,1] is 2 * 2/3
    CHECK(recs[0].payload.at("estimate").get<double>() == doctest::Approx(4.0 / 3.0).epsilon(1e-9));

    auto sect = fresh("section.ini");
    std::ofstream(sect) << "[sharpness-hilbert]\ndeltas = 0.25,0.125,0.0625,0.03125\n[growth]\nk = 5\n";
    r = run({"sharpness-hilbert", "--config", sect, "--no-store"});
    CHECK(r.code == 0);
    CHECK(r.out.find(", 4 deltas") != std::string::npos);

    r = run({"ap-constant", "--config", fresh("missing.ini"), "--no-store"});
    CHECK(r.code == 2);
}

TEST_CASE("records can be written as JSON or CSV") {
    auto json_path = fresh("out.json");
    auto csv_path = fresh("out.csv");
    CHECK(run({"bmo-norm", "--no-store", "--output", json_path}).code == 0);
    json j;
    std::ifstream(json_path) >> j;
    CHECK(j.at("kind") == "bmo-norm");
    CHECK(run({"predict-bound", "--a2", "2", "--k", "1", "--no-store", "--format", "csv", "--output", csv_path}).code ==
          0);
    std::ifstream in(csv_path);
    std::string head;
    std::getline(in, head);
    CHECK(head.find("corollary") != std::string::npos);
    CHECK(head.back() == '\r');
    CHECK(run({"bmo-norm", "--no-store", "--format", "xml"}).code == 2);
}

TEST_CASE("the remaining analyzers run from the command line") {
    CHECK(run({"exp-bmo", "--s", "0.1", "--no-store"}).code == 0);
    CHECK(run({"cz-decompose", "--weight", "power:-0.5", "--dim", "2", "--box", "-1,1", "--level", "6", "--no-store"})
              .code == 0);
    auto r = run({"op-norm", "--weight", "power:0.5", "--p", "3", "--level", "6", "--no-store"});
    CHECK(r.code == 0);
    CHECK(r.out.find("Schur ceiling") != std::string::npos);
    r = run({"commutator", "--op", "riesz:2", "--dim", "2", "--box", "-1,1", "--level", "4", "--k", "2", "--no-store"});
    CHECK(r.code == 0);
    CHECK(r.out.find("3 method(s)") != std::string::npos);
    r = run({"predict-bound", "--a2", "16", "--k", "3", "--no-store"});
    CHECK(r.code == 0);
    CHECK(r.out.find("smaller: corollary") != std::string::npos);
}

TEST_CASE("report summarizes growth runs and audits determinism") {
    auto store = fresh("report.jsonl");
    for (const char* k : {"0", "1", "2"})
        run({"growth", "--k", k, "--deltas", "0.25,0.125,0.0625,0.03125", "--store", store});
    run({"growth", "--k", "0", "--deltas", "0.25,0.125,0.0625,0.03125", "--store", store});
    auto dir = fresh("csv");
    auto r = run({"report", "--store", store, "--filter", "growth", "--csv-dir", dir});
    CHECK(r.code == 0);
    for (const char* row : {"| growth | 0 | 2 | ", "| growth | 1 | 2 | ", "| growth | 2 | 2 | "})
        CHECK(r.out.find(row) != std::string::npos);
    CHECK(r.out.find("| 2 | identical |") != std::string::npos);
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / "slopes.csv"));

    auto md = fresh("report.md");
    r = run({"report", "--store", store, "--output", md});
    CHECK(r.code == 0);
    CHECK(std::filesystem::file_size(md) > 0);

    r = run({"report", "--store", store, "--filter", "sharpness-riesz"});
    CHECK(r.code == 1);
    CHECK(r.out.find("no records") != std::string::npos);
}
