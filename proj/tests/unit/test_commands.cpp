#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fwgraph/commands.hpp"
#include "helpers.hpp"

using namespace fwg;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

std::string fixture_path(const std::string& name) { return std::string(FWGRAPH_FIXTURE_DIR) + "/" + name; }

RunConfig fixture_config(const std::string& name) { return load_config(fixture_path(name)); }

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fwgraph_commands_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Relative path -> contents of every file below root.
std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
    }
    return out;
}

struct Result {
    int code;
    std::string out, err;
};

template <class F>
Result capture(F&& f) {
    std::ostringstream out, err;
    const int code = f(out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("validate reports ok or the violations") {
    const Result ok = capture([](auto& o, auto& e) { return run_validate(fixture_config("two_triangles.json"), o, e); });
    CHECK(ok.code == kExitOk);
    CHECK_THAT(ok.out, ContainsSubstring("ok: 6 vertices, 12 edges"));

    const Result jump = capture([](auto& o, auto& e) { return run_validate(fixture_config("pure_jump.json"), o, e); });
    CHECK(jump.code == kExitInvalid);
    CHECK_THAT(jump.out, ContainsSubstring("violation: "));
    CHECK_THAT(jump.out, ContainsSubstring("pure-jump vertex unsupported"));

    const Result norm =
        capture([](auto& o, auto& e) { return run_validate(fixture_config("bad_normalization.json"), o, e); });
    CHECK(norm.code == kExitInvalid);
    CHECK_THAT(norm.out, ContainsSubstring("normalization sum 1.1 differs from 1"));

    CommandOptions missing;
    missing.config = "/nonexistent.json";
    const Result gone = capture([&](auto& o, auto& e) { return cmd_validate(missing, o, e); });
    CHECK(gone.code == kExitInvalid);
    CHECK_THAT(gone.err, ContainsSubstring("invalid: "));
}

TEST_CASE("command-line overrides replace run parameters") {
    RunConfig c = fixture_config("two_vertex.json");
    CommandOptions o;
    o.backend = "direct";
    o.paths = 7;
    o.seed = 99;
    o.epsilon = 0.01;
    o.horizon = 0.5;
    o.out = "elsewhere";
    o.workers = 3;
    apply_overrides(c, o);
    CHECK(c.run.backend == "direct");
    CHECK(c.run.paths == 7);
    CHECK(c.run.seed == 99);
    CHECK(c.run.epsilon == 0.01);
    CHECK(c.run.horizon == 0.5);
    CHECK(c.run.out == "elsewhere");
    CHECK(c.run.workers == 3);

    RunConfig untouched = fixture_config("two_vertex.json");
    apply_overrides(untouched, CommandOptions{});
    CHECK(untouched == fixture_config("two_vertex.json"));

    CommandOptions bad;
    bad.config = fixture_path("two_vertex.json");
    bad.epsilon = 0.9;
    CHECK(capture([&](auto& out, auto& err) { return cmd_validate(bad, out, err); }).code == kExitInvalid);
}

TEST_CASE("simulate writes identical files for any worker count") {
    RunConfig c = fixture_config("two_vertex.json");
    c.run.paths = 40;
    const fs::path one = scratch("one"), many = scratch("many"), again = scratch("again");
    c.run.out = one.string();
    c.run.workers = 1;
    REQUIRE(capture([&](auto& o, auto& e) { return run_simulate(c, o, e); }).code == kExitOk);
    c.run.out = many.string();
    c.run.workers = 8;
    REQUIRE(capture([&](auto& o, auto& e) { return run_simulate(c, o, e); }).code == kExitOk);
    c.run.out = again.string();
    REQUIRE(capture([&](auto& o, auto& e) { return run_simulate(c, o, e); }).code == kExitOk);

    const auto a = tree(one);
    CHECK(a == tree(many));
    CHECK(a == tree(again));
    // 40 paths and a summary per backend, plus the manifest
    CHECK(a.size() == 2 * 41 + 1);
    CHECK(a.count("direct/path_000000.csv") == 1);
    CHECK(a.count("pipeline/path_000039.csv") == 1);

    const auto manifest = nlohmann::json::parse(a.at("manifest.json"));
    REQUIRE(manifest["pairs"].size() == 40);
    CHECK(manifest["pairs"][3]["direct"] == "direct/path_000003.csv");
    CHECK(manifest["pairs"][3]["pipeline"] == "pipeline/path_000003.csv");

    for (const char* backend : {"direct", "pipeline"}) {
        const auto summary = nlohmann::json::parse(a.at(std::string(backend) + "/summary.json"));
        CHECK(summary["backend"] == backend);
        CHECK(summary["paths"] == 40);
        std::size_t kills = 0;
        for (std::size_t i = 0; i < 40; ++i) {
            char name[64];
            std::snprintf(name, sizeof name, "%s/path_%06zu.csv", backend, i);
            const std::string& csv = a.at(name);
            kills += csv.find(",kill,") != std::string::npos;
        }
        CHECK(summary["killed"] == kills);
        CHECK(summary["event_counts"]["kill"] == kills);
        CHECK(summary["event_counts"]["start"] == 40);
    }
    for (const auto& p : {one, many, again}) fs::remove_all(p);
}

TEST_CASE("a zero horizon gives start-only paths") {
    RunConfig c = fixture_config("two_triangles.json");
    c.run.paths = 5;
    c.run.horizon = 0.0;
    c.run.backend = "direct";
    const fs::path dir = scratch("zero");
    c.run.out = dir.string();
    REQUIRE(capture([&](auto& o, auto& e) { return run_simulate(c, o, e); }).code == kExitOk);
    const auto files = tree(dir);
    CHECK(files.count("manifest.json") == 0);
    for (const auto& [name, text] : files) {
        if (name.ends_with(".csv")) CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    }
    const auto summary = nlohmann::json::parse(files.at("direct/summary.json"));
    CHECK(summary["mean_lifetime"] == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("verify passes on the right data and fails on swapped data") {
    RunConfig c = fixture_config("star3.json");
    c.run.paths = 20000;
    const Result ok = capture([&](auto& o, auto& e) { return run_verify(c, o, e); });
    CHECK(ok.code == kExitOk);
    std::istringstream lines(ok.out);
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["pass"] == true);
        CHECK_THAT(ok.err, ContainsSubstring(j["name"].get<std::string>()));
        ++n;
    }
    CHECK(n >= 3);

    RunConfig swapped = fixture_config("star3_swapped.json");
    swapped.run.paths = 20000;
    const Result bad = capture([&](auto& o, auto& e) { return run_verify(swapped, o, e); });
    CHECK(bad.code == kExitFailure);
    CHECK_THAT(bad.out, ContainsSubstring("walsh_frequencies:o"));

    // stdout carries no timings
    CHECK(capture([&](auto& o, auto& e) { return run_verify(c, o, e); }).out == ok.out);
}

TEST_CASE("fw-trace prints every stage and round-trips") {
    for (bool exact : {true, false}) {
        const Result r =
            capture([&](auto& o, auto& e) { return run_fw_trace(fixture_config("two_triangles.json"), exact, o, e); });
        CHECK(r.code == kExitOk);
        const auto doc = nlohmann::json::parse(r.out);
        CHECK(doc["exact"] == exact);
        CHECK(doc["final_equals_input"] == true);
        REQUIRE(doc["stages"].size() == 6);
        CHECK(doc["stages"][0]["label"] == "local_split");
        CHECK(doc["stages"][5]["label"] == "final");
        CHECK(doc["stages"][5]["data"]["v1"]["p4"][0]["vertex"] == "v5");
        if (exact) CHECK(doc["stages"][5]["data"]["v1"]["p4"][0]["weight"] == "2/7");
        if (!exact) CHECK(doc["max_deviation"].get<double>() <= 1e-12);
    }
}

TEST_CASE("decompose lists sides and shadow edges") {
    const Result r = capture([](auto& o, auto& e) {
        return run_decompose(fixture_config("two_triangles.json"), {"v1", "v2", "v3"}, o, e);
    });
    REQUIRE(r.code == kExitOk);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["crossing_edges"] == nlohmann::json({"i4", "i5", "i6", "i7"}));
    CHECK(doc["minus"]["vertices"] == nlohmann::json({"v1", "v2", "v3"}));
    CHECK(doc["plus"]["vertices"] == nlohmann::json({"v4", "v5", "v6"}));
    std::size_t shadows = 0;
    for (const char* side : {"minus", "plus"}) {
        for (const auto& e : doc[side]["edges"]) shadows += e["shadow"].get<bool>();
    }
    CHECK(shadows == 8);

    const Result unknown = capture([](auto& o, auto& e) {
        return run_decompose(fixture_config("two_triangles.json"), {"v9"}, o, e);
    });
    CHECK(unknown.code == kExitInvalid);
    const Result everything = capture([](auto& o, auto& e) {
        return run_decompose(fixture_config("two_vertex.json"), {"a", "b"}, o, e);
    });
    CHECK(everything.code == kExitInvalid);
}
