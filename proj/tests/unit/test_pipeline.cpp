#include <catch_amalgamated.hpp>

#include <cmath>

#include "fwgraph/pipeline.hpp"
#include "fwgraph/statcheck.hpp"
#include "helpers.hpp"

using namespace fwg;
using Catch::Approx;
using testing::vid;

namespace {

struct Tally {
    std::vector<double> times;
    std::map<std::string, std::size_t> categories;
};

Tally tally(const MetricGraph& g, const std::vector<ExitRecord>& rs) {
    Tally t;
    for (const auto& r : rs) {
        t.times.push_back(r.time);
        ++t.categories[category_key(g, r)];
    }
    return t;
}

void same_exit_law(const Model& m, const ProcessGenerator& a, const ProcessGenerator& b, VertexId v, double radius,
                   std::size_t n, const std::string& tag) {
    const Tally ta = tally(*m.graph, sample_first_exits(a, v, radius, 100.0, n, RandomStream(hash_label(tag + ":a")), 1));
    const Tally tb = tally(*m.graph, sample_first_exits(b, v, radius, 100.0, n, RandomStream(hash_label(tag + ":b")), 1));
    const TestReport ks = ks_two_sample(ta.times, tb.times, 0.001);
    const TestReport chi = chi_square_homogeneity(ta.categories, tb.categories, 0.001);
    INFO(tag << ": " << ks.detail << " / " << chi.detail);
    CHECK(ks.pass);
    CHECK(chi.pass);
}

}  // namespace

TEST_CASE("on a reflecting star without atoms the staged process is the direct one") {
    auto g = std::make_shared<MetricGraph>();
    const auto o = g->add_vertex("o");
    const EdgeId a = g->add_external_edge("a", o), b = g->add_external_edge("b", o);
    FWAssignment fw(1);
    fw[0].p2 = {{a, 0.5}, {b, 0.3}};
    fw[0].p3 = 0.2;
    const StagedPipeline pipe = construct_paper_pipeline(g, fw, {}, 0.05);
    CHECK(pipe.c0[0] == Approx(1.0));
    CHECK(pipe.trace.size() == trace_labels().size());
    for (std::size_t i = 0; i < pipe.trace.size(); ++i) CHECK(pipe.trace[i].label == trace_labels()[i]);

    const ProcessGenerator direct = direct_process(g, fw, 0.05);
    RandomStream root(31);
    for (std::uint64_t i = 0; i < 300; ++i) {
        RandomStream x = root.child(i), y = root.child(i);
        const Trajectory d = direct.run(GraphPoint::at_vertex(o), 2.0, x);
        const Trajectory p = pipe.x5.run(GraphPoint::at_vertex(o), 2.0, y);
        CHECK(p == d);
    }
}

TEST_CASE("an elastic star kills through the boxes at the direct rate") {
    auto g = std::make_shared<MetricGraph>();
    const auto o = g->add_vertex("o");
    const EdgeId a = g->add_external_edge("a", o), b = g->add_external_edge("b", o);
    FWAssignment fw(1);
    fw[0].p1 = 0.1;
    fw[0].p2 = {{a, 0.4}, {b, 0.3}};
    fw[0].p3 = 0.2;
    Model m;
    m.graph = g;
    const StagedPipeline pipe = construct_paper_pipeline(g, fw, {}, 0.05);
    same_exit_law(m, direct_process(g, fw, 0.05), pipe.x5, o, 0.3, 5000, "elastic star");
}

TEST_CASE("killing-only vertices kill at the direct rate") {
    const Model m = testing::fixture("two_vertex.json");
    const StagedPipeline pipe = construct_paper_pipeline(m.graph, m.fw, m.delta, 0.05);
    const ProcessGenerator direct = direct_process(m.graph, m.fw, 0.05);
    same_exit_law(m, direct, pipe.x5, vid(0), 0.2, 5000, "two_vertex a");
    same_exit_law(m, direct, pipe.x5, vid(1), 0.2, 5000, "two_vertex b");

    // Killed only through p1: every kill happens at a
    RandomStream root(32);
    for (std::uint64_t i = 0; i < 300; ++i) {
        RandomStream r = root.child(i);
        const Trajectory tr = pipe.x5.run(m.start, 3.0, r);
        CHECK(check_trajectory(*m.graph, tr).ok());
        if (tr.killed()) CHECK(tr.last().position == GraphPoint::at_vertex(vid(0)));
        CHECK(tr.count(EventKind::Revival) == 0);
    }
}

TEST_CASE("staged and direct processes agree on the two-triangle graph") {
    const Model m = testing::fixture("two_triangles.json");
    const StagedPipeline pipe = construct_paper_pipeline(m.graph, m.fw, m.delta, 0.05);
    const ProcessGenerator direct = direct_process(m.graph, m.fw, 0.05);
    for (std::size_t v = 0; v < m.graph->vertex_count(); ++v) {
        const double radius = std::min(0.2, 0.5 * m.graph->min_incident_length(vid(v)));
        same_exit_law(m, direct, pipe.x5, vid(v), radius, 4000, "two_triangles " + m.graph->vertex_name(vid(v)));
    }
}

TEST_CASE("far atoms become revivals") {
    const Model m = testing::fixture("two_triangles.json");
    const StagedPipeline pipe = construct_paper_pipeline(m.graph, m.fw, m.delta, 0.05);
    // v1 jumps to v5 across the split, beyond delta
    CHECK(pipe.splits[0].q1 > 0.0);
    CHECK(pipe.splits[0].far.size() == 1);
    // v2 keeps its atom on i1 local
    CHECK(pipe.splits[1].local.size() == 1);
    CHECK(pipe.splits[1].far.size() == 0);

    RandomStream root(33);
    std::size_t from_v1 = 0;
    for (std::uint64_t i = 0; i < 2000; ++i) {
        RandomStream r = root.child(i);
        const Trajectory tr = pipe.x5.run(GraphPoint::at_vertex(vid(0)), 2.0, r);
        for (const Event& e : tr.events) {
            if (e.kind != EventKind::Revival) continue;
            REQUIRE(e.origin.is_vertex());
            const auto& far = pipe.splits[index(e.origin.vertex())].far;
            CHECK(std::any_of(far.begin(), far.end(), [&](const auto& atom) { return atom.target == e.position; }));
            if (e.origin == GraphPoint::at_vertex(vid(0))) {
                ++from_v1;
                CHECK(e.position == GraphPoint::at_vertex(vid(4)));
            }
        }
    }
    CHECK(from_v1 > 0);
}

TEST_CASE("pipeline parameters are checked") {
    const Model m = testing::fixture("two_triangles.json");
    const double shortest = m.graph->min_incident_length(vid(0));
    std::vector<double> delta = m.delta;
    delta[0] = shortest;
    CHECK_THROWS_AS(construct_paper_pipeline(m.graph, m.fw, delta, 0.05), std::invalid_argument);
    delta[0] = 0.0;
    CHECK_THROWS_AS(construct_paper_pipeline(m.graph, m.fw, delta, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(construct_paper_pipeline(m.graph, m.fw, m.delta, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(construct_paper_pipeline(m.graph, m.fw, {0.1}, 0.05), std::invalid_argument);
    CHECK_NOTHROW(construct_paper_pipeline(m.graph, m.fw, {}, 0.05));
    CHECK(default_deltas(*m.graph)[0] == Approx(0.45 * shortest));
}
