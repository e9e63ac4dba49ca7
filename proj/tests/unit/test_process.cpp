#include <catch_amalgamated.hpp>

#include <cmath>

#include "fwgraph/pipeline.hpp"
#include "fwgraph/process.hpp"
#include "fwgraph/statcheck.hpp"
#include "helpers.hpp"

using namespace fwg;
using testing::vid;

namespace {

struct Star {
    std::shared_ptr<MetricGraph> graph;
    EdgeId edge{};
};

Star ray() {
    Star s{std::make_shared<MetricGraph>(), {}};
    const auto o = s.graph->add_vertex("o");
    s.edge = s.graph->add_external_edge("e", o);
    return s;
}

FWAssignment elastic(EdgeId e) {
    FWAssignment fw(1);
    fw[0].p1 = 0.3;
    fw[0].p2[e] = 0.7;
    return fw;
}

bool near_binomial(std::size_t k, std::size_t n, double p) {
    const double f = static_cast<double>(k) / static_cast<double>(n);
    return std::abs(f - p) <= 4.0 * std::sqrt(p * (1 - p) / static_cast<double>(n));
}

const GraphPoint kBox = GraphPoint::aux(vertex_box(vid(0)));

}  // namespace

TEST_CASE("kill_on_set turns jumps into the set into kills at the source") {
    const Star s = ray();
    FWAssignment fw(1);
    fw[0].p2[s.edge] = 0.5;
    fw[0].p4.add(kBox, 0.5);
    const ProcessGenerator p = direct_process(s.graph, fw, 0.05);
    CHECK(p.aux == std::vector<AuxId>{vertex_box(vid(0))});
    const ProcessGenerator k = kill_on_set(p, {kBox}, "k");
    CHECK(k.aux.empty());

    RandomStream root(21);
    for (std::uint64_t i = 0; i < 300; ++i) {
        RandomStream a = root.child(i), b = root.child(i);
        const Trajectory plain = p.run(GraphPoint::at_vertex(vid(0)), 2.0, a);
        const Trajectory killed = k.run(GraphPoint::at_vertex(vid(0)), 2.0, b);
        std::size_t jump = plain.events.size();
        for (std::size_t j = 0; j < plain.events.size(); ++j) {
            if (plain.events[j].kind == EventKind::Jump) {
                jump = j;
                break;
            }
        }
        if (jump == plain.events.size()) {
            CHECK(killed == plain);
            continue;
        }
        REQUIRE(killed.events.size() == jump + 1);
        CHECK(std::equal(killed.events.begin(), killed.events.end() - 1, plain.events.begin()));
        CHECK(killed.last().kind == EventKind::Kill);
        CHECK(killed.last().t == plain.events[jump].t);
        CHECK(killed.last().position == GraphPoint::at_vertex(vid(0)));
    }

    RandomStream r(1);
    const Trajectory at_box = k.run(kBox, 1.0, r);
    REQUIRE(at_box.events.size() == 2);
    CHECK(at_box.killed());
    CHECK(at_box.end_time() == 0.0);
}

TEST_CASE("a fake cemetery followed by killing on it changes nothing") {
    const Star s = ray();
    const ProcessGenerator p = direct_process(s.graph, elastic(s.edge), 0.05);
    const ProcessGenerator attached = attach_fake_cemetery(p, {{vid(0), vertex_box(vid(0))}}, "attach");
    const ProcessGenerator back = kill_on_set(attached, {kBox}, "kill");
    RandomStream root(22);
    std::size_t kills = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        RandomStream a = root.child(i), b = root.child(i), c = root.child(i);
        const Trajectory plain = p.run(GraphPoint::at_vertex(vid(0)), 1.0, a);
        const Trajectory boxed = attached.run(GraphPoint::at_vertex(vid(0)), 1.0, b);
        const Trajectory round = back.run(GraphPoint::at_vertex(vid(0)), 1.0, c);
        CHECK(round == plain);
        CHECK_FALSE(boxed.killed());
        if (plain.killed()) {
            ++kills;
            CHECK(boxed.count(EventKind::Jump) == 1);
            CHECK(boxed.last().position == kBox);
            CHECK(boxed.end_time() == 1.0);
        }
    }
    CHECK(kills > 0);

    RandomStream r(2);
    const Trajectory parked = attached.run(kBox, 0.5, 3.0, r, {});
    CHECK(parked.last().kind == EventKind::Horizon);
    CHECK(parked.last().position == kBox);
    CHECK(parked.count(EventKind::Hold) == 1);
}

TEST_CASE("attach needs a cemetery for every killing vertex") {
    const Star s = ray();
    const ProcessGenerator p = direct_process(s.graph, elastic(s.edge), 0.2);
    const ProcessGenerator attached = attach_fake_cemetery(p, {}, "none");
    RandomStream root(3);
    bool threw = false;
    for (std::uint64_t i = 0; i < 200 && !threw; ++i) {
        RandomStream r = root.child(i);
        try {
            attached.run(GraphPoint::at_vertex(vid(0)), 5.0, r);
        } catch (const std::runtime_error&) {
            threw = true;
        }
    }
    CHECK(threw);
}

TEST_CASE("revival removes every kill and restarts at the kernel target") {
    const Star s = ray();
    const ProcessGenerator p = direct_process(s.graph, elastic(s.edge), 0.05);
    JumpMeasure kernel;
    const GraphPoint target = GraphPoint::on_edge(s.edge, 2.0);
    kernel.add(target, 1.0);
    const ProcessGenerator revived = revive_with_kernel(p, {{vid(0), kernel}}, "revive");
    RandomStream root(23);
    std::size_t revivals = 0;
    for (std::uint64_t i = 0; i < 300; ++i) {
        RandomStream a = root.child(i), b = root.child(i), c = root.child(i);
        const Trajectory plain = p.run(GraphPoint::at_vertex(vid(0)), 3.0, a);
        const Trajectory tr = revived.run(GraphPoint::at_vertex(vid(0)), 3.0, b);
        CHECK(tr == revived.run(GraphPoint::at_vertex(vid(0)), 3.0, c));
        CHECK(tr.count(EventKind::Kill) == 0);
        CHECK(tr.last().kind == EventKind::Horizon);
        CHECK(check_trajectory(*s.graph, tr).ok());
        for (const Event& e : tr.events) {
            if (e.kind != EventKind::Revival) continue;
            ++revivals;
            CHECK(e.position == target);
            CHECK(e.origin == GraphPoint::at_vertex(vid(0)));
        }
        if (plain.killed()) {
            // identical up to the first kill
            REQUIRE(tr.events.size() >= plain.events.size());
            CHECK(std::equal(plain.events.begin(), plain.events.end() - 1, tr.events.begin()));
            CHECK(tr.events[plain.events.size() - 1].kind == EventKind::Revival);
        } else {
            CHECK(tr == plain);
        }
    }
    CHECK(revivals > 0);
    CHECK_THROWS_AS(revive_with_kernel(p, {{vid(0), JumpMeasure{}}}, "empty"), std::invalid_argument);
}

TEST_CASE("gluing two stars reproduces diffusion across the crossing edge") {
    const Model m = testing::fixture("two_vertex.json");
    const std::vector<VertexId> minus{vid(0)};
    const auto dec = decompose(m.graph, minus);
    const ProcessGenerator left =
        direct_process(dec->side(Side::Minus).graph, pull_back(*dec, Side::Minus, m.fw), 0.05, "left");
    const ProcessGenerator right =
        direct_process(dec->side(Side::Plus).graph, pull_back(*dec, Side::Plus, m.fw), 0.05, "right");
    const ProcessGenerator glued = decompose_and_glue(dec, left, right, "glued");
    CHECK_THROWS_AS(decompose_and_glue(dec, direct_process(m.graph, m.fw, 0.05), right, "bad"), std::invalid_argument);

    const EdgeId e = testing::eid(0);
    // Interval (0.1, 0.9) from 0.3: the upper end first with probability 1/4.
    const Barrier stops[] = {{e, 0.1, false}, {e, 0.9, true}};
    RandomStream root(24);
    std::size_t upper = 0;
    const std::size_t n = 20000;
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream r = root.child(i);
        const Trajectory tr = glued.run(GraphPoint::on_edge(e, 0.3), 0.0, 1e3, r, stops);
        REQUIRE(tr.stopped());
        upper += tr.last().position.coordinate() >= 0.9;
    }
    CHECK(near_binomial(upper, n, 0.25));

    // a shadow edge carries the whole crossing edge, so the side changes at the far vertex
    std::size_t crossed = 0;
    for (std::size_t i = 0; i < 200; ++i) {
        RandomStream r = root.child(n + i);
        const Trajectory tr = glued.run(GraphPoint::on_edge(e, 0.3), 3.0, r);
        CHECK(tr.transfers <= tr.count(EventKind::EdgeExit));
        for (const Event& ev : tr.events) {
            if (ev.kind == EventKind::EdgeExit) CHECK(ev.position.is_vertex());
        }
        crossed += tr.transfers > 0;
    }
    CHECK(crossed > 0);
}

TEST_CASE("glued and direct processes have the same exit laws") {
    const Model m = testing::fixture("two_vertex.json");
    const std::vector<VertexId> minus{vid(0)};
    const auto dec = decompose(m.graph, minus);
    const double eps = 0.05;
    const ProcessGenerator glued = decompose_and_glue(
        dec, direct_process(dec->side(Side::Minus).graph, pull_back(*dec, Side::Minus, m.fw), eps),
        direct_process(dec->side(Side::Plus).graph, pull_back(*dec, Side::Plus, m.fw), eps), "glued");
    const ProcessGenerator direct = direct_process(m.graph, m.fw, eps);

    for (std::size_t v : {0u, 1u}) {
        const auto a = sample_first_exits(direct, vid(v), 0.2, 100.0, 5000, RandomStream(hash_label("direct exit")).child(v), 1);
        const auto b = sample_first_exits(glued, vid(v), 0.2, 100.0, 5000, RandomStream(hash_label("glued exit")).child(v), 1);
        std::vector<double> ta, tb;
        std::map<std::string, std::size_t> ca, cb;
        for (const auto& r : a) {
            ta.push_back(r.time);
            ++ca[category_key(*m.graph, r)];
        }
        for (const auto& r : b) {
            tb.push_back(r.time);
            ++cb[category_key(*m.graph, r)];
        }
        const TestReport ks = ks_two_sample(ta, tb, 0.001);
        const TestReport chi = chi_square_homogeneity(ca, cb, 0.001);
        INFO(ks.detail << " / " << chi.detail);
        CHECK(ks.pass);
        CHECK(chi.pass);
    }

    RandomStream root(25);
    for (std::uint64_t i = 0; i < 100; ++i) {
        RandomStream r = root.child(i);
        const Trajectory tr = glued.run(m.start, 3.0, r);
        CHECK(check_trajectory(*m.graph, tr).ok());
        for (const Event& e : tr.events) CHECK_FALSE(e.position.is_aux());
    }
}

TEST_CASE("the staged process keeps the boxes out of the final law") {
    const Model m = testing::fixture("two_triangles.json");
    const StagedPipeline pipe = construct_paper_pipeline(m.graph, m.fw, m.delta, 0.05);
    CHECK(pipe.x1.label == "X1");
    CHECK(pipe.x5.label == "X5");
    CHECK(pipe.x5.aux.empty());
    RandomStream root(26);
    for (std::uint64_t i = 0; i < 200; ++i) {
        RandomStream a = root.child(i), b = root.child(i);
        const Trajectory x4 = pipe.x4.run(m.start, 2.0, a);
        const Trajectory x5 = pipe.x5.run(m.start, 2.0, b);
        for (const Event& e : x4.events) {
            CHECK_FALSE(e.position == GraphPoint::aux(vertex_box(vid(0))));
            CHECK(e.kind != EventKind::Kill);
        }
        CHECK(check_trajectory(*m.graph, x5).ok());
        for (const Event& e : x5.events) CHECK_FALSE(e.position.is_aux());
    }
}
