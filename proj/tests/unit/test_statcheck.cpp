#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fwgraph/statcheck.hpp"
#include "helpers.hpp"

using namespace fwg;
using Catch::Approx;
using testing::vid;

namespace {

// Dual series, accurate for small lambda.
double kolmogorov_q_dual(double lambda) {
    const double pi = std::numbers::pi;
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) s += std::exp(-(2.0 * k - 1) * (2.0 * k - 1) * pi * pi / (8.0 * lambda * lambda));
    return 1.0 - std::sqrt(2.0 * pi) / lambda * s;
}

std::vector<double> uniforms(RandomStream& r, std::size_t n, double shift = 0.0) {
    std::vector<double> out(n);
    for (auto& x : out) x = r.uniform() + shift;
    return out;
}

struct Star {
    std::shared_ptr<MetricGraph> graph;
    std::vector<EdgeId> edges;
};

Star star(int legs) {
    Star s{std::make_shared<MetricGraph>(), {}};
    const auto o = s.graph->add_vertex("o");
    for (int i = 0; i < legs; ++i) s.edges.push_back(s.graph->add_external_edge("e" + std::to_string(i + 1), o));
    return s;
}

}  // namespace

TEST_CASE("Kolmogorov tail matches the dual series") {
    for (double l : {0.3, 0.5, 0.8, 1.0, 1.36, 1.63, 2.0}) {
        INFO(l);
        CHECK(kolmogorov_q(l) == Approx(kolmogorov_q_dual(l)).margin(1e-12));
    }
    CHECK(kolmogorov_q(0.0) == 1.0);
    CHECK(kolmogorov_q(1.36) == Approx(0.0494).margin(2e-4));
    CHECK(kolmogorov_q(10.0) == Approx(0.0).margin(1e-30));
}

TEST_CASE("two-sample KS on identical, shifted and null samples") {
    RandomStream r(41);
    const auto a = uniforms(r, 2000);
    const TestReport same = ks_two_sample(a, a, 0.01);
    CHECK(same.statistic == 0.0);
    CHECK(same.pass);
    CHECK(*same.p_value == Approx(1.0));

    const auto b = uniforms(r, 2000, 0.1);
    const TestReport shifted = ks_two_sample(a, b, 0.01);
    CHECK_FALSE(shifted.pass);
    CHECK(shifted.statistic == Approx(0.1).margin(0.03));

    // Disjoint samples: D = 1
    const TestReport apart = ks_two_sample({1, 2, 3}, {4, 5, 6, 7}, 0.01);
    CHECK(apart.statistic == 1.0);
    CHECK(apart.n_a == 3);
    CHECK(apart.n_b == 4);

    int rejected = 0;
    const int trials = 400;
    for (int i = 0; i < trials; ++i) {
        RandomStream s = r.child(i);
        rejected += !ks_two_sample(uniforms(s, 300), uniforms(s, 400), 0.05).pass;
    }
    // nominal 5%, asymptotic p-values are slightly conservative
    CHECK(rejected >= 5);
    CHECK(rejected <= 36);
    CHECK_THROWS_AS(ks_two_sample({}, {1.0}, 0.05), std::invalid_argument);
}

TEST_CASE("chi-square homogeneity on a hand-computed table") {
    // rows (30, 10) and (20, 20): pooled 50/30, expected 25/15 and 25/15
    const std::map<std::string, std::size_t> a{{"x", 30}, {"y", 10}}, b{{"x", 20}, {"y", 20}};
    const double stat = 2 * (25.0 / 25 + 25.0 / 15);
    const TestReport r = chi_square_homogeneity(a, b, 0.01);
    CHECK(r.statistic == Approx(stat));
    CHECK(*r.p_value == Approx(std::erfc(std::sqrt(stat / 2))).epsilon(1e-9));
    CHECK(r.pass);
    CHECK_FALSE(chi_square_homogeneity(a, b, 0.05).pass);

    // a category seen only on one side still counts
    const TestReport one_sided = chi_square_homogeneity({{"x", 50}}, {{"x", 40}, {"z", 10}}, 0.01);
    CHECK_FALSE(one_sided.pass);
    CHECK(chi_square_homogeneity({{"x", 5}}, {{"x", 7}}, 0.01).pass);
}

TEST_CASE("chi-square goodness of fit") {
    const std::map<std::string, std::size_t> obs{{"a", 50}, {"b", 30}, {"c", 20}};
    const TestReport exact = chi_square_goodness_of_fit(obs, {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}}, 0.01);
    CHECK(exact.statistic == Approx(0.0).margin(1e-12));
    CHECK(exact.pass);

    const TestReport off = chi_square_goodness_of_fit(obs, {{"a", 0.3}, {"b", 0.5}, {"c", 0.2}}, 0.01);
    // (50-30)^2/30 + (30-50)^2/50
    CHECK(off.statistic == Approx(400.0 / 30 + 400.0 / 50));
    CHECK(*off.p_value == Approx(std::exp(-off.statistic / 2)).epsilon(1e-9));
    CHECK_FALSE(off.pass);

    const TestReport impossible = chi_square_goodness_of_fit({{"a", 9}, {"z", 1}}, {{"a", 1.0}}, 0.01);
    CHECK_FALSE(impossible.pass);
    CHECK(impossible.statistic == kInfinity);
    CHECK_THROWS_AS(chi_square_goodness_of_fit(obs, {{"a", 0.5}, {"b", 0.3}}, 0.01), std::invalid_argument);
}

TEST_CASE("report lines are stable JSON") {
    TestReport r;
    r.name = "x";
    r.statistic = 1.5;
    r.p_value = 0.25;
    r.pass = true;
    r.n_a = 3;
    r.runtime_s = 12.0;
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["name"] == "x");
    CHECK(j["p_value"] == 0.25);
    CHECK_FALSE(j.contains("runtime_s"));
    r.runtime_s = 99.0;
    CHECK(r.to_json() == j.dump());
}

TEST_CASE("ball exits see jumps out of the ball and ignore jumps inside") {
    const Star s = star(1);
    FWAssignment fw(1);
    fw[0].p2[s.edges[0]] = 0.5;
    const GraphPoint near = GraphPoint::on_edge(s.edges[0], 0.1), far = GraphPoint::on_edge(s.edges[0], 2.0);
    fw[0].p4.add(near, 0.25 / (1 - std::exp(-0.1)));
    fw[0].p4.add(far, 0.25 / (1 - std::exp(-2.0)));
    const ProcessGenerator p = direct_process(s.graph, fw, 0.05);
    const auto records = sample_first_exits(p, vid(0), 0.5, 100.0, 2000, RandomStream(42), 1);
    for (const auto& r : records) {
        if (r.category == ExitRecord::Category::Jump) CHECK(r.target == far);
        if (r.category == ExitRecord::Category::Edge) CHECK(r.target == GraphPoint::on_edge(s.edges[0], 0.5));
        CHECK(r.category != ExitRecord::Category::Kill);
    }
    const auto bs = ball_barriers(*s.graph, vid(0), 0.5);
    REQUIRE(bs.size() == 1);
    CHECK(bs[0].threshold == 0.5);
    CHECK(bs[0].upward);
}

TEST_CASE("exit laws recover the boundary data") {
    SECTION("Walsh star") {
        const Star s = star(3);
        FWAssignment fw(1);
        fw[0].p2 = {{s.edges[0], 0.5}, {s.edges[1], 0.3}, {s.edges[2], 0.2}};
        const auto est = empirical_exit_law(direct_process(s.graph, fw, 0.05), vid(0), 0.05, 40000,
                                            RandomStream(hash_label("walsh recovery")));
        CHECK_FALSE(est.trap);
        CHECK(est.censored == 0);
        for (const auto& [e, w] : fw[0].p2) {
            CHECK(std::abs(est.recovered.p2.at(e) - w) <= 4 * est.edge_freq.at(e).se);
        }
        CHECK(est.kill_freq.value == 0.0);
        // mean exit time eps^2
        CHECK(std::abs(est.mean_time.value - 0.0025) <= 4 * est.mean_time.se);
    }
    SECTION("elastic and sticky") {
        const Star s = star(1);
        FWAssignment fw(1);
        fw[0].p1 = 0.25;
        fw[0].p2[s.edges[0]] = 0.5;
        fw[0].p3 = 0.25;
        const double eps = 0.02;
        const auto est = empirical_exit_law(direct_process(s.graph, fw, eps), vid(0), eps, 40000,
                                            RandomStream(hash_label("elastic recovery")));
        // first order in eps
        CHECK(est.recovered.p1 == Approx(0.25).margin(0.03));
        CHECK(est.recovered.p3 == Approx(0.25).margin(0.03));
        CHECK(est.recovered.p2.at(s.edges[0]) == Approx(0.5).margin(0.03));
        CHECK(normalization_sum(*s.graph, vid(0), est.recovered) == Approx(1.0).margin(1e-12));
    }
    SECTION("trap") {
        const Star s = star(1);
        FWAssignment fw(1);
        fw[0].p3 = 1.0;
        const auto est = empirical_exit_law(direct_process(s.graph, fw, 0.05), vid(0), 0.05, 50, RandomStream(1),
                                            1, 10.0);
        CHECK(est.trap);
        CHECK(est.censored == 50);
    }
}

TEST_CASE("Laplace check passes for diffusion and fails for a wrong interval") {
    auto g = std::make_shared<MetricGraph>();
    const auto a = g->add_vertex("a"), b = g->add_vertex("b");
    const EdgeId e = g->add_internal_edge("e", a, b, 2.0);
    FWAssignment fw(2);
    fw[0].p2[e] = 1.0;
    fw[1].p2[e] = 1.0;
    const ProcessGenerator p = direct_process(g, fw, 0.05);
    const TestReport ok = laplace_exit_check(p, e, 0.5, 1.5, 0.8, 1.0, 20000, RandomStream(43));
    INFO(ok.detail);
    CHECK(ok.pass);
    CHECK(ok.name == "laplace_exit:e:alpha=1");
    CHECK_THROWS_AS(laplace_exit_check(p, e, 0.5, 2.5, 0.8, 1.0, 10, RandomStream(1)), std::invalid_argument);
}

TEST_CASE("generator residual on sticky-elastic and reflecting vertices") {
    const Star s = star(2);
    FWData d;
    d.p1 = 0.2;
    d.p2 = {{s.edges[0], 0.3}, {s.edges[1], 0.3}};
    d.p3 = 0.2;
    auto make = [&](const FWData& data) {
        return [&s, data](double eps) { return direct_process(s.graph, FWAssignment{data}, eps); };
    };
    const std::vector<double> eps{0.1, 0.05};

    TestFunction one;
    for (EdgeId e : s.edges) one.branches[e] = {1.0, 0.0, 0.0};
    one.far_value = 1.0;
    const ResidualReport r1 =
        generator_residual(make(d), *s.graph, d, one, vid(0), eps, 20000, RandomStream(44), 1, false);
    INFO(r1.report.detail);
    REQUIRE(r1.prediction);
    CHECK(*r1.prediction == Approx(-1.0));
    CHECK(r1.report.pass);

    TestFunction linear;
    linear.branches[s.edges[0]] = {0.0, 1.0, 0.0};
    linear.branches[s.edges[1]] = {0.0, -1.0, 0.0};
    const ResidualReport r2 =
        generator_residual(make(d), *s.graph, d, linear, vid(0), eps, 20000, RandomStream(45), 1, false);
    INFO(r2.report.detail);
    REQUIRE(r2.prediction);
    CHECK(*r2.prediction == 0.0);
    CHECK(r2.report.pass);

    // without stickiness a nonzero first-order term makes the residual blow up
    FWData elastic = d;
    elastic.p3 = 0.0;
    elastic.p1 = 0.4;
    const ResidualReport r3 =
        generator_residual(make(elastic), *s.graph, elastic, one, vid(0), eps, 20000, RandomStream(46), 1, false);
    INFO(r3.report.detail);
    CHECK_FALSE(r3.prediction);
    CHECK(r3.report.pass);
    CHECK(r3.points[1].residual.value < r3.points[0].residual.value);

    TestFunction jumpy = one;
    jumpy.branches[s.edges[0]].value = 2.0;
    CHECK_THROWS_AS(generator_residual(make(d), *s.graph, d, jumpy, vid(0), eps, 10, RandomStream(1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(generator_residual(make(d), *s.graph, d, one, vid(0), {0.1}, 10, RandomStream(1)),
                    std::invalid_argument);
}
