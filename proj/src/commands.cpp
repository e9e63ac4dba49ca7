#include "fwgraph/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fwgraph/decomposition.hpp"
#include "fwgraph/parallel.hpp"
#include "fwgraph/pipeline.hpp"

namespace fwg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kLevel = 0.01;

std::vector<std::string> selected_backends(const std::string& backend) {
    if (backend == "both") return {"direct", "pipeline"};
    return {backend};
}

Model checked_model(const RunConfig& config) {
    ModelCheck check = check_model(config);
    if (!check.report.ok()) {
        std::string message;
        for (const auto& v : check.report.violations) message += (message.empty() ? "" : "; ") + v;
        throw ConfigError(message);
    }
    return std::move(*check.model);
}

ProcessGenerator make_backend(const Model& m, const std::string& backend, double epsilon) {
    if (backend == "direct") return direct_process(m.graph, m.fw, epsilon);
    return construct_paper_pipeline(m.graph, m.fw, m.delta, epsilon).x5;
}

template <class F>
int guarded(std::ostream& err, F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        err << "invalid: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

template <class F>
int with_config(const CommandOptions& options, std::ostream& err, F&& f) {
    return guarded(err, [&] {
        RunConfig config = load_config(options.config);
        apply_overrides(config, options);
        return f(config);
    });
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    os << text;
    if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string path_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "path_%06zu.csv", i);
    return buf;
}

// Exit-law oracle of the epsilon-shell at v, by category key.
std::map<std::string, double> shell_law(const MetricGraph& g, VertexId v, const FWData& d, double epsilon) {
    std::map<std::string, double> law;
    const double p2 = d.reflection();
    const double scale = p2 > 0.0 ? epsilon : 1.0;
    double total = p2 + scale * d.p1;
    for (const auto& a : d.p4) total += scale * a.weight;
    if (total == 0.0) return law;
    for (const Incidence& inc : g.incident(v)) {
        auto it = d.p2.find(inc.edge);
        law["edge:" + g.edge(inc.edge).name] = it == d.p2.end() ? 0.0 : it->second / total;
    }
    law["kill"] = scale * d.p1 / total;
    for (const auto& a : d.p4) law["jump:" + g.describe(a.target)] += scale * a.weight / total;
    return law;
}

TestReport named(TestReport r, std::string name) {
    r.name = std::move(name);
    return r;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace

void apply_overrides(RunConfig& config, const CommandOptions& o) {
    RunParameters& r = config.run;
    if (o.backend) r.backend = *o.backend;
    if (r.backend != "direct" && r.backend != "pipeline" && r.backend != "both") {
        throw ConfigError("field 'run.backend': expected direct, pipeline or both");
    }
    if (o.paths) r.paths = *o.paths;
    if (o.seed) r.seed = *o.seed;
    if (o.epsilon) r.epsilon = *o.epsilon;
    if (o.horizon) r.horizon = *o.horizon;
    if (o.out) r.out = *o.out;
    if (o.workers) r.workers = *o.workers;
}

int cmd_validate(const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return with_config(o, err, [&](const RunConfig& c) { return run_validate(c, out, err); });
}
int cmd_simulate(const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return with_config(o, err, [&](const RunConfig& c) { return run_simulate(c, out, err); });
}
int cmd_verify(const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return with_config(o, err, [&](const RunConfig& c) { return run_verify(c, out, err); });
}
int cmd_fw_trace(const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return with_config(o, err, [&](const RunConfig& c) { return run_fw_trace(c, o.exact_rational, out, err); });
}
int cmd_decompose(const CommandOptions& o, std::ostream& out, std::ostream& err) {
    return with_config(o, err, [&](const RunConfig& c) { return run_decompose(c, o.minus, out, err); });
}

int run_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ModelCheck check = check_model(config);
        if (!check.report.ok()) {
            for (const auto& v : check.report.violations) out << "violation: " << v << "\n";
            return static_cast<int>(kExitInvalid);
        }
        const MetricGraph& g = *check.model->graph;
        out << "ok: " << g.vertex_count() << " vertices, " << g.edge_count() << " edges, epsilon "
            << config.run.epsilon << "\n";
        return static_cast<int>(kExitOk);
    });
}

json trajectory_summary(const std::vector<Trajectory>& paths, const std::string& backend, const RunParameters& run) {
    std::map<std::string, std::size_t> counts;
    for (EventKind k : {EventKind::Start, EventKind::EdgeExit, EventKind::VertexResolution, EventKind::Hold,
                        EventKind::Jump, EventKind::Revival, EventKind::Kill, EventKind::Horizon,
                        EventKind::Barrier}) {
        counts[std::string(to_string(k))] = 0;
    }
    double lifetime = 0.0;
    std::size_t killed = 0, transfers = 0;
    for (const auto& tr : paths) {
        for (const auto& e : tr.events) ++counts[std::string(to_string(e.kind))];
        lifetime += tr.end_time();
        killed += tr.killed() ? 1 : 0;
        transfers += tr.transfers;
    }
    json s;
    s["backend"] = backend;
    s["paths"] = paths.size();
    s["seed"] = run.seed;
    s["epsilon"] = run.epsilon;
    s["horizon"] = run.horizon;
    s["event_counts"] = counts;
    // lifetime is the kill time, or the horizon for surviving paths
    s["mean_lifetime"] = paths.empty() ? 0.0 : lifetime / static_cast<double>(paths.size());
    s["killed"] = killed;
    s["transfers"] = transfers;
    return s;
}

int run_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Model m = checked_model(config);
        const RunParameters& r = config.run;
        const RandomStream root(r.seed);
        const fs::path base(r.out);
        json manifest;
        manifest["seed"] = r.seed;
        manifest["paths"] = r.paths;
        manifest["backends"] = json::array();
        for (const auto& backend : selected_backends(r.backend)) {
            const ProcessGenerator p = make_backend(m, backend, r.epsilon);
            const auto paths = parallel_map<Trajectory>(
                r.paths,
                [&](std::size_t i) {
                    RandomStream s = root.child(i);
                    return p.run(m.start, r.horizon, s);
                },
                r.workers);
            const fs::path dir = base / backend;
            fs::create_directories(dir);
            for (std::size_t i = 0; i < paths.size(); ++i) {
                std::ostringstream os;
                write_csv(os, *m.graph, paths[i]);
                write_file(dir / path_name(i), os.str());
            }
            write_file(dir / "summary.json", trajectory_summary(paths, backend, r).dump(2) + "\n");
            manifest["backends"].push_back({{"backend", backend}, {"directory", backend}});
            out << backend << ": " << paths.size() << " paths written to " << dir.string() << "\n";
        }
        if (r.backend == "both") {
            json pairs = json::array();
            for (std::size_t i = 0; i < r.paths; ++i) {
                pairs.push_back({{"index", i},
                                 {"direct", "direct/" + path_name(i)},
                                 {"pipeline", "pipeline/" + path_name(i)}});
            }
            manifest["pairs"] = pairs;
            write_file(base / "manifest.json", manifest.dump(2) + "\n");
        }
        return static_cast<int>(kExitOk);
    });
}

std::vector<TestReport> verify_reports(const RunConfig& config, const Model& m) {
    const RunParameters& r = config.run;
    const MetricGraph& g = *m.graph;
    const RandomStream root(r.seed);
    const std::size_t n = r.paths;
    auto stream_for = [&](const std::string& name) { return root.child(hash_label(name)); };
    std::vector<TestReport> reports;

    std::map<std::string, ProcessGenerator> backends;
    for (const auto& b : selected_backends(r.backend)) backends.emplace(b, make_backend(m, b, r.epsilon));

    // Epsilon-shell exit laws and mean exit times of the direct scheme.
    std::map<std::string, std::map<std::string, std::size_t>> exit_counts;
    const ProcessGenerator direct =
        backends.count("direct") ? backends.at("direct") : make_backend(m, "direct", r.epsilon);
    for (std::size_t i = 0; i < g.vertex_count(); ++i) {
        const VertexId v{static_cast<std::uint32_t>(i)};
        const std::string& name = g.vertex_name(v);
        const FWData& d = m.fw[i];
        const auto law = shell_law(g, v, d, r.epsilon);
        if (law.empty()) continue;  // trap vertex

        const auto started = std::chrono::steady_clock::now();
        const auto records = sample_first_exits(direct, v, r.epsilon, 100.0, n, stream_for("exit_law:" + name), r.workers);
        std::map<std::string, std::size_t> counts;
        double sum = 0.0, sum2 = 0.0;
        for (const auto& rec : records) {
            ++counts[category_key(g, rec)];
            sum += rec.time;
            sum2 += rec.time * rec.time;
        }
        TestReport fit = named(chi_square_goodness_of_fit(counts, law, kLevel), "exit_law:" + name);
        fit.runtime_s = seconds_since(started);
        reports.push_back(fit);

        const double p2 = d.reflection();
        if (p2 > 0.0) {
            const double mean = sum / static_cast<double>(n);
            const double se = std::sqrt(std::max(sum2 / static_cast<double>(n) - mean * mean, 0.0) / static_cast<double>(n));
            const double target = r.epsilon * r.epsilon + r.epsilon * d.p3 / p2;
            TestReport t;
            t.name = "mean_exit_time:" + name;
            t.statistic = se > 0.0 ? (mean - target) / se : (mean == target ? 0.0 : kInfinity);
            t.pass = std::abs(t.statistic) <= 3.0;
            t.n_a = n;
            std::ostringstream os;
            os << std::setprecision(6) << "mean " << mean << " +- " << se << " vs " << target;
            t.detail = os.str();
            t.runtime_s = 0.0;
            reports.push_back(t);
        }

        exit_counts[name] = std::move(counts);
    }

    // Expected first-edge frequencies supplied with the configuration.
    if (config.expect.contains("walsh")) {
        for (const auto& w : config.expect.at("walsh")) {
            const std::string name = w.at("vertex").get<std::string>();
            const double tol = w.value("tolerance", 0.01);
            TestReport t;
            t.name = "walsh_frequencies:" + name;
            t.n_a = n;
            auto it = exit_counts.find(name);
            if (it == exit_counts.end()) throw ConfigError("field 'expect.walsh': no exit law for vertex '" + name + "'");
            double worst = 0.0;
            std::ostringstream os;
            os << std::setprecision(4);
            for (const auto& [edge, freq] : w.at("frequencies").items()) {
                auto f = it->second.find("edge:" + edge);
                const double got = f == it->second.end() ? 0.0 : static_cast<double>(f->second) / static_cast<double>(n);
                worst = std::max(worst, std::abs(got - freq.get<double>()));
                os << edge << " " << got << "/" << freq.get<double>() << " ";
            }
            t.statistic = worst;
            t.pass = worst <= tol;
            os << "max deviation " << worst << " tolerance " << tol;
            t.detail = os.str();
            reports.push_back(t);
        }
    }

    // Laplace functionals on an interior sub-interval of every internal edge.
    for (const auto& [backend, p] : backends) {
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            const EdgeId id{static_cast<std::uint32_t>(e)};
            const Edge& ed = g.edge(id);
            if (!ed.internal()) continue;
            for (double alpha : r.alpha) {
                std::ostringstream name;
                name << "laplace:" << ed.name << ":" << backend << ":alpha=" << alpha;
                const double R = ed.length;
                reports.push_back(named(laplace_exit_check(p, id, 0.25 * R, 0.75 * R, 0.4 * R, alpha, n,
                                                           stream_for(name.str()), r.workers),
                                        name.str()));
            }
        }
    }

    // Direct against pipeline on first exits from balls around vertices.
    if (backends.size() == 2) {
        for (std::size_t i = 0; i < g.vertex_count(); ++i) {
            const VertexId v{static_cast<std::uint32_t>(i)};
            const std::string& name = g.vertex_name(v);
            const double radius = std::min(0.2, 0.5 * g.min_incident_length(v));
            const auto started = std::chrono::steady_clock::now();
            const RandomStream sa = stream_for("equivalence:direct:" + name);
            const RandomStream sb = stream_for("equivalence:pipeline:" + name);
            const auto a = sample_first_exits(backends.at("direct"), v, radius, 100.0, n, sa, r.workers);
            const auto b = sample_first_exits(backends.at("pipeline"), v, radius, 100.0, n, sb, r.workers);
            std::vector<double> ta, tb;
            std::map<std::string, std::size_t> ca, cb;
            for (const auto& x : a) {
                if (x.category != ExitRecord::Category::Horizon) ta.push_back(x.time);
                ++ca[category_key(g, x)];
            }
            for (const auto& x : b) {
                if (x.category != ExitRecord::Category::Horizon) tb.push_back(x.time);
                ++cb[category_key(g, x)];
            }
            if (!ta.empty() && !tb.empty()) {
                TestReport ks = named(ks_two_sample(ta, tb, kLevel), "ks_exit_time:" + name);
                ks.runtime_s = seconds_since(started);
                reports.push_back(ks);
            }
            reports.push_back(named(chi_square_homogeneity(ca, cb, kLevel), "chi_square_exit:" + name));
        }
    }
    return reports;
}

std::string format_table(const std::vector<TestReport>& reports) {
    std::ostringstream os;
    std::size_t width = 4;
    for (const auto& r : reports) width = std::max(width, r.name.size());
    os << std::left << std::setw(static_cast<int>(width)) << "test"
       << "  result  statistic     p-value    runtime_s  detail\n";
    for (const auto& r : reports) {
        os << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << std::setw(6)
           << (r.pass ? "pass" : "FAIL") << "  " << std::setw(12) << std::setprecision(5) << r.statistic << "  "
           << std::setw(9);
        if (r.p_value) {
            os << std::setprecision(4) << *r.p_value;
        } else {
            os << "-";
        }
        os << "  " << std::setw(9) << std::fixed << std::setprecision(3) << r.runtime_s << std::defaultfloat << "  "
           << r.detail << "\n";
    }
    std::size_t failed = 0;
    for (const auto& r : reports) failed += r.pass ? 0 : 1;
    os << reports.size() - failed << " passed, " << failed << " failed\n";
    return os.str();
}

int run_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Model m = checked_model(config);
        const auto reports = verify_reports(config, m);
        bool ok = true;
        for (const auto& r : reports) {
            out << r.to_json() << "\n";
            ok = ok && r.pass;
        }
        err << format_table(reports);
        return static_cast<int>(ok ? kExitOk : kExitFailure);
    });
}

namespace {

template <class W>
json trace_json(const MetricGraph& g, const std::vector<TraceStage<W>>& trace) {
    json stages = json::array();
    for (const auto& stage : trace) {
        json s;
        s["label"] = stage.label;
        s["normalizer"] = json::object();
        s["data"] = json::object();
        for (std::size_t i = 0; i < stage.data.size(); ++i) {
            const std::string& name = g.vertex_name(VertexId{static_cast<std::uint32_t>(i)});
            s["data"][name] = fw_json(g, stage.data[i]);
            if (i < stage.normalizer.size()) s["normalizer"][name] = stage.normalizer[i];
        }
        stages.push_back(std::move(s));
    }
    return stages;
}

double max_deviation(const FWData& a, const FWData& b) {
    double worst = std::abs(a.p1 - b.p1);
    worst = std::max(worst, std::abs(a.p3 - b.p3));
    std::map<EdgeId, double> p2 = a.p2;
    for (const auto& [e, w] : b.p2) p2[e] -= w;
    for (const auto& [e, w] : p2) worst = std::max(worst, std::abs(w));
    std::map<GraphPoint, double> p4;
    for (const auto& x : a.p4) p4[x.target] += x.weight;
    for (const auto& x : b.p4) p4[x.target] -= x.weight;
    for (const auto& [t, w] : p4) worst = std::max(worst, std::abs(w));
    return worst;
}

}  // namespace

int run_fw_trace(const RunConfig& config, bool exact, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Model m = checked_model(config);
        json doc;
        doc["exact"] = exact;
        doc["labels"] = trace_labels();
        bool equal = false;
        if (exact) {
            const auto trace = pipeline_trace<Rational>(m.graph, m.exact, m.delta);
            doc["stages"] = trace_json(*m.graph, trace);
            equal = trace.back().data == m.exact;
        } else {
            const auto trace = pipeline_trace<double>(m.graph, m.fw, m.delta);
            doc["stages"] = trace_json(*m.graph, trace);
            double worst = 0.0;
            for (std::size_t i = 0; i < m.fw.size(); ++i) worst = std::max(worst, max_deviation(trace.back().data[i], m.fw[i]));
            doc["max_deviation"] = worst;
            equal = worst <= 1e-12;
        }
        doc["final_equals_input"] = equal;
        out << doc.dump(2) << "\n";
        if (!equal) err << "final stage differs from the input assignment\n";
        return static_cast<int>(equal ? kExitOk : kExitFailure);
    });
}

int run_decompose(const RunConfig& config, const std::vector<std::string>& minus_names, std::ostream& out,
                  std::ostream& err) {
    return guarded(err, [&] {
        const Model m = checked_model(config);
        const MetricGraph& g = *m.graph;
        std::vector<VertexId> minus;
        if (minus_names.empty()) {
            for (std::size_t i = 0; i + 1 < g.vertex_count(); ++i) minus.push_back(VertexId{static_cast<std::uint32_t>(i)});
        } else {
            for (const auto& name : minus_names) {
                auto v = g.find_vertex(name);
                if (!v) throw ConfigError("--minus names undeclared vertex '" + name + "'");
                minus.push_back(*v);
            }
        }
        std::shared_ptr<const SubgraphDecomposition> dec;
        try {
            dec = decompose(m.graph, minus);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("--minus: ") + e.what());
        }
        auto names = [&](const std::vector<EdgeId>& ids) {
            json a = json::array();
            for (EdgeId e : ids) a.push_back(g.edge(e).name);
            return a;
        };
        json doc;
        doc["crossing_edges"] = names(dec->all_crossing_edges());
        for (Side s : {Side::Minus, Side::Plus}) {
            const SubgraphSide& side = dec->side(s);
            const MetricGraph& sg = *side.graph;
            json j;
            j["vertices"] = json::array();
            for (std::size_t i = 0; i < sg.vertex_count(); ++i) {
                j["vertices"].push_back(sg.vertex_name(VertexId{static_cast<std::uint32_t>(i)}));
            }
            j["internal_edges"] = names(dec->internal_edges(s));
            j["external_edges"] = names(dec->external_edges(s));
            j["crossing_edges"] = names(dec->crossing_edges(s));
            j["edges"] = json::array();
            for (std::size_t i = 0; i < sg.edge_count(); ++i) {
                const Edge& e = sg.edge(EdgeId{static_cast<std::uint32_t>(i)});
                const EdgeOrigin& o = side.edge_to_parent[i];
                json x;
                x["name"] = e.name;
                x["parent"] = g.edge(o.parent).name;
                x["from"] = sg.vertex_name(e.from);
                if (e.to) {
                    x["to"] = sg.vertex_name(*e.to);
                    x["length"] = e.length;
                }
                x["shadow"] = o.shadow;
                if (o.shadow) {
                    x["reversed"] = o.reversed;
                    x["shadow_length"] = o.shadow_length;
                }
                j["edges"].push_back(std::move(x));
            }
            doc[s == Side::Minus ? "minus" : "plus"] = std::move(j);
        }
        out << doc.dump(2) << "\n";
        return static_cast<int>(kExitOk);
    });
}

}  // namespace fwg
