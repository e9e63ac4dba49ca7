#include "fwgraph/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fwgraph/pipeline.hpp"
#include "fwgraph/sampler.hpp"

namespace fwg {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw ConfigError("field '" + field + "': " + message);
}

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) fail(path.empty() ? std::string(key) : path + "." + key, "missing");
    return obj.at(key);
}

std::string as_string(const json& j, const std::string& field) {
    if (!j.is_string()) fail(field, "expected a string");
    return j.get<std::string>();
}

double as_number(const json& j, const std::string& field) {
    if (!j.is_number()) fail(field, "expected a number");
    return j.get<double>();
}

double as_length(const json& j, const std::string& field) {
    if (j.is_string() && (j == "inf" || j == "infinity")) return kInfinity;
    return as_number(j, field);
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    return as_string(obj.at(key), path + "." + key);
}

GraphDocument parse_graph(const json& j) {
    if (!j.is_object()) fail("graph", "expected an object");
    GraphDocument g;
    const json& vs = require(j, "vertices", "graph");
    if (!vs.is_array()) fail("graph.vertices", "expected an array");
    for (std::size_t i = 0; i < vs.size(); ++i) g.vertices.push_back(as_string(vs[i], "graph.vertices[" + std::to_string(i) + "]"));

    if (j.contains("internal_edges")) {
        const json& es = j.at("internal_edges");
        if (!es.is_array()) fail("graph.internal_edges", "expected an array");
        for (std::size_t i = 0; i < es.size(); ++i) {
            const std::string f = "graph.internal_edges[" + std::to_string(i) + "]";
            const json& e = es[i];
            if (e.is_array()) {
                if (e.size() != 4) fail(f, "expected [id, from, to, length]");
                g.internal_edges.push_back({as_string(e[0], f + "[0]"), as_string(e[1], f + "[1]"),
                                            as_string(e[2], f + "[2]"), as_length(e[3], f + "[3]")});
            } else if (e.is_object()) {
                g.internal_edges.push_back({as_string(require(e, "id", f), f + ".id"),
                                            as_string(require(e, "from", f), f + ".from"),
                                            as_string(require(e, "to", f), f + ".to"),
                                            as_length(require(e, "length", f), f + ".length")});
            } else {
                fail(f, "expected [id, from, to, length]");
            }
        }
    }
    if (j.contains("external_edges")) {
        const json& es = j.at("external_edges");
        if (!es.is_array()) fail("graph.external_edges", "expected an array");
        for (std::size_t i = 0; i < es.size(); ++i) {
            const std::string f = "graph.external_edges[" + std::to_string(i) + "]";
            const json& e = es[i];
            if (e.is_array()) {
                if (e.size() != 2) fail(f, "expected [id, from]");
                g.external_edges.push_back({as_string(e[0], f + "[0]"), as_string(e[1], f + "[1]")});
            } else if (e.is_object()) {
                g.external_edges.push_back(
                    {as_string(require(e, "id", f), f + ".id"), as_string(require(e, "from", f), f + ".from")});
            } else {
                fail(f, "expected [id, from]");
            }
        }
    }
    return g;
}

BoundaryDocument parse_boundary(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    BoundaryDocument b;
    if (j.contains("p1")) b.p1 = weight_from_json(j.at("p1"), path + ".p1");
    if (j.contains("p3")) b.p3 = weight_from_json(j.at("p3"), path + ".p3");
    if (j.contains("p2")) {
        const json& p2 = j.at("p2");
        if (!p2.is_object()) fail(path + ".p2", "expected an object of edge weights");
        for (const auto& [k, w] : p2.items()) b.p2[k] = weight_from_json(w, path + ".p2." + k);
    }
    if (j.contains("p4")) {
        const json& p4 = j.at("p4");
        if (!p4.is_array()) fail(path + ".p4", "expected an array of atoms");
        for (std::size_t i = 0; i < p4.size(); ++i) {
            const std::string f = path + ".p4[" + std::to_string(i) + "]";
            const json& a = p4[i];
            if (!a.is_object()) fail(f, "expected an object");
            AtomDocument atom;
            atom.vertex = optional_string(a, "vertex", f);
            atom.edge = optional_string(a, "edge", f);
            if (atom.vertex.has_value() == atom.edge.has_value()) fail(f, "give exactly one of 'vertex' or 'edge'");
            if (atom.edge) atom.coordinate = as_number(require(a, "coordinate", f), f + ".coordinate");
            atom.weight = weight_from_json(require(a, "weight", f), f + ".weight");
            b.p4.push_back(std::move(atom));
        }
    }
    return b;
}

StartDocument parse_start(const json& j) {
    if (!j.is_object()) fail("run.start", "expected an object");
    StartDocument s;
    s.vertex = optional_string(j, "vertex", "run.start");
    s.edge = optional_string(j, "edge", "run.start");
    if (s.vertex.has_value() == s.edge.has_value()) fail("run.start", "give exactly one of 'vertex' or 'edge'");
    if (s.edge) s.coordinate = as_number(require(j, "coordinate", "run.start"), "run.start.coordinate");
    return s;
}

RunParameters parse_run(const json& j) {
    RunParameters r;
    if (j.is_null()) return r;
    if (!j.is_object()) fail("run", "expected an object");
    if (j.contains("epsilon")) r.epsilon = as_number(j.at("epsilon"), "run.epsilon");
    if (j.contains("horizon")) r.horizon = as_number(j.at("horizon"), "run.horizon");
    if (j.contains("paths")) {
        if (!j.at("paths").is_number_unsigned()) fail("run.paths", "expected a non-negative integer");
        r.paths = j.at("paths").get<std::size_t>();
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) fail("run.seed", "expected a non-negative integer");
        r.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("backend")) r.backend = as_string(j.at("backend"), "run.backend");
    if (r.backend != "direct" && r.backend != "pipeline" && r.backend != "both") {
        fail("run.backend", "expected direct, pipeline or both");
    }
    if (j.contains("start")) r.start = parse_start(j.at("start"));
    if (j.contains("delta")) {
        if (!j.at("delta").is_object()) fail("run.delta", "expected an object of vertex radii");
        for (const auto& [k, v] : j.at("delta").items()) r.delta[k] = as_number(v, "run.delta." + k);
    }
    if (j.contains("alpha")) {
        if (!j.at("alpha").is_array()) fail("run.alpha", "expected an array");
        r.alpha.clear();
        for (const auto& a : j.at("alpha")) r.alpha.push_back(as_number(a, "run.alpha"));
    }
    if (j.contains("out")) r.out = as_string(j.at("out"), "run.out");
    if (j.contains("workers")) {
        if (!j.at("workers").is_number_integer()) fail("run.workers", "expected an integer");
        r.workers = j.at("workers").get<int>();
    }
    return r;
}

json atom_target_json(const MetricGraph& g, const GraphPoint& p) {
    json j;
    switch (p.kind()) {
    case GraphPoint::Kind::Vertex: j["vertex"] = g.vertex_name(p.vertex()); break;
    case GraphPoint::Kind::Edge:
        j["edge"] = g.edge(p.edge()).name;
        j["coordinate"] = p.coordinate();
        break;
    case GraphPoint::Kind::Cemetery: j["cemetery"] = true; break;
    case GraphPoint::Kind::Aux: j["aux"] = g.describe(p); break;
    }
    return j;
}

template <class W>
json fw_json_impl(const MetricGraph& g, const BasicFWData<W>& d) {
    auto w = [](const W& x) {
        if constexpr (std::is_same_v<W, double>) {
            return json(x);
        } else {
            return weight_json(x);
        }
    };
    json j;
    j["p1"] = w(d.p1);
    j["p2"] = json::object();
    for (const auto& [e, x] : d.p2) j["p2"][g.edge(e).name] = w(x);
    j["p3"] = w(d.p3);
    j["p4"] = json::array();
    for (const auto& a : d.p4) {
        json atom = atom_target_json(g, a.target);
        atom["weight"] = w(a.weight);
        j["p4"].push_back(std::move(atom));
    }
    return j;
}

}  // namespace

bool operator==(const GraphDocument& a, const GraphDocument& b) {
    auto internal = [](const GraphDocument& d) {
        std::vector<std::tuple<std::string, std::string, std::string, double>> v;
        for (const auto& e : d.internal_edges) v.emplace_back(e.id, e.from, e.to, e.length);
        return v;
    };
    auto external = [](const GraphDocument& d) {
        std::vector<std::pair<std::string, std::string>> v;
        for (const auto& e : d.external_edges) v.emplace_back(e.id, e.from);
        return v;
    };
    return a.vertices == b.vertices && internal(a) == internal(b) && external(a) == external(b);
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.graph == b.graph && a.boundary == b.boundary && a.run == b.run && a.expect == b.expect;
}

json weight_json(const Rational& w) {
    if (is_exact_double(w)) return to_double(w);
    return to_string(w);
}

Rational weight_from_json(const json& j, const std::string& field) {
    if (j.is_number()) {
        const double x = j.get<double>();
        if (!std::isfinite(x)) fail(field, "weight must be finite");
        return to_rational(x);
    }
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const std::exception& e) {
            fail(field, e.what());
        }
    }
    fail(field, "expected a number or a string such as \"3/7\"");
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    RunConfig c;
    c.graph = parse_graph(require(doc, "graph", ""));
    if (doc.contains("boundary")) {
        const json& b = doc.at("boundary");
        if (!b.is_object()) fail("boundary", "expected an object keyed by vertex");
        for (const auto& [v, data] : b.items()) c.boundary[v] = parse_boundary(data, "boundary." + v);
    }
    c.run = parse_run(doc.contains("run") ? doc.at("run") : json());
    if (doc.contains("expect")) c.expect = doc.at("expect");
    return c;
}

RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                          ": " + e.what());
    }
    return parse_config(doc);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

json to_json(const RunConfig& c) {
    json doc;
    json& g = doc["graph"];
    g["vertices"] = c.graph.vertices;
    g["internal_edges"] = json::array();
    for (const auto& e : c.graph.internal_edges) {
        g["internal_edges"].push_back(json::array({e.id, e.from, e.to, std::isinf(e.length) ? json("inf") : json(e.length)}));
    }
    g["external_edges"] = json::array();
    for (const auto& e : c.graph.external_edges) g["external_edges"].push_back(json::array({e.id, e.from}));

    json& b = doc["boundary"];
    b = json::object();
    for (const auto& [v, d] : c.boundary) {
        json& o = b[v];
        o["p1"] = weight_json(d.p1);
        o["p2"] = json::object();
        for (const auto& [e, w] : d.p2) o["p2"][e] = weight_json(w);
        o["p3"] = weight_json(d.p3);
        o["p4"] = json::array();
        for (const auto& a : d.p4) {
            json atom;
            if (a.vertex) atom["vertex"] = *a.vertex;
            if (a.edge) {
                atom["edge"] = *a.edge;
                atom["coordinate"] = a.coordinate;
            }
            atom["weight"] = weight_json(a.weight);
            o["p4"].push_back(std::move(atom));
        }
    }

    json& r = doc["run"];
    r["epsilon"] = c.run.epsilon;
    r["horizon"] = c.run.horizon;
    r["paths"] = c.run.paths;
    r["seed"] = c.run.seed;
    r["backend"] = c.run.backend;
    if (c.run.start) {
        json s;
        if (c.run.start->vertex) s["vertex"] = *c.run.start->vertex;
        if (c.run.start->edge) {
            s["edge"] = *c.run.start->edge;
            s["coordinate"] = c.run.start->coordinate;
        }
        r["start"] = s;
    }
    r["delta"] = json::object();
    for (const auto& [v, d] : c.run.delta) r["delta"][v] = d;
    r["alpha"] = c.run.alpha;
    r["out"] = c.run.out;
    r["workers"] = c.run.workers;
    if (!c.expect.empty()) doc["expect"] = c.expect;
    return doc;
}

ModelCheck check_model(const RunConfig& c) {
    ModelCheck out;
    ValidationReport& report = out.report;
    report.merge(validate_graph(c.graph));
    if (!report.ok()) return out;

    Model m;
    auto graph = std::make_shared<MetricGraph>(MetricGraph::from_document(c.graph));
    const MetricGraph& g = *graph;
    m.exact.resize(g.vertex_count());
    bool data_ok = true;
    for (const auto& [name, d] : c.boundary) {
        if (!g.find_vertex(name)) {
            report.add("boundary data for undeclared vertex '" + name + "'");
            data_ok = false;
        }
    }
    for (std::size_t i = 0; i < g.vertex_count(); ++i) {
        const VertexId v{static_cast<std::uint32_t>(i)};
        const std::string& name = g.vertex_name(v);
        auto it = c.boundary.find(name);
        if (it == c.boundary.end()) {
            report.add("vertex '" + name + "' has no boundary data");
            data_ok = false;
            continue;
        }
        const BoundaryDocument& b = it->second;
        ExactFWData& d = m.exact[i];
        d.p1 = b.p1;
        d.p3 = b.p3;
        for (const auto& [e, w] : b.p2) {
            if (auto id = g.find_edge(e)) {
                d.p2[*id] = w;
            } else {
                report.add("vertex '" + name + "': p2 refers to unknown edge '" + e + "'");
                data_ok = false;
            }
        }
        for (const auto& a : b.p4) {
            try {
                const GraphPoint target = a.vertex ? GraphPoint::at_vertex(g.vertex(*a.vertex))
                                                   : g.canonical(g.edge_id(*a.edge), a.coordinate);
                if (a.weight <= 0) throw std::invalid_argument("jump weight must be positive");
                d.p4.add(target, a.weight);
            } catch (const std::exception& e) {
                report.add("vertex '" + name + "': jump atom: " + e.what());
                data_ok = false;
            }
        }
    }
    if (data_ok) report.merge(validate_fw(g, m.exact));
    m.fw = to_double_assignment(m.exact);

    const RunParameters& r = c.run;
    if (!(r.epsilon > 0.0)) report.add("run.epsilon must be positive");
    if (!(r.horizon >= 0.0) || !std::isfinite(r.horizon)) report.add("run.horizon must be finite and non-negative");
    if (r.paths == 0) report.add("run.paths must be positive");
    if (r.workers < 0) report.add("run.workers must be non-negative");
    if (r.epsilon > 0.0) {
        try {
            check_epsilon(g, m.fw, r.epsilon);
        } catch (const std::exception& e) {
            report.add(e.what());
        }
    }
    m.delta = default_deltas(g);
    for (const auto& [name, value] : r.delta) {
        if (auto v = g.find_vertex(name)) {
            m.delta[index(*v)] = value;
        } else {
            report.add("run.delta names undeclared vertex '" + name + "'");
        }
    }
    if (r.backend != "direct" && r.epsilon > 0.0) {
        try {
            check_pipeline_parameters(g, m.delta, r.epsilon);
        } catch (const std::exception& e) {
            report.add(e.what());
        }
    }
    m.start = GraphPoint::at_vertex(VertexId{0});
    if (r.start) {
        try {
            m.start = r.start->vertex ? GraphPoint::at_vertex(g.vertex(*r.start->vertex))
                                      : g.canonical(g.edge_id(*r.start->edge), r.start->coordinate);
        } catch (const std::exception& e) {
            report.add(std::string("run.start: ") + e.what());
        }
    }
    m.graph = std::move(graph);
    out.model = std::move(m);
    return out;
}

Model build_model(const RunConfig& c) {
    ModelCheck check = check_model(c);
    if (!check.report.ok()) throw ConfigError(check.report.violations.front());
    return std::move(*check.model);
}

json fw_json(const MetricGraph& g, const BasicFWData<double>& d) { return fw_json_impl(g, d); }
json fw_json(const MetricGraph& g, const BasicFWData<Rational>& d) { return fw_json_impl(g, d); }

}  // namespace fwg
