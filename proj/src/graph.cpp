#include "fwgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace fwg {

void ValidationReport::merge(const ValidationReport& other) {
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

VertexId MetricGraph::add_vertex(std::string name) {
    if (vertex_lookup_.contains(name)) {
        throw std::invalid_argument("duplicate vertex id '" + name + "'");
    }
    const VertexId id{static_cast<std::uint32_t>(vertex_names_.size())};
    vertex_lookup_.emplace(name, id);
    vertex_names_.push_back(std::move(name));
    incidence_.emplace_back();
    return id;
}

EdgeId MetricGraph::add_internal_edge(std::string name, VertexId from, VertexId to, double length) {
    if (index(from) >= vertex_count() || index(to) >= vertex_count()) {
        throw std::invalid_argument("edge '" + name + "' has an endpoint outside the graph");
    }
    if (from == to) {
        throw std::invalid_argument("edge '" + name + "' is a loop");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw std::invalid_argument("edge '" + name + "' needs a positive finite length");
    }
    if (edge_lookup_.contains(name)) {
        throw std::invalid_argument("duplicate edge id '" + name + "'");
    }
    const EdgeId id{static_cast<std::uint32_t>(edges_.size())};
    edge_lookup_.emplace(name, id);
    edges_.push_back(Edge{std::move(name), from, to, length});
    incidence_[index(from)].push_back({id, true});
    incidence_[index(to)].push_back({id, false});
    return id;
}

EdgeId MetricGraph::add_external_edge(std::string name, VertexId from) {
    if (index(from) >= vertex_count()) {
        throw std::invalid_argument("edge '" + name + "' has an endpoint outside the graph");
    }
    if (edge_lookup_.contains(name)) {
        throw std::invalid_argument("duplicate edge id '" + name + "'");
    }
    const EdgeId id{static_cast<std::uint32_t>(edges_.size())};
    edge_lookup_.emplace(name, id);
    edges_.push_back(Edge{std::move(name), from, std::nullopt, kInfinity});
    incidence_[index(from)].push_back({id, true});
    return id;
}

MetricGraph MetricGraph::from_document(const GraphDocument& doc) {
    const auto report = validate_graph(doc);
    if (!report.ok()) {
        throw std::invalid_argument("invalid graph: " + report.violations.front());
    }
    MetricGraph g;
    for (const auto& v : doc.vertices) g.add_vertex(v);
    // Declaration order of internal edges first, then external ones.
    for (const auto& e : doc.internal_edges) {
        g.add_internal_edge(e.id, g.vertex(e.from), g.vertex(e.to), e.length);
    }
    for (const auto& e : doc.external_edges) g.add_external_edge(e.id, g.vertex(e.from));
    return g;
}

GraphDocument MetricGraph::to_document() const {
    GraphDocument doc;
    doc.vertices = vertex_names_;
    for (const auto& e : edges_) {
        if (e.internal()) {
            doc.internal_edges.push_back({e.name, vertex_name(e.from), vertex_name(*e.to), e.length});
        } else {
            doc.external_edges.push_back({e.name, vertex_name(e.from)});
        }
    }
    return doc;
}

std::optional<VertexId> MetricGraph::find_vertex(std::string_view name) const {
    auto it = vertex_lookup_.find(std::string(name));
    if (it == vertex_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<EdgeId> MetricGraph::find_edge(std::string_view name) const {
    auto it = edge_lookup_.find(std::string(name));
    if (it == edge_lookup_.end()) return std::nullopt;
    return it->second;
}

VertexId MetricGraph::vertex(std::string_view name) const {
    if (auto v = find_vertex(name)) return *v;
    throw std::invalid_argument("unknown vertex id '" + std::string(name) + "'");
}

EdgeId MetricGraph::edge_id(std::string_view name) const {
    if (auto e = find_edge(name)) return *e;
    throw std::invalid_argument("unknown edge id '" + std::string(name) + "'");
}

GraphPoint MetricGraph::point_along(VertexId v, EdgeId e, double r) const {
    const Edge& ed = edge(e);
    if (ed.from == v) return canonical(e, r);
    if (ed.to == v) return canonical(e, ed.length - r);
    throw std::invalid_argument("edge '" + ed.name + "' is not incident to '" + vertex_name(v) + "'");
}

double MetricGraph::offset_from(VertexId v, EdgeId e, double coordinate) const {
    const Edge& ed = edge(e);
    if (ed.from == v) return coordinate;
    if (ed.to == v) return ed.length - coordinate;
    throw std::invalid_argument("edge '" + ed.name + "' is not incident to '" + vertex_name(v) + "'");
}

GraphPoint MetricGraph::canonical(EdgeId e, double x) const {
    const Edge& ed = edge(e);
    if (x == 0.0) return GraphPoint::at_vertex(ed.from);
    if (ed.internal() && x == ed.length) return GraphPoint::at_vertex(*ed.to);
    if (!(x > 0.0) || !(x < ed.length)) {
        std::ostringstream os;
        os << "coordinate " << x << " outside edge '" << ed.name << "'";
        throw std::invalid_argument(os.str());
    }
    return GraphPoint::on_edge(e, x);
}

bool MetricGraph::contains(const GraphPoint& p) const {
    switch (p.kind()) {
    case GraphPoint::Kind::Vertex:
        return index(p.vertex()) < vertex_count();
    case GraphPoint::Kind::Edge: {
        if (index(p.edge()) >= edge_count()) return false;
        const double x = p.coordinate();
        return x > 0.0 && x < edge(p.edge()).length;
    }
    case GraphPoint::Kind::Cemetery:
    case GraphPoint::Kind::Aux:
        return false;
    }
    return false;
}

double MetricGraph::min_incident_length(VertexId v) const {
    double m = kInfinity;
    for (const auto& inc : incident(v)) m = std::min(m, edge(inc.edge).length);
    return m;
}

double MetricGraph::min_internal_length() const {
    double m = kInfinity;
    for (const auto& e : edges_) {
        if (e.internal()) m = std::min(m, e.length);
    }
    return m;
}

std::string MetricGraph::describe(const GraphPoint& p) const {
    std::ostringstream os;
    switch (p.kind()) {
    case GraphPoint::Kind::Vertex:
        os << vertex_name(p.vertex());
        break;
    case GraphPoint::Kind::Edge:
        os << '(' << edge(p.edge()).name << ", " << p.coordinate() << ')';
        break;
    case GraphPoint::Kind::Cemetery:
        os << "cemetery";
        break;
    case GraphPoint::Kind::Aux:
        if (p.aux_id() == kGlobalBox) {
            os << "box";
        } else if (index(VertexId{static_cast<std::uint32_t>(p.aux_id())}) < vertex_count()) {
            os << "box:" << vertex_name(VertexId{static_cast<std::uint32_t>(p.aux_id())});
        } else {
            os << "box#" << static_cast<std::uint32_t>(p.aux_id());
        }
        break;
    }
    return os.str();
}

ValidationReport validate_graph(const GraphDocument& doc) {
    ValidationReport report;
    if (doc.vertices.empty()) report.add("empty vertex set");

    std::unordered_set<std::string> vertices;
    for (const auto& v : doc.vertices) {
        if (!vertices.insert(v).second) report.add("duplicate vertex id '" + v + "'");
    }
    std::unordered_set<std::string> edges;
    auto check_endpoint = [&](const std::string& edge, const std::string& v) {
        if (!vertices.contains(v)) {
            report.add("dangling endpoint: edge '" + edge + "' refers to undeclared vertex '" + v + "'");
        }
    };
    for (const auto& e : doc.internal_edges) {
        if (!edges.insert(e.id).second) report.add("duplicate edge id '" + e.id + "'");
        check_endpoint(e.id, e.from);
        check_endpoint(e.id, e.to);
        if (e.from == e.to) report.add("loop: edge '" + e.id + "' starts and ends at '" + e.from + "'");
        if (!(e.length > 0.0)) {
            report.add("non-positive length: edge '" + e.id + "'");
        } else if (!std::isfinite(e.length)) {
            report.add("non-finite length: internal edge '" + e.id + "'");
        }
    }
    for (const auto& e : doc.external_edges) {
        if (!edges.insert(e.id).second) report.add("duplicate edge id '" + e.id + "'");
        check_endpoint(e.id, e.from);
    }
    return report;
}

ValidationReport validate_graph(const MetricGraph& g) { return validate_graph(g.to_document()); }

std::vector<double> vertex_distances(const MetricGraph& g, const GraphPoint& source) {
    std::vector<double> dist(g.vertex_count(), kInfinity);
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    auto seed = [&](VertexId v, double d) {
        if (d < dist[index(v)]) {
            dist[index(v)] = d;
            queue.emplace(d, static_cast<std::uint32_t>(v));
        }
    };
    if (source.is_vertex()) {
        seed(source.vertex(), 0.0);
    } else if (source.is_edge()) {
        const Edge& e = g.edge(source.edge());
        seed(e.from, source.coordinate());
        if (e.internal()) seed(*e.to, e.length - source.coordinate());
    } else {
        return dist;
    }
    while (!queue.empty()) {
        auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[u]) continue;
        for (const auto& inc : g.incident(VertexId{u})) {
            const Edge& e = g.edge(inc.edge);
            if (!e.internal()) continue;
            const VertexId other = inc.at_start ? *e.to : e.from;
            seed(other, d + e.length);
        }
    }
    return dist;
}

double distance(const MetricGraph& g, const GraphPoint& a, const GraphPoint& b) {
    auto check = [&](const GraphPoint& p) {
        if (p.is_edge() && index(p.edge()) >= g.edge_count()) {
            throw std::invalid_argument("unknown edge id in point");
        }
        if (p.is_vertex() && index(p.vertex()) >= g.vertex_count()) {
            throw std::invalid_argument("unknown vertex id in point");
        }
    };
    check(a);
    check(b);
    if (a == b) return 0.0;
    if (a.is_aux() || a.is_cemetery() || b.is_aux() || b.is_cemetery()) return kInfinity;

    const auto dist = vertex_distances(g, a);
    if (b.is_vertex()) return dist[index(b.vertex())];

    const Edge& e = g.edge(b.edge());
    const double y = b.coordinate();
    double best = dist[index(e.from)] + y;
    if (e.internal()) best = std::min(best, dist[index(*e.to)] + (e.length - y));
    if (a.is_edge() && a.edge() == b.edge()) best = std::min(best, std::abs(a.coordinate() - y));
    return best;
}

}  // namespace fwg
