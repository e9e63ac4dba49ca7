#include "fwgraph/decomposition.hpp"

#include <algorithm>
#include <stdexcept>

namespace fwg {

namespace {

std::string shadow_name(const std::string& original, Side s) {
    return original + (s == Side::Minus ? "@-1" : "@+1");
}

}  // namespace

SubgraphDecomposition::SubgraphDecomposition(std::shared_ptr<const MetricGraph> parent,
                                             std::span<const VertexId> minus_side)
    : parent_(std::move(parent)) {
    const MetricGraph& g = *parent_;
    vertex_side_.assign(g.vertex_count(), Side::Plus);
    std::size_t minus_count = 0;
    for (VertexId v : minus_side) {
        if (index(v) >= g.vertex_count()) throw std::invalid_argument("partition names an unknown vertex");
        if (vertex_side_[index(v)] == Side::Minus) continue;
        vertex_side_[index(v)] = Side::Minus;
        ++minus_count;
    }
    if (minus_count == 0 || minus_count == g.vertex_count()) {
        throw std::invalid_argument("both cells of the vertex partition must be non-empty");
    }

    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const EdgeId id{static_cast<std::uint32_t>(e)};
        const Edge& ed = g.edge(id);
        const Side from_side = side_of(ed.from);
        if (!ed.internal()) {
            external_[slot(from_side)].push_back(id);
        } else if (side_of(*ed.to) == from_side) {
            internal_[slot(from_side)].push_back(id);
        } else {
            crossing_[slot(from_side)].push_back(id);
        }
    }

    for (Side s : {Side::Minus, Side::Plus}) {
        auto graph = std::make_shared<MetricGraph>();
        SubgraphSide& part = sides_[slot(s)];
        part.vertex_from_parent.assign(g.vertex_count(), std::nullopt);
        part.edge_from_parent.assign(g.edge_count(), std::nullopt);
        for (std::size_t v = 0; v < g.vertex_count(); ++v) {
            const VertexId pv{static_cast<std::uint32_t>(v)};
            if (side_of(pv) != s) continue;
            part.vertex_from_parent[v] = graph->add_vertex(g.vertex_name(pv));
            part.vertex_to_parent.push_back(pv);
        }
        auto local = [&](VertexId pv) { return *part.vertex_from_parent[index(pv)]; };
        // Parent edge order is kept; crossing edges are replaced in place.
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            const EdgeId pe{static_cast<std::uint32_t>(e)};
            const Edge& ed = g.edge(pe);
            const Side from_side = side_of(ed.from);
            if (!ed.internal()) {
                if (from_side != s) continue;
                part.edge_from_parent[e] = graph->add_external_edge(ed.name, local(ed.from));
                part.edge_to_parent.push_back({pe, false, false, kInfinity});
            } else if (side_of(*ed.to) == from_side) {
                if (from_side != s) continue;
                part.edge_from_parent[e] = graph->add_internal_edge(ed.name, local(ed.from), local(*ed.to), ed.length);
                part.edge_to_parent.push_back({pe, false, false, kInfinity});
            } else {
                // Shadow edge hangs off the endpoint that lies on side s.
                const bool starts_here = from_side == s;
                const VertexId anchor = starts_here ? ed.from : *ed.to;
                part.edge_from_parent[e] = graph->add_external_edge(shadow_name(ed.name, s), local(anchor));
                part.edge_to_parent.push_back({pe, true, !starts_here, ed.length});
            }
        }
        part.graph = std::move(graph);
    }
}

std::vector<EdgeId> SubgraphDecomposition::all_crossing_edges() const {
    std::vector<EdgeId> all = crossing_[0];
    all.insert(all.end(), crossing_[1].begin(), crossing_[1].end());
    std::sort(all.begin(), all.end());
    return all;
}

bool SubgraphDecomposition::is_crossing(EdgeId e) const {
    const Edge& ed = parent_->edge(e);
    return ed.internal() && side_of(ed.from) != side_of(*ed.to);
}

EdgeId SubgraphDecomposition::shadow_edge(Side s, EdgeId crossing) const {
    if (!is_crossing(crossing)) throw std::invalid_argument("edge is not a crossing edge");
    return *side(s).edge_from_parent[index(crossing)];
}

bool SubgraphDecomposition::in_excrescent(Side s, const GraphPoint& local) const {
    if (!local.is_edge()) return false;
    const EdgeOrigin& origin = side(s).edge_to_parent.at(index(local.edge()));
    return origin.shadow && local.coordinate() >= origin.shadow_length;
}

GraphPoint SubgraphDecomposition::psi(Side s, const GraphPoint& local) const {
    const SubgraphSide& part = side(s);
    switch (local.kind()) {
    case GraphPoint::Kind::Vertex:
        return GraphPoint::at_vertex(part.vertex_to_parent.at(index(local.vertex())));
    case GraphPoint::Kind::Edge: {
        const EdgeOrigin& origin = part.edge_to_parent.at(index(local.edge()));
        const double x = local.coordinate();
        if (!origin.shadow) return GraphPoint::on_edge(origin.parent, x);
        if (!(x < origin.shadow_length)) {
            throw std::invalid_argument("point lies in the excrescent part of a shadow edge");
        }
        return GraphPoint::on_edge(origin.parent, origin.reversed ? origin.shadow_length - x : x);
    }
    case GraphPoint::Kind::Cemetery:
    case GraphPoint::Kind::Aux:
        return local;
    }
    return local;
}

bool SubgraphDecomposition::in_part(Side s, const GraphPoint& p) const {
    if (p.is_vertex()) return side_of(p.vertex()) == s;
    if (p.is_edge()) return side(s).edge_from_parent.at(index(p.edge())).has_value();
    return true;
}

GraphPoint SubgraphDecomposition::phi(Side s, const GraphPoint& p) const {
    const SubgraphSide& part = side(s);
    switch (p.kind()) {
    case GraphPoint::Kind::Vertex: {
        const auto& v = part.vertex_from_parent.at(index(p.vertex()));
        if (!v) throw std::invalid_argument("vertex is not part of this side");
        return GraphPoint::at_vertex(*v);
    }
    case GraphPoint::Kind::Edge: {
        const auto& e = part.edge_from_parent.at(index(p.edge()));
        if (!e) throw std::invalid_argument("edge is not part of this side");
        const EdgeOrigin& origin = part.edge_to_parent[index(*e)];
        const double x = p.coordinate();
        return GraphPoint::on_edge(*e, origin.reversed ? origin.shadow_length - x : x);
    }
    case GraphPoint::Kind::Cemetery:
    case GraphPoint::Kind::Aux:
        return p;
    }
    return p;
}

VertexId SubgraphDecomposition::transfer_target(Side dying, EdgeId crossing) const {
    if (!is_crossing(crossing)) throw std::invalid_argument("edge is not a crossing edge");
    const Edge& ed = parent_->edge(crossing);
    // i in I_s^j: revive at the terminal vertex, otherwise at the initial one.
    return side_of(ed.from) == dying ? *ed.to : ed.from;
}

std::shared_ptr<const SubgraphDecomposition> decompose(std::shared_ptr<const MetricGraph> g,
                                                       std::span<const VertexId> minus_side) {
    return std::make_shared<const SubgraphDecomposition>(std::move(g), minus_side);
}

}  // namespace fwg
