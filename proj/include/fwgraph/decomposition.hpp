#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fwgraph/graph.hpp"

namespace fwg {

enum class Side : std::int8_t { Minus = -1, Plus = +1 };

constexpr Side opposite(Side s) { return s == Side::Minus ? Side::Plus : Side::Minus; }
constexpr int sign(Side s) { return static_cast<int>(s); }
constexpr std::size_t slot(Side s) { return s == Side::Minus ? 0 : 1; }

// Where an edge of a subgraph comes from in the parent graph.
struct EdgeOrigin {
    EdgeId parent{};
    bool shadow = false;
    bool reversed = false;           // shadow edge runs against the parent edge
    double shadow_length = kInfinity;  // R_s; finite only for shadow edges
};

// One side of the split: the graph G^j with its translation tables.
struct SubgraphSide {
    std::shared_ptr<const MetricGraph> graph;
    std::vector<VertexId> vertex_to_parent;
    std::vector<EdgeOrigin> edge_to_parent;
    std::vector<std::optional<VertexId>> vertex_from_parent;
    std::vector<std::optional<EdgeId>> edge_from_parent;
};

// Split of a metric graph along a vertex partition V^-1 + V^+1. Crossing
// internal edges are replaced on each side by an external shadow edge named
// "<edge>@-1" / "<edge>@+1".
class SubgraphDecomposition {
public:
    SubgraphDecomposition(std::shared_ptr<const MetricGraph> parent, std::span<const VertexId> minus_side);

    const MetricGraph& parent() const { return *parent_; }
    const std::shared_ptr<const MetricGraph>& parent_ptr() const { return parent_; }
    const SubgraphSide& side(Side s) const { return sides_[slot(s)]; }
    Side side_of(VertexId v) const { return vertex_side_.at(index(v)); }

    const std::vector<EdgeId>& external_edges(Side s) const { return external_[slot(s)]; }
    const std::vector<EdgeId>& internal_edges(Side s) const { return internal_[slot(s)]; }
    // I_s^j: crossing edges whose initial vertex lies on side j.
    const std::vector<EdgeId>& crossing_edges(Side s) const { return crossing_[slot(s)]; }
    std::vector<EdgeId> all_crossing_edges() const;
    bool is_crossing(EdgeId parent_edge) const;

    // Shadow edge e_i^j in the side-j graph.
    EdgeId shadow_edge(Side s, EdgeId crossing) const;

    // Points of the excrescent shadow part {(e, x): x >= R_s(e)}.
    bool in_excrescent(Side s, const GraphPoint& local) const;

    // Side-j point -> parent point; throws for excrescent points.
    GraphPoint psi(Side s, const GraphPoint& local) const;
    // Parent point -> side-j point; throws if the point is not in G^j.
    GraphPoint phi(Side s, const GraphPoint& parent_point) const;
    bool in_part(Side s, const GraphPoint& parent_point) const;

    // Vertex where the opposite side is revived when side `dying` is killed
    // at the end of the shadow of `crossing`.
    VertexId transfer_target(Side dying, EdgeId crossing) const;

private:
    std::shared_ptr<const MetricGraph> parent_;
    std::vector<Side> vertex_side_;
    std::vector<EdgeId> external_[2], internal_[2], crossing_[2];
    SubgraphSide sides_[2];
};

std::shared_ptr<const SubgraphDecomposition> decompose(std::shared_ptr<const MetricGraph> g,
                                                       std::span<const VertexId> minus_side);

}  // namespace fwg
