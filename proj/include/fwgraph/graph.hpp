#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fwg {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VertexId : std::uint32_t {};
enum class EdgeId : std::uint32_t {};

// Isolated auxiliary points. The per-vertex fake cemetery of vertex v carries
// the index of v in the root graph; the single global one has its own tag.
enum class AuxId : std::uint32_t {};
inline constexpr AuxId kGlobalBox{0xFFFFFFFFu};
constexpr AuxId vertex_box(VertexId root_vertex) { return AuxId{static_cast<std::uint32_t>(root_vertex)}; }

constexpr std::size_t index(VertexId v) { return static_cast<std::size_t>(v); }
constexpr std::size_t index(EdgeId e) { return static_cast<std::size_t>(e); }

class GraphPoint {
public:
    enum class Kind : std::uint8_t { Vertex, Edge, Cemetery, Aux };

    constexpr GraphPoint() = default;

    static constexpr GraphPoint at_vertex(VertexId v) { return {Kind::Vertex, static_cast<std::uint32_t>(v), 0.0}; }
    static constexpr GraphPoint on_edge(EdgeId e, double x) { return {Kind::Edge, static_cast<std::uint32_t>(e), x}; }
    static constexpr GraphPoint cemetery() { return {Kind::Cemetery, 0, 0.0}; }
    static constexpr GraphPoint aux(AuxId a) { return {Kind::Aux, static_cast<std::uint32_t>(a), 0.0}; }

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_vertex() const { return kind_ == Kind::Vertex; }
    constexpr bool is_edge() const { return kind_ == Kind::Edge; }
    constexpr bool is_cemetery() const { return kind_ == Kind::Cemetery; }
    constexpr bool is_aux() const { return kind_ == Kind::Aux; }

    constexpr VertexId vertex() const { return VertexId{id_}; }
    constexpr EdgeId edge() const { return EdgeId{id_}; }
    constexpr AuxId aux_id() const { return AuxId{id_}; }
    constexpr double coordinate() const { return x_; }

    friend constexpr bool operator==(const GraphPoint&, const GraphPoint&) = default;
    friend constexpr std::partial_ordering operator<=>(const GraphPoint&, const GraphPoint&) = default;

private:
    constexpr GraphPoint(Kind k, std::uint32_t id, double x) : kind_(k), id_(id), x_(x) {}

    Kind kind_ = Kind::Cemetery;
    std::uint32_t id_ = 0;
    double x_ = 0.0;
};

struct Edge {
    std::string name;
    VertexId from{};
    std::optional<VertexId> to;  // empty for external edges
    double length = kInfinity;

    bool internal() const { return to.has_value(); }
};

// One end of an edge seen from a vertex. `at_start` means the vertex is the
// initial point (coordinate 0) of the edge.
struct Incidence {
    EdgeId edge{};
    bool at_start = true;
};

// Plain description of a graph by names, as read from a configuration file.
// May be invalid; see validate_graph().
struct GraphDocument {
    struct Internal {
        std::string id, from, to;
        double length = 0.0;
    };
    struct External {
        std::string id, from;
    };
    std::vector<std::string> vertices;
    std::vector<Internal> internal_edges;
    std::vector<External> external_edges;
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    void add(std::string message) { violations.push_back(std::move(message)); }
    void merge(const ValidationReport& other);
};

// Finite metric graph without loops. Every MetricGraph is valid by
// construction; the add_* methods throw std::invalid_argument otherwise.
class MetricGraph {
public:
    VertexId add_vertex(std::string name);
    EdgeId add_internal_edge(std::string name, VertexId from, VertexId to, double length);
    EdgeId add_external_edge(std::string name, VertexId from);

    static MetricGraph from_document(const GraphDocument& doc);
    GraphDocument to_document() const;

    std::size_t vertex_count() const { return vertex_names_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::string& vertex_name(VertexId v) const { return vertex_names_.at(index(v)); }
    const Edge& edge(EdgeId e) const { return edges_.at(index(e)); }
    std::span<const Incidence> incident(VertexId v) const { return incidence_.at(index(v)); }

    std::optional<VertexId> find_vertex(std::string_view name) const;
    std::optional<EdgeId> find_edge(std::string_view name) const;
    VertexId vertex(std::string_view name) const;  // throws if unknown
    EdgeId edge_id(std::string_view name) const;   // throws if unknown

    // Position at distance r from v along an incident edge.
    GraphPoint point_along(VertexId v, EdgeId e, double r) const;
    // Distance from v to p measured along edge e (p must lie on e or be v).
    double offset_from(VertexId v, EdgeId e, double coordinate) const;
    // Canonical point for (edge, x): endpoints become vertices.
    GraphPoint canonical(EdgeId e, double x) const;

    bool contains(const GraphPoint& p) const;
    double min_incident_length(VertexId v) const;
    double min_internal_length() const;

    std::string describe(const GraphPoint& p) const;

private:
    std::vector<std::string> vertex_names_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> incidence_;
    std::unordered_map<std::string, VertexId> vertex_lookup_;
    std::unordered_map<std::string, EdgeId> edge_lookup_;
};

ValidationReport validate_graph(const GraphDocument& doc);
ValidationReport validate_graph(const MetricGraph& g);

// Shortest-path metric along edges. +inf across components and to or from
// cemetery/aux points (unless identical).
double distance(const MetricGraph& g, const GraphPoint& a, const GraphPoint& b);

// Distances from one point to every vertex (Dijkstra).
std::vector<double> vertex_distances(const MetricGraph& g, const GraphPoint& source);

}  // namespace fwg
