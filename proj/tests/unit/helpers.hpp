#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "fwgraph/config.hpp"
#include "fwgraph/graph.hpp"

namespace testing {

// Same kind and id, coordinates equal up to rounding.
inline bool same_point(const fwg::GraphPoint& a, const fwg::GraphPoint& b, double tol = 1e-12) {
    if (a.kind() != b.kind()) return false;
    if (a.is_edge()) return a.edge() == b.edge() && std::abs(a.coordinate() - b.coordinate()) <= tol;
    return a == b;
}

inline fwg::Model fixture(const std::string& name) {
    return fwg::build_model(fwg::load_config(std::string(FWGRAPH_FIXTURE_DIR) + "/" + name));
}

inline fwg::VertexId vid(std::size_t i) { return fwg::VertexId{static_cast<std::uint32_t>(i)}; }
inline fwg::EdgeId eid(std::size_t i) { return fwg::EdgeId{static_cast<std::uint32_t>(i)}; }

// Floyd-Warshall over the vertices; the oracle for point distances.
inline std::vector<std::vector<double>> all_pairs(const fwg::MetricGraph& g) {
    const std::size_t n = g.vertex_count();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, fwg::kInfinity));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(eid(e));
        if (!ed.internal()) continue;
        const auto a = fwg::index(ed.from), b = fwg::index(*ed.to);
        d[a][b] = std::min(d[a][b], ed.length);
        d[b][a] = std::min(d[b][a], ed.length);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

// (vertex, offset) pairs through which a point is reached.
inline std::vector<std::pair<std::size_t, double>> exits(const fwg::MetricGraph& g, const fwg::GraphPoint& p) {
    if (p.is_vertex()) return {{fwg::index(p.vertex()), 0.0}};
    const auto& ed = g.edge(p.edge());
    std::vector<std::pair<std::size_t, double>> out{{fwg::index(ed.from), p.coordinate()}};
    if (ed.internal()) out.push_back({fwg::index(*ed.to), ed.length - p.coordinate()});
    return out;
}

inline double brute_distance(const fwg::MetricGraph& g, const fwg::GraphPoint& a, const fwg::GraphPoint& b) {
    if (a.is_aux() || b.is_aux() || a.is_cemetery() || b.is_cemetery()) return a == b ? 0.0 : fwg::kInfinity;
    const auto d = all_pairs(g);
    double best = fwg::kInfinity;
    if (a.is_edge() && b.is_edge() && a.edge() == b.edge()) best = std::abs(a.coordinate() - b.coordinate());
    for (auto [u, du] : exits(g, a))
        for (auto [w, dw] : exits(g, b)) best = std::min(best, du + d[u][w] + dw);
    return best;
}

}  // namespace testing
