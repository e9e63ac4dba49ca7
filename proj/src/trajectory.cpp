#include "fwgraph/trajectory.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace fwg {

std::string_view to_string(EventKind k) {
    switch (k) {
    case EventKind::Start: return "start";
    case EventKind::EdgeExit: return "edge_exit";
    case EventKind::VertexResolution: return "vertex_resolution";
    case EventKind::Hold: return "hold";
    case EventKind::Jump: return "jump";
    case EventKind::Revival: return "revival";
    case EventKind::Kill: return "kill";
    case EventKind::Horizon: return "horizon";
    case EventKind::Barrier: return "barrier";
    }
    return "unknown";
}

bool in_stop_set(std::span<const Barrier> barriers, const GraphPoint& p) {
    return std::any_of(barriers.begin(), barriers.end(), [&](const Barrier& b) { return b.contains(p); });
}

std::size_t Trajectory::count(EventKind k) const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [k](const Event& e) { return e.kind == k; }));
}

void write_csv(std::ostream& os, const MetricGraph& g, const Trajectory& tr) {
    os << "t,kind,location_kind,id,coordinate\n";
    char buf[64];
    for (const auto& e : tr.events) {
        std::snprintf(buf, sizeof buf, "%.17g", e.t);
        os << buf << ',' << to_string(e.kind) << ',';
        const GraphPoint& p = e.position;
        switch (p.kind()) {
        case GraphPoint::Kind::Vertex:
            os << "vertex," << g.vertex_name(p.vertex()) << ',';
            break;
        case GraphPoint::Kind::Edge:
            std::snprintf(buf, sizeof buf, "%.17g", p.coordinate());
            os << "edge," << g.edge(p.edge()).name << ',' << buf;
            break;
        case GraphPoint::Kind::Cemetery:
            os << "cemetery,,";
            break;
        case GraphPoint::Kind::Aux:
            os << "aux," << g.describe(p) << ',';
            break;
        }
        os << '\n';
    }
}

ValidationReport check_trajectory(const MetricGraph& g, const Trajectory& tr) {
    ValidationReport report;
    if (tr.events.empty()) {
        report.add("empty trajectory");
        return report;
    }
    if (tr.events.front().kind != EventKind::Start) report.add("first event is not a start event");
    for (std::size_t i = 0; i < tr.events.size(); ++i) {
        const Event& e = tr.events[i];
        if (i > 0 && e.t < tr.events[i - 1].t) report.add("time decreases at event " + std::to_string(i));
        if (i > 0 && e.kind == EventKind::Start) report.add("repeated start event at " + std::to_string(i));
        if (e.kind == EventKind::Kill && i + 1 != tr.events.size()) report.add("events after kill");
        if (e.position.is_edge() && !g.contains(e.position)) report.add("event position outside the graph");
        if (e.position.is_vertex() && index(e.position.vertex()) >= g.vertex_count()) {
            report.add("event at unknown vertex");
        }
    }
    return report;
}

}  // namespace fwg
