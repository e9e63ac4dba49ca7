#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "fwgraph/graph.hpp"

namespace fwg {

enum class EventKind : std::uint8_t {
    Start,
    EdgeExit,
    VertexResolution,
    Hold,
    Jump,
    Revival,
    Kill,
    Horizon,
    Barrier,  // stopped on entering a requested stop set
};

std::string_view to_string(EventKind k);

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::Start;
    GraphPoint position;
    GraphPoint origin;  // source vertex of jumps and revivals

    friend bool operator==(const Event&, const Event&) = default;
};

// Stop set {(edge, x): x >= threshold} (upward) or {x <= threshold} on one
// edge. Only edge-interior points belong to a stop set.
struct Barrier {
    EdgeId edge{};
    double threshold = 0.0;
    bool upward = true;

    bool contains(const GraphPoint& p) const {
        if (!p.is_edge() || p.edge() != edge) return false;
        return upward ? p.coordinate() >= threshold : p.coordinate() <= threshold;
    }
};

bool in_stop_set(std::span<const Barrier> barriers, const GraphPoint& p);

struct Trajectory {
    std::vector<Event> events;
    std::uint64_t transfers = 0;

    bool killed() const { return !events.empty() && events.back().kind == EventKind::Kill; }
    bool stopped() const { return !events.empty() && events.back().kind == EventKind::Barrier; }
    double end_time() const { return events.empty() ? 0.0 : events.back().t; }
    const Event& last() const { return events.back(); }
    std::size_t count(EventKind k) const;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

void write_csv(std::ostream& os, const MetricGraph& g, const Trajectory& tr);

ValidationReport check_trajectory(const MetricGraph& g, const Trajectory& tr);

}  // namespace fwg
