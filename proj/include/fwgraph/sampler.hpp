#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fwgraph/fw_data.hpp"
#include "fwgraph/random.hpp"
#include "fwgraph/trajectory.hpp"

namespace fwg {

struct VertexOutcome {
    enum class Kind : std::uint8_t { Edge, Kill, Jump, Trap };
    Kind kind = Kind::Edge;
    EdgeId edge{};         // for Edge
    GraphPoint target;     // for Jump
    double duration = 0.0;  // +inf for Trap
};

// Precomputed epsilon-shell law at one vertex.
class VertexLaw {
public:
    VertexLaw(const FWData& d, double epsilon);

    VertexOutcome sample(RandomStream& stream) const;

    double reflection() const { return reflection_; }
    bool trap() const { return trap_; }

private:
    struct Choice {
        VertexOutcome::Kind kind;
        EdgeId edge{};
        GraphPoint target;
    };
    std::vector<Choice> choices_;
    std::vector<double> cumulative_;
    double epsilon_ = 0.0;
    double reflection_ = 0.0;
    double hold_mean_ = 0.0;  // epsilon p3 / P2, or p3 / (p1 + sum w) without reflection
    bool trap_ = false;
};

// One draw of the vertex resolution; builds the law on the fly.
VertexOutcome vertex_resolution(const FWData& d, double epsilon, RandomStream& stream);

struct SimulationOptions {
    std::size_t max_events = 10'000'000;
};

class DirectSimulator {
public:
    DirectSimulator(std::shared_ptr<const MetricGraph> graph, FWAssignment fw, double epsilon,
                    SimulationOptions options = {});

    Trajectory run(const GraphPoint& start, double t0, double horizon, RandomStream& stream,
                   std::span<const Barrier> barriers = {}) const;

    const MetricGraph& graph() const { return *graph_; }
    const std::shared_ptr<const MetricGraph>& graph_ptr() const { return graph_; }
    const FWAssignment& data() const { return fw_; }
    double epsilon() const { return epsilon_; }

private:
    std::shared_ptr<const MetricGraph> graph_;
    FWAssignment fw_;
    double epsilon_;
    SimulationOptions options_;
    std::vector<VertexLaw> laws_;
};

// Checks 0 < epsilon < half of every finite edge length.
void check_epsilon(const MetricGraph& g, double epsilon);
// Also requires every jump target to lie farther than epsilon from its vertex.
void check_epsilon(const MetricGraph& g, const FWAssignment& fw, double epsilon);

Trajectory simulate_direct(std::shared_ptr<const MetricGraph> graph, const FWAssignment& fw, const GraphPoint& start,
                           double horizon, double epsilon, RandomStream& stream,
                           std::span<const Barrier> barriers = {});

}  // namespace fwg
