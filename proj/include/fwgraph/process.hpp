#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fwgraph/decomposition.hpp"
#include "fwgraph/sampler.hpp"

namespace fwg {

// A path recipe: (start, start time, absolute horizon, stream, stop sets)
// -> trajectory. Immutable and shareable across workers.
struct ProcessGenerator {
    using RunFn = std::function<Trajectory(const GraphPoint& start, double t0, double horizon, RandomStream& stream,
                                           std::span<const Barrier> barriers)>;

    std::shared_ptr<const MetricGraph> graph;
    std::vector<AuxId> aux;  // isolated points added to the graph
    std::string label;
    RunFn run_fn;

    Trajectory run(const GraphPoint& start, double horizon, RandomStream& stream,
                   std::span<const Barrier> barriers = {}) const {
        return run_fn(start, 0.0, horizon, stream, barriers);
    }
    Trajectory run(const GraphPoint& start, double t0, double horizon, RandomStream& stream,
                   std::span<const Barrier> barriers) const {
        return run_fn(start, t0, horizon, stream, barriers);
    }
};

ProcessGenerator direct_process(std::shared_ptr<const MetricGraph> graph, const FWAssignment& fw, double epsilon,
                                std::string label = "direct");

// Stops at the first entry into F (by start, jump or revival) and replaces
// it by a kill at the point the path came from.
ProcessGenerator kill_on_set(const ProcessGenerator& p, std::vector<GraphPoint> absorbing, std::string label);

// Each kill at v becomes a jump to the absorbing point targets[v].
ProcessGenerator attach_fake_cemetery(const ProcessGenerator& p, std::map<VertexId, AuxId> targets,
                                      std::string label);

// Each kill at v is followed by a revival at a kernel-distributed point,
// from where a fresh copy of p continues.
ProcessGenerator revive_with_kernel(const ProcessGenerator& p, std::map<VertexId, JumpMeasure> kernels,
                                    std::string label);

// Alternating copies of the two side processes glued along crossing edges.
ProcessGenerator decompose_and_glue(std::shared_ptr<const SubgraphDecomposition> dec, const ProcessGenerator& minus,
                                    const ProcessGenerator& plus, std::string label);

}  // namespace fwg
