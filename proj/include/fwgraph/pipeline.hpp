#pragma once

#include <memory>
#include <vector>

#include "fwgraph/fw_data.hpp"
#include "fwgraph/process.hpp"

namespace fwg {

struct StagedPipeline {
    ProcessGenerator x1;  // glued local-jump process with fake cemeteries
    ProcessGenerator x3;  // killed on the fake cemeteries
    ProcessGenerator x4;  // revived with the far kernels
    ProcessGenerator x5;  // killed on the global box: the target process
    std::vector<TraceStage<double>> trace;
    std::vector<double> c0;
    std::vector<LocalSplit<double>> splits;
};

// Recursive construction: peel the last vertex, simulate stars directly,
// glue back up, then kill, revive and kill again.
StagedPipeline construct_paper_pipeline(std::shared_ptr<const MetricGraph> graph, const FWAssignment& fw,
                                       std::vector<double> delta, double epsilon);

// Minimum of delta over vertices; epsilon must lie below it.
void check_pipeline_parameters(const MetricGraph& g, const std::vector<double>& delta, double epsilon);

}  // namespace fwg
