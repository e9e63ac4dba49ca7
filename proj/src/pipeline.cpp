#include "fwgraph/pipeline.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace fwg {

namespace {

ProcessGenerator build_glued(const std::shared_ptr<const MetricGraph>& g, const FWAssignment& data, double epsilon) {
    const std::size_t n = g->vertex_count();
    if (n == 1) return direct_process(g, data, epsilon, "star:" + g->vertex_name(VertexId{0}));

    std::vector<VertexId> minus;
    for (std::size_t v = 0; v + 1 < n; ++v) minus.push_back(VertexId{static_cast<std::uint32_t>(v)});
    auto dec = decompose(g, minus);
    const ProcessGenerator left = build_glued(dec->side(Side::Minus).graph, pull_back(*dec, Side::Minus, data), epsilon);
    const ProcessGenerator right =
        direct_process(dec->side(Side::Plus).graph, pull_back(*dec, Side::Plus, data), epsilon,
                       "star:" + g->vertex_name(VertexId{static_cast<std::uint32_t>(n - 1)}));
    return decompose_and_glue(dec, left, right, "glue:" + std::to_string(n));
}

}  // namespace

void check_pipeline_parameters(const MetricGraph& g, const std::vector<double>& delta, double epsilon) {
    if (delta.size() != g.vertex_count()) throw std::invalid_argument("one delta per vertex required");
    for (std::size_t v = 0; v < delta.size(); ++v) {
        const VertexId id{static_cast<std::uint32_t>(v)};
        if (!(delta[v] > 0.0) || !(delta[v] < g.min_incident_length(id))) {
            std::ostringstream os;
            os << "stage local_split, vertex '" << g.vertex_name(id) << "': delta " << delta[v]
               << " must lie in (0, shortest incident edge)";
            throw std::invalid_argument(os.str());
        }
    }
    const double min_delta = *std::min_element(delta.begin(), delta.end());
    if (!(epsilon > 0.0) || !(epsilon < min_delta)) {
        std::ostringstream os;
        os << "epsilon " << epsilon << " must be positive and below the smallest delta " << min_delta;
        throw std::invalid_argument(os.str());
    }
}

StagedPipeline construct_paper_pipeline(std::shared_ptr<const MetricGraph> graph, const FWAssignment& fw,
                                       std::vector<double> delta, double epsilon) {
    const MetricGraph& g = *graph;
    const std::size_t n = g.vertex_count();
    if (delta.empty()) delta = default_deltas(g);
    check_pipeline_parameters(g, delta, epsilon);

    StagedPipeline out;
    out.trace = pipeline_trace(graph, fw, delta);
    out.c0.resize(n);
    out.splits.resize(n);

    FWAssignment x1_data(n);
    std::vector<GraphPoint> boxes;
    std::map<VertexId, JumpMeasure> kernels;
    for (std::size_t v = 0; v < n; ++v) {
        const VertexId id{static_cast<std::uint32_t>(v)};
        out.splits[v] = split_local(g, id, fw[v], delta[v]);
        const Normalized x1 = normalize(g, id, out.trace[1].data[v]);
        out.c0[v] = x1.c0;
        x1_data[v] = x1.data;
        boxes.push_back(GraphPoint::aux(vertex_box(id)));
        if (out.splits[v].q1 > 0.0) kernels.emplace(id, revival_kernel(fw[v], out.splits[v]));
    }

    try {
        out.x1 = build_glued(graph, x1_data, epsilon);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("stage X1: ") + e.what());
    }
    out.x1.label = "X1";
    out.x3 = kill_on_set(out.x1, boxes, "X3");
    out.x4 = revive_with_kernel(out.x3, std::move(kernels), "X4");
    out.x5 = kill_on_set(out.x4, {GraphPoint::aux(kGlobalBox)}, "X5");
    return out;
}

}  // namespace fwg
