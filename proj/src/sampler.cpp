#include "fwgraph/sampler.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fwgraph/exit_time.hpp"

namespace fwg {

VertexLaw::VertexLaw(const FWData& d, double epsilon) : epsilon_(epsilon), reflection_(d.reflection()) {
    double acc = 0.0;
    auto push = [&](Choice c, double w) {
        if (!(w > 0.0)) return;
        acc += w;
        choices_.push_back(c);
        cumulative_.push_back(acc);
    };
    if (reflection_ > 0.0) {
        for (const auto& [e, w] : d.p2) push({VertexOutcome::Kind::Edge, e, {}}, w);
        push({VertexOutcome::Kind::Kill, {}, {}}, epsilon * d.p1);
        for (const auto& a : d.p4) push({VertexOutcome::Kind::Jump, {}, a.target}, epsilon * a.weight);
        hold_mean_ = epsilon * d.p3 / reflection_;
    } else if (d.p3 > 0.0) {
        push({VertexOutcome::Kind::Kill, {}, {}}, d.p1);
        for (const auto& a : d.p4) push({VertexOutcome::Kind::Jump, {}, a.target}, a.weight);
        if (choices_.empty()) {
            trap_ = true;
        } else {
            hold_mean_ = d.p3 / acc;
        }
    } else {
        throw std::invalid_argument("pure-jump vertex unsupported (sum of p2 and p3 is zero)");
    }
}

VertexOutcome VertexLaw::sample(RandomStream& stream) const {
    VertexOutcome out;
    if (trap_) {
        out.kind = VertexOutcome::Kind::Trap;
        out.duration = kInfinity;
        return out;
    }
    const Choice& c = choices_[stream.categorical(cumulative_.data(), cumulative_.size())];
    out.kind = c.kind;
    out.edge = c.edge;
    out.target = c.target;
    if (reflection_ > 0.0) {
        out.duration = sample_ball_exit_time(epsilon_, stream);
        if (hold_mean_ > 0.0) out.duration += stream.exponential(hold_mean_);
    } else {
        out.duration = stream.exponential(hold_mean_);
    }
    return out;
}

VertexOutcome vertex_resolution(const FWData& d, double epsilon, RandomStream& stream) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    return VertexLaw(d, epsilon).sample(stream);
}

void check_epsilon(const MetricGraph& g, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be positive");
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(EdgeId{static_cast<std::uint32_t>(e)});
        if (!(2.0 * epsilon < ed.length)) {
            std::ostringstream os;
            os << "epsilon " << epsilon << " is not below half the length of edge '" << ed.name << "'";
            throw std::invalid_argument(os.str());
        }
    }
}

void check_epsilon(const MetricGraph& g, const FWAssignment& fw, double epsilon) {
    check_epsilon(g, epsilon);
    for (std::size_t v = 0; v < fw.size() && v < g.vertex_count(); ++v) {
        const VertexId id{static_cast<std::uint32_t>(v)};
        for (const auto& a : fw[v].p4) {
            if (!(atom_distance(g, id, a.target) > epsilon)) {
                std::ostringstream os;
                os << "epsilon " << epsilon << " is not below the distance from vertex '" << g.vertex_name(id)
                   << "' to its jump target " << g.describe(a.target);
                throw std::invalid_argument(os.str());
            }
        }
    }
}

DirectSimulator::DirectSimulator(std::shared_ptr<const MetricGraph> graph, FWAssignment fw, double epsilon,
                                 SimulationOptions options)
    : graph_(std::move(graph)), fw_(std::move(fw)), epsilon_(epsilon), options_(options) {
    if (auto report = validate_fw(*graph_, fw_); !report.ok()) {
        throw std::invalid_argument(report.violations.front());
    }
    check_epsilon(*graph_, fw_, epsilon_);
    laws_.reserve(fw_.size());
    for (const auto& d : fw_) laws_.emplace_back(d, epsilon_);
}

Trajectory DirectSimulator::run(const GraphPoint& start, double t0, double horizon, RandomStream& stream,
                                std::span<const Barrier> barriers) const {
    const MetricGraph& g = *graph_;
    if (!start.is_aux() && !g.contains(start)) throw std::invalid_argument("start point outside the state space");

    Trajectory tr;
    auto push = [&](double t, EventKind k, const GraphPoint& p, const GraphPoint& origin = {}) {
        if (tr.events.size() >= options_.max_events) throw std::runtime_error("event budget exceeded");
        tr.events.push_back({t, k, p, origin});
    };

    double t = t0;
    GraphPoint pos = start;
    push(t, EventKind::Start, pos);
    if (!(horizon > t0)) return tr;
    if (in_stop_set(barriers, pos)) {
        push(t, EventKind::Barrier, pos);
        return tr;
    }

    for (;;) {
        if (pos.is_aux() || pos.is_cemetery()) {
            push(t, EventKind::Hold, pos);
            push(horizon, EventKind::Horizon, pos);
            return tr;
        }
        if (pos.is_vertex()) {
            const VertexId v = pos.vertex();
            const VertexOutcome out = laws_[index(v)].sample(stream);
            if (out.kind == VertexOutcome::Kind::Trap) {
                push(t, EventKind::Hold, pos);
                push(horizon, EventKind::Horizon, pos);
                return tr;
            }
            if (t + out.duration > horizon) {
                push(horizon, EventKind::Horizon, pos);
                return tr;
            }
            t += out.duration;
            switch (out.kind) {
            case VertexOutcome::Kind::Edge:
                pos = g.point_along(v, out.edge, epsilon_);
                push(t, EventKind::VertexResolution, pos);
                break;
            case VertexOutcome::Kind::Kill:
                push(t, EventKind::Kill, pos);
                return tr;
            case VertexOutcome::Kind::Jump:
                push(t, EventKind::Jump, out.target, pos);
                pos = out.target;
                break;
            case VertexOutcome::Kind::Trap:
                break;
            }
            if (in_stop_set(barriers, pos)) {
                push(t, EventKind::Barrier, pos);
                return tr;
            }
            continue;
        }

        // Diffusion inside an edge up to the nearest breakpoint.
        const EdgeId e = pos.edge();
        const Edge& ed = g.edge(e);
        const double x = pos.coordinate();
        double lower = 0.0, upper = ed.length;
        for (const Barrier& b : barriers) {
            if (b.edge != e) continue;
            if (b.threshold < x) lower = std::max(lower, b.threshold);
            if (b.threshold > x) upper = std::min(upper, b.threshold);
        }
        const bool ray_step = std::isinf(upper);
        if (ray_step) upper = 2.0 * x - lower;

        const IntervalExit step = sample_interval_exit(x - lower, upper - lower, stream);
        if (t + step.time > horizon) {
            push(horizon, EventKind::Horizon, pos);
            return tr;
        }
        t += step.time;
        const double c = step.upper ? upper : lower;
        if (ray_step && step.upper) {
            pos = GraphPoint::on_edge(e, c);
            continue;
        }
        pos = g.canonical(e, c);
        if (pos.is_vertex()) {
            push(t, EventKind::EdgeExit, pos);
        } else if (in_stop_set(barriers, pos)) {
            push(t, EventKind::Barrier, pos);
            return tr;
        }
    }
}

Trajectory simulate_direct(std::shared_ptr<const MetricGraph> graph, const FWAssignment& fw, const GraphPoint& start,
                           double horizon, double epsilon, RandomStream& stream, std::span<const Barrier> barriers) {
    const DirectSimulator sim(std::move(graph), fw, epsilon);
    return sim.run(start, 0.0, horizon, stream, barriers);
}

}  // namespace fwg
