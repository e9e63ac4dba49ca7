#include "fwgraph/process.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace fwg {

namespace {

Trajectory hold_forever(const GraphPoint& start, double t0, double horizon) {
    Trajectory tr;
    tr.events.push_back({t0, EventKind::Start, start, {}});
    if (horizon > t0) {
        tr.events.push_back({t0, EventKind::Hold, start, {}});
        tr.events.push_back({horizon, EventKind::Horizon, start, {}});
    }
    return tr;
}

bool terminal(EventKind k) { return k == EventKind::Kill || k == EventKind::Horizon || k == EventKind::Barrier; }

struct KernelTable {
    std::vector<GraphPoint> targets;
    std::vector<double> cumulative;
};

}  // namespace

ProcessGenerator direct_process(std::shared_ptr<const MetricGraph> graph, const FWAssignment& fw, double epsilon,
                                std::string label) {
    auto sim = std::make_shared<const DirectSimulator>(graph, fw, epsilon);
    ProcessGenerator p;
    p.graph = std::move(graph);
    p.label = std::move(label);
    for (const auto& d : fw) {
        for (const auto& a : d.p4) {
            if (a.target.is_aux() && std::find(p.aux.begin(), p.aux.end(), a.target.aux_id()) == p.aux.end()) {
                p.aux.push_back(a.target.aux_id());
            }
        }
    }
    p.run_fn = [sim](const GraphPoint& start, double t0, double horizon, RandomStream& stream,
                     std::span<const Barrier> barriers) { return sim->run(start, t0, horizon, stream, barriers); };
    return p;
}

ProcessGenerator kill_on_set(const ProcessGenerator& p, std::vector<GraphPoint> absorbing, std::string label) {
    ProcessGenerator out;
    out.graph = p.graph;
    out.label = std::move(label);
    for (AuxId a : p.aux) {
        if (std::find(absorbing.begin(), absorbing.end(), GraphPoint::aux(a)) == absorbing.end()) out.aux.push_back(a);
    }
    out.run_fn = [inner = p, F = std::move(absorbing)](const GraphPoint& start, double t0, double horizon,
                                                       RandomStream& stream, std::span<const Barrier> barriers) {
        auto in_f = [&](const GraphPoint& q) { return std::find(F.begin(), F.end(), q) != F.end(); };
        if (in_f(start)) {
            Trajectory tr;
            tr.events.push_back({t0, EventKind::Start, start, {}});
            tr.events.push_back({t0, EventKind::Kill, start, {}});
            return tr;
        }
        Trajectory tr = inner.run(start, t0, horizon, stream, barriers);
        for (std::size_t i = 0; i < tr.events.size(); ++i) {
            const Event& e = tr.events[i];
            if ((e.kind == EventKind::Jump || e.kind == EventKind::Revival) && in_f(e.position)) {
                const Event kill{e.t, EventKind::Kill, e.origin, {}};
                tr.events.resize(i);
                tr.events.push_back(kill);
                break;
            }
        }
        return tr;
    };
    return out;
}

ProcessGenerator attach_fake_cemetery(const ProcessGenerator& p, std::map<VertexId, AuxId> targets,
                                      std::string label) {
    ProcessGenerator out;
    out.graph = p.graph;
    out.label = std::move(label);
    out.aux = p.aux;
    for (const auto& [v, a] : targets) {
        if (std::find(out.aux.begin(), out.aux.end(), a) == out.aux.end()) out.aux.push_back(a);
    }
    out.run_fn = [inner = p, targets = std::move(targets)](const GraphPoint& start, double t0, double horizon,
                                                           RandomStream& stream, std::span<const Barrier> barriers) {
        if (start.is_aux()) return hold_forever(start, t0, horizon);
        Trajectory tr = inner.run(start, t0, horizon, stream, barriers);
        if (!tr.killed()) return tr;
        const Event kill = tr.events.back();
        auto it = kill.position.is_vertex() ? targets.find(kill.position.vertex()) : targets.end();
        if (it == targets.end()) throw std::runtime_error("kill at a location without a fake cemetery");
        const GraphPoint box = GraphPoint::aux(it->second);
        tr.events.back() = {kill.t, EventKind::Jump, box, kill.position};
        tr.events.push_back({kill.t, EventKind::Hold, box, {}});
        tr.events.push_back({horizon, EventKind::Horizon, box, {}});
        return tr;
    };
    return out;
}

ProcessGenerator revive_with_kernel(const ProcessGenerator& p, std::map<VertexId, JumpMeasure> kernels,
                                    std::string label) {
    std::map<VertexId, KernelTable> tables;
    std::vector<AuxId> aux = p.aux;
    for (const auto& [v, k] : kernels) {
        KernelTable t;
        double acc = 0.0;
        for (const auto& a : k) {
            acc += a.weight;
            t.targets.push_back(a.target);
            t.cumulative.push_back(acc);
            if (a.target.is_aux() && std::find(aux.begin(), aux.end(), a.target.aux_id()) == aux.end()) {
                aux.push_back(a.target.aux_id());
            }
        }
        if (t.targets.empty()) throw std::invalid_argument("empty revival kernel");
        tables.emplace(v, std::move(t));
    }
    ProcessGenerator out;
    out.graph = p.graph;
    out.aux = std::move(aux);
    out.label = std::move(label);
    const std::uint64_t salt = hash_label(out.label);
    out.run_fn = [inner = p, tables = std::move(tables), salt](const GraphPoint& start, double t0, double horizon,
                                                               RandomStream& stream,
                                                               std::span<const Barrier> barriers) {
        Trajectory tr = inner.run(start, t0, horizon, stream, barriers);
        for (std::uint64_t k = 1; tr.killed(); ++k) {
            const Event kill = tr.events.back();
            tr.events.pop_back();
            auto it = kill.position.is_vertex() ? tables.find(kill.position.vertex()) : tables.end();
            if (it == tables.end()) throw std::runtime_error("kill at a location without a revival kernel");
            RandomStream s = stream.child(salt, k);
            const auto& table = it->second;
            const GraphPoint target = table.targets[s.categorical(table.cumulative.data(), table.cumulative.size())];
            tr.events.push_back({kill.t, EventKind::Revival, target, kill.position});
            Trajectory copy = inner.run(target, kill.t, horizon, s, barriers);
            tr.transfers += copy.transfers;
            tr.events.insert(tr.events.end(), copy.events.begin() + 1, copy.events.end());
        }
        return tr;
    };
    return out;
}

ProcessGenerator decompose_and_glue(std::shared_ptr<const SubgraphDecomposition> dec, const ProcessGenerator& minus,
                                    const ProcessGenerator& plus, std::string label) {
    if (minus.graph->vertex_count() != dec->side(Side::Minus).graph->vertex_count() ||
        plus.graph->vertex_count() != dec->side(Side::Plus).graph->vertex_count()) {
        throw std::invalid_argument("glue: generators do not live on the decomposition sides");
    }
    ProcessGenerator out;
    out.graph = dec->parent_ptr();
    out.label = std::move(label);
    out.aux = minus.aux;
    for (AuxId a : plus.aux) {
        if (std::find(out.aux.begin(), out.aux.end(), a) == out.aux.end()) out.aux.push_back(a);
    }

    // Stop sets at the ends of the shadow edges.
    std::array<std::vector<Barrier>, 2> own;
    for (Side s : {Side::Minus, Side::Plus}) {
        for (EdgeId i : dec->all_crossing_edges()) {
            own[slot(s)].push_back({dec->shadow_edge(s, i), dec->parent().edge(i).length, true});
        }
    }

    const std::uint64_t salt = hash_label(out.label);
    out.run_fn = [dec, sides = std::array<ProcessGenerator, 2>{minus, plus}, own, salt](
                     const GraphPoint& start, double t0, double horizon, RandomStream& stream,
                     std::span<const Barrier> barriers) {
        if (start.is_aux() || start.is_cemetery()) return hold_forever(start, t0, horizon);
        const MetricGraph& g = dec->parent();

        std::array<std::vector<Barrier>, 2> local = own;
        for (const Barrier& b : barriers) {
            if (dec->is_crossing(b.edge)) {
                for (Side s : {Side::Minus, Side::Plus}) {
                    const EdgeId e = dec->shadow_edge(s, b.edge);
                    const EdgeOrigin& o = dec->side(s).edge_to_parent[index(e)];
                    if (o.reversed) {
                        local[slot(s)].push_back({e, o.shadow_length - b.threshold, !b.upward});
                    } else {
                        local[slot(s)].push_back({e, b.threshold, b.upward});
                    }
                }
            } else {
                const Side s = dec->side_of(g.edge(b.edge).from);
                local[slot(s)].push_back({*dec->side(s).edge_from_parent[index(b.edge)], b.threshold, b.upward});
            }
        }

        Side side;
        if (start.is_vertex()) {
            side = dec->side_of(start.vertex());
        } else {
            side = dec->side_of(g.edge(start.edge()).from);
        }
        GraphPoint local_start = dec->phi(side, start);

        Trajectory tr;
        double t = t0;
        for (std::uint64_t k = 0;; ++k) {
            RandomStream child = k == 0 ? RandomStream() : stream.child(salt, k);
            RandomStream& s = k == 0 ? stream : child;
            const Trajectory part = sides[slot(side)].run(local_start, t, horizon, s, local[slot(side)]);
            tr.transfers += part.transfers;
            bool transferred = false;
            for (std::size_t i = (k == 0 ? 0 : 1); i < part.events.size(); ++i) {
                const Event& e = part.events[i];
                if (e.kind == EventKind::Barrier && dec->in_excrescent(side, e.position)) {
                    const EdgeId crossing = dec->side(side).edge_to_parent[index(e.position.edge())].parent;
                    const VertexId target = dec->transfer_target(side, crossing);
                    tr.events.push_back({e.t, EventKind::EdgeExit, GraphPoint::at_vertex(target), {}});
                    ++tr.transfers;
                    side = opposite(side);
                    local_start = dec->phi(side, GraphPoint::at_vertex(target));
                    t = e.t;
                    transferred = true;
                    break;
                }
                if (dec->in_excrescent(side, e.position)) {
                    throw std::runtime_error("jump onto the excrescent part of a shadow edge");
                }
                tr.events.push_back({e.t, e.kind, dec->psi(side, e.position), dec->psi(side, e.origin)});
                if (terminal(e.kind)) return tr;
            }
            if (!transferred) return tr;
        }
    };
    return out;
}

}  // namespace fwg
