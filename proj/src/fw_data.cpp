#include "fwgraph/fw_data.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fwg {

namespace {

double distance_from(const MetricGraph& g, const std::vector<double>& dist, VertexId v, const GraphPoint& p) {
    if (p.is_aux() || p.is_cemetery()) return kInfinity;
    if (p.is_vertex()) return dist.at(index(p.vertex()));
    const Edge& e = g.edge(p.edge());
    double d = dist.at(index(e.from)) + p.coordinate();
    if (e.internal()) d = std::min(d, dist.at(index(*e.to)) + (e.length - p.coordinate()));
    (void)v;
    return d;
}

template <class W>
bool is_zero(const W& w) {
    return w == W(0);
}

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(15);
    os << x;
    return os.str();
}

}  // namespace

template <class W>
void BasicJumpMeasure<W>::add(const GraphPoint& target, const W& weight) {
    if (weight < W(0)) throw std::invalid_argument("negative jump weight");
    if (is_zero(weight)) return;
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), target,
                               [](const Atom& a, const GraphPoint& t) { return a.target < t; });
    if (it != atoms_.end() && it->target == target) {
        it->weight += weight;
    } else {
        atoms_.insert(it, Atom{target, weight});
    }
}

template <class W>
W BasicJumpMeasure<W>::mass() const {
    W m{};
    for (const auto& a : atoms_) m += a.weight;
    return m;
}

template <class W>
W BasicJumpMeasure<W>::mass_on(std::span<const GraphPoint> points) const {
    W m{};
    for (const auto& a : atoms_) {
        if (std::find(points.begin(), points.end(), a.target) != points.end()) m += a.weight;
    }
    return m;
}

template <class W>
BasicJumpMeasure<W> BasicJumpMeasure<W>::without(std::span<const GraphPoint> points) const {
    BasicJumpMeasure out;
    for (const auto& a : atoms_) {
        if (std::find(points.begin(), points.end(), a.target) == points.end()) out.atoms_.push_back(a);
    }
    return out;
}

template <class W>
BasicJumpMeasure<W> BasicJumpMeasure<W>::scaled(const W& factor) const {
    BasicJumpMeasure out;
    for (const auto& a : atoms_) out.add(a.target, a.weight * factor);
    return out;
}

template <class W>
BasicJumpMeasure<W>& BasicJumpMeasure<W>::operator+=(const BasicJumpMeasure& other) {
    for (const auto& a : other.atoms_) add(a.target, a.weight);
    return *this;
}

template <class W>
BasicFWData<double> to_double_data(const BasicFWData<W>& d) {
    BasicFWData<double> out;
    out.p1 = to_double(d.p1);
    for (const auto& [e, w] : d.p2) out.p2[e] = to_double(w);
    out.p3 = to_double(d.p3);
    for (const auto& a : d.p4) out.p4.add(a.target, to_double(a.weight));
    return out;
}

template <class W>
BasicFWAssignment<double> to_double_assignment(const BasicFWAssignment<W>& a) {
    BasicFWAssignment<double> out;
    out.reserve(a.size());
    for (const auto& d : a) out.push_back(to_double_data(d));
    return out;
}

double atom_distance(const MetricGraph& g, VertexId v, const GraphPoint& target) {
    if (target.is_aux() || target.is_cemetery()) return kInfinity;
    return distance_from(g, vertex_distances(g, GraphPoint::at_vertex(v)), v, target);
}

template <class W>
double normalization_sum(const MetricGraph& g, VertexId v, const BasicFWData<W>& d) {
    double s = to_double(d.p1) + to_double(d.reflection()) + to_double(d.p3);
    if (d.p4.empty()) return s;
    const auto dist = vertex_distances(g, GraphPoint::at_vertex(v));
    for (const auto& a : d.p4) {
        const double r = distance_from(g, dist, v, a.target);
        s += to_double(a.weight) * (std::isinf(r) ? 1.0 : -std::expm1(-r));
    }
    return s;
}

template <class W>
ValidationReport validate_fw(const MetricGraph& g, const BasicFWAssignment<W>& fw) {
    ValidationReport report;
    if (fw.size() != g.vertex_count()) {
        report.add("boundary data given for " + std::to_string(fw.size()) + " vertices, graph has " +
                   std::to_string(g.vertex_count()));
        return report;
    }
    for (std::size_t i = 0; i < fw.size(); ++i) {
        const VertexId v{static_cast<std::uint32_t>(i)};
        const auto& d = fw[i];
        const std::string name = "vertex '" + g.vertex_name(v) + "'";
        bool structural_ok = true;
        if (d.p1 < W(0) || d.p3 < W(0)) {
            report.add(name + ": negative weight");
            structural_ok = false;
        }
        for (const auto& [e, w] : d.p2) {
            if (index(e) >= g.edge_count()) {
                report.add(name + ": p2 refers to an unknown edge");
                structural_ok = false;
                continue;
            }
            const auto inc = g.incident(v);
            if (std::none_of(inc.begin(), inc.end(), [&](const Incidence& x) { return x.edge == e; })) {
                report.add(name + ": p2 edge '" + g.edge(e).name + "' is not incident");
                structural_ok = false;
            }
            if (w < W(0)) {
                report.add(name + ": negative p2 weight on '" + g.edge(e).name + "'");
                structural_ok = false;
            }
        }
        for (const auto& a : d.p4) {
            if (a.target == GraphPoint::at_vertex(v)) {
                report.add(name + ": jump atom at the vertex itself");
                structural_ok = false;
            } else if (!a.target.is_aux() && !g.contains(a.target)) {
                report.add(name + ": jump atom outside the graph");
                structural_ok = false;
            }
        }
        if (!structural_ok) continue;
        if (is_zero(d.reflection() + d.p3)) {
            report.add(name + ": pure-jump vertex unsupported (sum of p2 and p3 is zero)");
        }
        const double s = normalization_sum(g, v, d);
        if (!(std::abs(s - 1.0) <= kNormalizationTolerance)) {
            report.add(name + ": normalization sum " + fmt_double(s) + " differs from 1");
        }
    }
    return report;
}

Normalized normalize(const MetricGraph& g, VertexId v, const FWData& raw) {
    const double s = normalization_sum(g, v, raw);
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("degenerate boundary data: all weights zero");
    const double c0 = 1.0 / s;
    Normalized out;
    out.c0 = c0;
    out.data.p1 = raw.p1 * c0;
    for (const auto& [e, w] : raw.p2) out.data.p2[e] = w * c0;
    out.data.p3 = raw.p3 * c0;
    out.data.p4 = raw.p4.scaled(c0);
    return out;
}

template <class W>
LocalSplit<W> split_local(const MetricGraph& g, VertexId v, const BasicFWData<W>& d, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(delta < g.min_incident_length(v))) {
        throw std::invalid_argument("delta " + fmt_double(delta) + " at vertex '" + g.vertex_name(v) +
                                    "' is not smaller than every incident edge length");
    }
    LocalSplit<W> out;
    out.q1 = d.p1;
    const auto dist = vertex_distances(g, GraphPoint::at_vertex(v));
    for (const auto& a : d.p4) {
        if (distance_from(g, dist, v, a.target) < delta) {
            out.local.add(a.target, a.weight);
        } else {
            out.far.add(a.target, a.weight);
            out.q1 += a.weight;
        }
    }
    return out;
}

template <class W>
BasicFWData<W> kill_transform(const BasicFWData<W>& d, std::span<const GraphPoint> absorbing) {
    BasicFWData<W> out = d;
    out.p1 += d.p4.mass_on(absorbing);
    out.p4 = d.p4.without(absorbing);
    return out;
}

template <class W>
Revived<W> revive_transform(const BasicFWData<W>& d, const BasicJumpMeasure<W>& kernel) {
    if (is_zero(d.p1)) return {d, false};
    const W m = kernel.mass();
    bool unit;
    if constexpr (std::is_same_v<W, double>) {
        unit = std::abs(m - 1.0) <= kNormalizationTolerance;
    } else {
        unit = m == W(1);
    }
    if (!unit) throw std::invalid_argument("revival kernel must have total mass one");
    Revived<W> out{d, true};
    out.data.p4 += kernel.scaled(d.p1);
    out.data.p1 = W(0);
    return out;
}

template <class W>
BasicFWAssignment<W> glue_transform(const SubgraphDecomposition& dec, const BasicFWAssignment<W>& minus,
                                    const BasicFWAssignment<W>& plus) {
    const MetricGraph& g = dec.parent();
    BasicFWAssignment<W> out(g.vertex_count());
    for (Side s : {Side::Minus, Side::Plus}) {
        const SubgraphSide& part = dec.side(s);
        const auto& data = s == Side::Minus ? minus : plus;
        if (data.size() != part.graph->vertex_count()) {
            throw std::invalid_argument("glue: side data does not match the side graph");
        }
        for (std::size_t lv = 0; lv < data.size(); ++lv) {
            const auto& d = data[lv];
            const VertexId pv = part.vertex_to_parent[lv];
            if (!is_zero(d.p1)) {
                throw std::invalid_argument("glue: vertex '" + g.vertex_name(pv) + "' carries killing weight");
            }
            BasicFWData<W>& o = out[index(pv)];
            o.p3 = d.p3;
            for (const auto& [e, w] : d.p2) o.p2[part.edge_to_parent.at(index(e)).parent] += w;
            for (const auto& a : d.p4) o.p4.add(dec.psi(s, a.target), a.weight);
        }
    }
    return out;
}

template <class W>
BasicFWAssignment<W> pull_back(const SubgraphDecomposition& dec, Side s, const BasicFWAssignment<W>& parent) {
    const SubgraphSide& part = dec.side(s);
    const MetricGraph& g = dec.parent();
    BasicFWAssignment<W> out(part.graph->vertex_count());
    for (std::size_t lv = 0; lv < out.size(); ++lv) {
        const VertexId pv = part.vertex_to_parent[lv];
        const auto& d = parent.at(index(pv));
        auto& o = out[lv];
        o.p1 = d.p1;
        o.p3 = d.p3;
        for (const auto& [e, w] : d.p2) o.p2[*part.edge_from_parent.at(index(e))] = w;
        for (const auto& a : d.p4) {
            if (!dec.in_part(s, a.target)) {
                throw std::invalid_argument("jump atom of vertex '" + g.vertex_name(pv) + "' at " +
                                            g.describe(a.target) + " lies outside its subgraph");
            }
            o.p4.add(dec.phi(s, a.target), a.weight);
        }
    }
    return out;
}

template <class W>
BasicJumpMeasure<W> revival_kernel(const BasicFWData<W>& target, const LocalSplit<W>& split) {
    BasicJumpMeasure<W> k;
    if (is_zero(split.q1)) return k;
    k.add(GraphPoint::aux(kGlobalBox), target.p1 / split.q1);
    for (const auto& a : split.far) k.add(a.target, a.weight / split.q1);
    return k;
}

std::vector<double> default_deltas(const MetricGraph& g) {
    std::vector<double> out(g.vertex_count());
    const double fallback = std::isfinite(g.min_internal_length()) ? 0.45 * g.min_internal_length() : 1.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double m = g.min_incident_length(VertexId{static_cast<std::uint32_t>(i)});
        out[i] = std::isfinite(m) ? 0.45 * m : fallback;
    }
    return out;
}

template <class W>
std::vector<TraceStage<W>> pipeline_trace(const std::shared_ptr<const MetricGraph>& gp,
                                          const BasicFWAssignment<W>& target, const std::vector<double>& delta) {
    const MetricGraph& g = *gp;
    const std::size_t n = g.vertex_count();
    if (auto report = validate_fw(g, target); !report.ok()) {
        throw std::invalid_argument("stage input: " + report.violations.front());
    }
    if (delta.size() != n) throw std::invalid_argument("stage local_split: one delta per vertex required");

    const auto& labels = trace_labels();
    std::vector<TraceStage<W>> stages(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
        stages[k].label = labels[k];
        stages[k].data.resize(n);
    }
    auto fail = [&](std::size_t stage, std::size_t v, const std::exception& e) {
        throw std::invalid_argument("stage " + labels[stage] + ", vertex '" +
                                    g.vertex_name(VertexId{static_cast<std::uint32_t>(v)}) + "': " + e.what());
    };

    std::vector<LocalSplit<W>> splits(n);
    std::vector<GraphPoint> vertex_boxes;
    for (std::size_t v = 0; v < n; ++v) {
        const VertexId id{static_cast<std::uint32_t>(v)};
        vertex_boxes.push_back(GraphPoint::aux(vertex_box(id)));
        try {
            splits[v] = split_local(g, id, target[v], delta[v]);
        } catch (const std::exception& e) {
            fail(0, v, e);
        }
        auto& local = stages[0].data[v];
        local.p1 = splits[v].q1;
        local.p2 = target[v].p2;
        local.p3 = target[v].p3;
        local.p4 = splits[v].local;
        try {
            stages[1].data[v] = revive_transform(local, BasicJumpMeasure<W>{{vertex_boxes.back(), W(1)}}).data;
        } catch (const std::exception& e) {
            fail(1, v, e);
        }
    }

    if (n >= 2) {
        std::vector<VertexId> minus;
        for (std::size_t v = 0; v + 1 < n; ++v) minus.push_back(VertexId{static_cast<std::uint32_t>(v)});
        try {
            const SubgraphDecomposition dec(gp, minus);
            stages[2].data = glue_transform(dec, pull_back(dec, Side::Minus, stages[1].data),
                                            pull_back(dec, Side::Plus, stages[1].data));
        } catch (const std::exception& e) {
            throw std::invalid_argument("stage glued: " + std::string(e.what()));
        }
    } else {
        stages[2].data = stages[1].data;
    }

    const GraphPoint box[] = {GraphPoint::aux(kGlobalBox)};
    for (std::size_t v = 0; v < n; ++v) {
        stages[3].data[v] = kill_transform(stages[2].data[v], std::span<const GraphPoint>(vertex_boxes));
        try {
            stages[4].data[v] = revive_transform(stages[3].data[v], revival_kernel(target[v], splits[v])).data;
        } catch (const std::exception& e) {
            fail(4, v, e);
        }
        stages[5].data[v] = kill_transform(stages[4].data[v], std::span<const GraphPoint>(box));
    }

    for (auto& stage : stages) {
        stage.normalizer.resize(n);
        for (std::size_t v = 0; v < n; ++v) {
            stage.normalizer[v] = 1.0 / normalization_sum(g, VertexId{static_cast<std::uint32_t>(v)}, stage.data[v]);
        }
    }
    return stages;
}

#define FWG_INSTANTIATE(W)                                                                                     \
    template class BasicJumpMeasure<W>;                                                                        \
    template BasicFWData<double> to_double_data(const BasicFWData<W>&);                                       \
    template BasicFWAssignment<double> to_double_assignment(const BasicFWAssignment<W>&);                     \
    template double normalization_sum(const MetricGraph&, VertexId, const BasicFWData<W>&);                  \
    template ValidationReport validate_fw(const MetricGraph&, const BasicFWAssignment<W>&);                  \
    template LocalSplit<W> split_local(const MetricGraph&, VertexId, const BasicFWData<W>&, double);         \
    template BasicFWData<W> kill_transform(const BasicFWData<W>&, std::span<const GraphPoint>);              \
    template Revived<W> revive_transform(const BasicFWData<W>&, const BasicJumpMeasure<W>&);                 \
    template BasicFWAssignment<W> glue_transform(const SubgraphDecomposition&, const BasicFWAssignment<W>&,  \
                                                 const BasicFWAssignment<W>&);                               \
    template BasicFWAssignment<W> pull_back(const SubgraphDecomposition&, Side, const BasicFWAssignment<W>&); \
    template BasicJumpMeasure<W> revival_kernel(const BasicFWData<W>&, const LocalSplit<W>&);                \
    template std::vector<TraceStage<W>> pipeline_trace(const std::shared_ptr<const MetricGraph>&,           \
                                                       const BasicFWAssignment<W>&, const std::vector<double>&);

FWG_INSTANTIATE(double)
FWG_INSTANTIATE(Rational)

}  // namespace fwg
