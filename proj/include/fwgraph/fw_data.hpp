#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fwgraph/decomposition.hpp"
#include "fwgraph/graph.hpp"
#include "fwgraph/weight.hpp"

namespace fwg {

inline constexpr double kNormalizationTolerance = 1e-12;

template <class W>
struct BasicAtom {
    GraphPoint target;
    W weight{};

    friend bool operator==(const BasicAtom&, const BasicAtom&) = default;
};

// Finite atomic measure. Atoms are kept sorted by target; adding to an
// existing target sums the weights.
template <class W>
class BasicJumpMeasure {
public:
    using Atom = BasicAtom<W>;

    BasicJumpMeasure() = default;
    BasicJumpMeasure(std::initializer_list<Atom> atoms) {
        for (const auto& a : atoms) add(a.target, a.weight);
    }

    void add(const GraphPoint& target, const W& weight);

    const std::vector<Atom>& atoms() const { return atoms_; }
    auto begin() const { return atoms_.begin(); }
    auto end() const { return atoms_.end(); }
    bool empty() const { return atoms_.empty(); }
    std::size_t size() const { return atoms_.size(); }

    W mass() const;
    W mass_on(std::span<const GraphPoint> points) const;
    BasicJumpMeasure without(std::span<const GraphPoint> points) const;
    BasicJumpMeasure scaled(const W& factor) const;

    BasicJumpMeasure& operator+=(const BasicJumpMeasure& other);
    friend bool operator==(const BasicJumpMeasure&, const BasicJumpMeasure&) = default;

private:
    std::vector<Atom> atoms_;
};

template <class W>
struct BasicFWData {
    W p1{};
    std::map<EdgeId, W> p2;
    W p3{};
    BasicJumpMeasure<W> p4;

    W reflection() const {
        W s{};
        for (const auto& [e, w] : p2) s += w;
        return s;
    }

    friend bool operator==(const BasicFWData&, const BasicFWData&) = default;
};

// Indexed by vertex id of the graph the data lives on.
template <class W>
using BasicFWAssignment = std::vector<BasicFWData<W>>;

using JumpMeasure = BasicJumpMeasure<double>;
using FWData = BasicFWData<double>;
using FWAssignment = BasicFWAssignment<double>;
using ExactJumpMeasure = BasicJumpMeasure<Rational>;
using ExactFWData = BasicFWData<Rational>;
using ExactFWAssignment = BasicFWAssignment<Rational>;

template <class W>
BasicFWData<double> to_double_data(const BasicFWData<W>& d);
template <class W>
BasicFWAssignment<double> to_double_assignment(const BasicFWAssignment<W>& a);

// d(v, target) for every atom target; +inf for auxiliary points.
double atom_distance(const MetricGraph& g, VertexId v, const GraphPoint& target);

// p1 + sum p2 + p3 + sum w (1 - exp(-d(v, g))), evaluated in double.
template <class W>
double normalization_sum(const MetricGraph& g, VertexId v, const BasicFWData<W>& d);

// Structural checks plus normalization and the pure-jump exclusion.
template <class W>
ValidationReport validate_fw(const MetricGraph& g, const BasicFWAssignment<W>& fw);

struct Normalized {
    FWData data;
    double c0 = 1.0;
};
// Scales raw non-negative weights so that the normalization sum is one.
Normalized normalize(const MetricGraph& g, VertexId v, const FWData& raw);

template <class W>
struct LocalSplit {
    W q1{};
    BasicJumpMeasure<W> local;
    BasicJumpMeasure<W> far;
};
// Atoms strictly closer than delta stay local; q1 = p1 + far mass.
template <class W>
LocalSplit<W> split_local(const MetricGraph& g, VertexId v, const BasicFWData<W>& d, double delta);

template <class W>
BasicFWData<W> kill_transform(const BasicFWData<W>& d, std::span<const GraphPoint> absorbing);

template <class W>
struct Revived {
    BasicFWData<W> data;
    bool revived = false;  // false when p1 was already zero
};
template <class W>
Revived<W> revive_transform(const BasicFWData<W>& d, const BasicJumpMeasure<W>& kernel);

// Side-j data on the subgraph -> data on the parent graph. Requires zero
// killing on both sides.
template <class W>
BasicFWAssignment<W> glue_transform(const SubgraphDecomposition& dec, const BasicFWAssignment<W>& minus,
                                    const BasicFWAssignment<W>& plus);

// Parent data restricted to side j, expressed in side-j coordinates. Atoms
// must lie on side j or at auxiliary points.
template <class W>
BasicFWAssignment<W> pull_back(const SubgraphDecomposition& dec, Side s, const BasicFWAssignment<W>& parent);

template <class W>
struct TraceStage {
    std::string label;
    BasicFWAssignment<W> data;
    std::vector<double> normalizer;  // 1 / normalization sum, per vertex
};

inline const std::vector<std::string>& trace_labels() {
    static const std::vector<std::string> labels{"local_split", "fake_cemetery", "glued", "killed", "revived", "final"};
    return labels;
}

// Staged boundary data of the construction, ending with the target.
template <class W>
std::vector<TraceStage<W>> pipeline_trace(const std::shared_ptr<const MetricGraph>& g,
                                          const BasicFWAssignment<W>& target, const std::vector<double>& delta);

// Kernel used for the revival stage: (p1 * box + far part) / q1.
template <class W>
BasicJumpMeasure<W> revival_kernel(const BasicFWData<W>& target, const LocalSplit<W>& split);

// 0.45 times the shortest incident finite edge (or internal edge of the
// graph, or 1.0 when neither exists).
std::vector<double> default_deltas(const MetricGraph& g);

}  // namespace fwg
