#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fwgraph/fw_data.hpp"

namespace fwg {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Boundary data by names, weights kept exact.
struct AtomDocument {
    std::optional<std::string> vertex;
    std::optional<std::string> edge;
    double coordinate = 0.0;
    Rational weight;

    friend bool operator==(const AtomDocument&, const AtomDocument&) = default;
};

struct BoundaryDocument {
    Rational p1;
    std::map<std::string, Rational> p2;
    Rational p3;
    std::vector<AtomDocument> p4;

    friend bool operator==(const BoundaryDocument&, const BoundaryDocument&) = default;
};

struct StartDocument {
    std::optional<std::string> vertex;
    std::optional<std::string> edge;
    double coordinate = 0.0;

    friend bool operator==(const StartDocument&, const StartDocument&) = default;
};

struct RunParameters {
    double epsilon = 0.05;
    double horizon = 1.0;
    std::size_t paths = 100;
    std::uint64_t seed = 1;
    std::string backend = "direct";
    std::optional<StartDocument> start;
    std::map<std::string, double> delta;
    std::vector<double> alpha{0.5, 1.0, 2.0};
    std::string out = "out";
    int workers = 1;

    friend bool operator==(const RunParameters&, const RunParameters&) = default;
};

struct RunConfig {
    GraphDocument graph;
    std::map<std::string, BoundaryDocument> boundary;
    RunParameters run;
    nlohmann::json expect = nlohmann::json::object();
};

bool operator==(const GraphDocument& a, const GraphDocument& b);
bool operator==(const RunConfig& a, const RunConfig& b);

RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& config);

// Exact weight as JSON: a number when it is exactly a double, else "n/d".
nlohmann::json weight_json(const Rational& w);
Rational weight_from_json(const nlohmann::json& j, const std::string& field);

// Resolved configuration: graph, exact and double boundary data.
struct Model {
    std::shared_ptr<const MetricGraph> graph;
    ExactFWAssignment exact;
    FWAssignment fw;
    std::vector<double> delta;
    GraphPoint start;
};

// Builds the model and collects every violation instead of stopping at the
// first. model is empty when the graph itself is invalid.
struct ModelCheck {
    std::optional<Model> model;
    ValidationReport report;
};
ModelCheck check_model(const RunConfig& config);
Model build_model(const RunConfig& config);  // throws ConfigError

nlohmann::json fw_json(const MetricGraph& g, const BasicFWData<double>& d);
nlohmann::json fw_json(const MetricGraph& g, const BasicFWData<Rational>& d);

}  // namespace fwg
