#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fwgraph/process.hpp"

namespace fwg {

struct ExitRecord {
    enum class Category : std::uint8_t { Edge, Kill, Jump, Horizon };
    Category category = Category::Horizon;
    EdgeId edge{};      // Edge exits
    GraphPoint target;  // Jump exits and final position otherwise
    double time = 0.0;
};

// Stop sets {distance from v >= radius} on the incident edges.
std::vector<Barrier> ball_barriers(const MetricGraph& g, VertexId v, double radius);

// First exit from the open ball B_radius(v): by diffusion, by killing or by
// a jump landing outside the ball. Jumps inside the ball continue.
ExitRecord first_exit(const ProcessGenerator& p, VertexId v, double radius, double horizon, RandomStream& stream);

std::vector<ExitRecord> sample_first_exits(const ProcessGenerator& p, VertexId v, double radius, double horizon,
                                           std::size_t n, const RandomStream& root, int workers);

// Stable label of an exit category, used to tabulate outcomes.
std::string category_key(const MetricGraph& g, const ExitRecord& r);

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

struct ExitLawEstimate {
    VertexId vertex{};
    double epsilon = 0.0;
    std::size_t paths = 0;
    std::size_t censored = 0;  // paths reaching the horizon inside the ball
    bool trap = false;
    Estimate mean_time;
    std::map<EdgeId, Estimate> edge_freq;
    Estimate kill_freq;
    std::map<GraphPoint, Estimate> jump_freq;
    // Inverted first-order contracts, then rescaled to normalization one.
    FWData recovered_raw;
    FWData recovered;
};

ExitLawEstimate empirical_exit_law(const ProcessGenerator& p, VertexId v, double epsilon, std::size_t n,
                                   const RandomStream& root, int workers = 1, double horizon = 100.0);

struct TestReport {
    std::string name;
    double statistic = 0.0;
    std::optional<double> p_value;
    bool pass = false;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    double runtime_s = 0.0;
    std::string detail;

    // One JSON object; runtime is left out so that the line is reproducible.
    std::string to_json() const;
};

// Exit from (a, b) on one edge, started at x; compares the two Laplace
// functionals with the sinh formulas.
TestReport laplace_exit_check(const ProcessGenerator& p, EdgeId edge, double a, double b, double x, double alpha,
                              std::size_t n, const RandomStream& root, int workers = 1);

double kolmogorov_q(double lambda);
TestReport ks_two_sample(std::vector<double> a, std::vector<double> b, double level);
TestReport chi_square_homogeneity(const std::map<std::string, std::size_t>& a,
                                  const std::map<std::string, std::size_t>& b, double level);
// Observed counts against category probabilities summing to one.
TestReport chi_square_goodness_of_fit(const std::map<std::string, std::size_t>& observed,
                                     const std::map<std::string, double>& expected, double level);

// Piecewise quadratic test function around v: on each incident edge
// f(r) = value + slope r + curvature r^2 / 2 in the distance r from v.
struct TestFunction {
    struct Branch {
        double value = 0.0;
        double slope = 0.0;
        double curvature = 0.0;
    };
    std::map<EdgeId, Branch> branches;
    double far_value = 0.0;  // value away from the incident edges

    double at(const MetricGraph& g, VertexId v, const GraphPoint& p) const;
};

struct ResidualPoint {
    double epsilon = 0.0;
    Estimate residual;
};

struct ResidualReport {
    TestReport report;
    std::vector<ResidualPoint> points;
    Estimate extrapolated;
    std::optional<double> prediction;  // empty when the residual diverges
};

// (E f(X_tau) - f(v)) / E tau across an epsilon schedule, Richardson
// extrapolated to zero and compared with the boundary-condition prediction.
ResidualReport generator_residual(const std::function<ProcessGenerator(double)>& make, const MetricGraph& g,
                                  const FWData& data, const TestFunction& f, VertexId v,
                                  const std::vector<double>& epsilons, std::size_t n, const RandomStream& root,
                                  int workers = 1, bool bias_band = true, double horizon = 100.0);

}  // namespace fwg
