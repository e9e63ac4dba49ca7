#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fwgraph/config.hpp"
#include "fwgraph/statcheck.hpp"

namespace fwg {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitInvalid = 2 };

// Command-line overrides on top of the configuration file.
struct CommandOptions {
    std::string config;
    std::optional<std::string> backend;
    std::optional<std::size_t> paths;
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon;
    std::optional<double> horizon;
    std::optional<std::string> out;
    std::optional<int> workers;
    bool exact_rational = false;
    std::vector<std::string> minus;  // decompose only
};

void apply_overrides(RunConfig& config, const CommandOptions& options);

// Each command loads the configuration, reports errors on err and returns
// an ExitCode.
int cmd_validate(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_fw_trace(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_decompose(const CommandOptions& options, std::ostream& out, std::ostream& err);

// The same commands on an already parsed configuration.
int run_validate(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_fw_trace(const RunConfig& config, bool exact, std::ostream& out, std::ostream& err);
int run_decompose(const RunConfig& config, const std::vector<std::string>& minus, std::ostream& out,
                  std::ostream& err);

// Reports produced by verify, in output order.
std::vector<TestReport> verify_reports(const RunConfig& config, const Model& model);

// Summary of a trajectory set as written by simulate.
nlohmann::json trajectory_summary(const std::vector<Trajectory>& paths, const std::string& backend,
                                  const RunParameters& run);

std::string format_table(const std::vector<TestReport>& reports);

}  // namespace fwg
