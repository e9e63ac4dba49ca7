#include <iostream>

#include "CLI11.hpp"
#include "fwgraph/commands.hpp"

int main(int argc, char** argv) {
    fwg::CommandOptions o;
    CLI::App app{"Brownian motion on metric graphs with Feller-Wentzell vertex conditions"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* c) {
        c->add_option("--config", o.config, "configuration file")->required()->check(CLI::ExistingFile);
        c->add_option("--backend", o.backend, "direct, pipeline or both")
            ->check(CLI::IsMember({"direct", "pipeline", "both"}));
        c->add_option("--paths", o.paths, "number of paths");
        c->add_option("--seed", o.seed, "random seed");
        c->add_option("--epsilon", o.epsilon, "vertex shell radius");
        c->add_option("--horizon", o.horizon, "time horizon");
        c->add_option("--out", o.out, "output directory");
        c->add_option("--workers", o.workers, "worker threads, 0 for all cores");
    };

    auto* validate = app.add_subcommand("validate", "check graph, boundary data and parameters");
    auto* simulate = app.add_subcommand("simulate", "write trajectories and a summary");
    auto* verify = app.add_subcommand("verify", "run the statistical checks");
    auto* trace = app.add_subcommand("fw-trace", "print the staged boundary data of the construction");
    auto* decompose = app.add_subcommand("decompose", "print the split into two subgraphs");
    for (auto* c : {validate, simulate, verify, trace, decompose}) common(c);
    trace->add_flag("--exact-rational", o.exact_rational, "exact rational arithmetic");
    decompose->add_option("--minus", o.minus, "vertices of the minus side (default: all but the last)")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? fwg::kExitOk : fwg::kExitInvalid;
    }

    if (*validate) return fwg::cmd_validate(o, std::cout, std::cerr);
    if (*simulate) return fwg::cmd_simulate(o, std::cout, std::cerr);
    if (*verify) return fwg::cmd_verify(o, std::cout, std::cerr);
    if (*trace) return fwg::cmd_fw_trace(o, std::cout, std::cerr);
    return fwg::cmd_decompose(o, std::cout, std::cerr);
}
