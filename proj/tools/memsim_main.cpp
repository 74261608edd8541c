#include <CLI11.hpp>
#include <iostream>

#include "memsim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"memsim - master-equation simulator for stochastic memristor networks"};
    app.require_subcommand(1);

    memsim::RunConfig cfg;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("circuit", cfg.circuit_path, "circuit description (.mn file)")
            ->required();
        cmd->add_option("--out", cfg.out, "output path ('-' = stdout)");
        cmd->add_option("--freq", cfg.freq_override, "override the sine source frequency [Hz]");
        cmd->add_flag("--full-space", cfg.full_space, "disable symmetry lumping");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "integrate the master equation, CSV out");
    add_common(simulate);
    simulate->add_option("--tstop", cfg.t_stop, "simulation horizon [s]")->required();
    simulate->add_option("--tol", cfg.tol, "local error tolerance");
    simulate->add_option("--points", cfg.points, "number of output samples");

    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo ensemble, CSV out");
    add_common(mc);
    mc->add_option("--tstop", cfg.t_stop, "simulation horizon [s]")->required();
    mc->add_option("--trials", cfg.trials, "number of independent trials");
    mc->add_option("--seed", cfg.seed, "master seed");
    mc->add_option("--points", cfg.points, "number of report times");
    mc->add_option("--dt", cfg.mc_dt, "fixed step for ac trials [s] (0 = auto)");

    CLI::App* emit = app.add_subcommand("emit-spice", "write the LTspice netlist");
    add_common(emit);
    emit->add_option("--tstop", cfg.spice_t_stop, "transient stop time [s]");
    emit->add_option("--trecord", cfg.spice_t_record, "transient recording start [s]");
    emit->add_option("--maxstep", cfg.spice_max_step, "transient maximum step [s]");

    CLI::App* analytic = app.add_subcommand("analytic", "closed-form switching-time report");
    add_common(analytic);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? memsim::kExitInputError : memsim::kExitOk;
    }

    if (simulate->parsed()) return memsim::cmd_simulate(cfg, std::cerr);
    if (mc->parsed()) return memsim::cmd_mc(cfg, std::cerr);
    if (emit->parsed()) return memsim::cmd_emit_spice(cfg, std::cerr);
    if (analytic->parsed()) return memsim::cmd_analytic(cfg, std::cerr);
    return memsim::kExitInputError;
}
