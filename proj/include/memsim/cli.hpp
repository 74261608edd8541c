#ifndef MEMSIM_CLI_HPP
#define MEMSIM_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

namespace memsim {

/// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitRuntimeError = 2;

struct RunConfig {
    std::string circuit_path;
    double t_stop = 0.0;  // simulation horizon, seconds
    double tol = 1e-8;
    int points = 2000;       // output samples
    std::string out = "-";   // "-" writes to stdout
    long trials = 10000;     // mc
    std::uint64_t seed = 1;  // mc
    double freq_override = 0.0;
    bool full_space = false;  // disable symmetry lumping
    double mc_dt = 0.0;       // fixed-step size for ac mc (0 = auto)
    // emit-spice transient window
    double spice_t_stop = 0.1;
    double spice_t_record = 0.05;
    double spice_max_step = 1e-6;
};

/// Master-equation run; writes CSV columns
/// t,<state probabilities>,V_source,I_mean,T_accum.
int cmd_simulate(const RunConfig& cfg, std::ostream& diag);

/// Monte Carlo ensemble; writes empirical probabilities, the mean current
/// with its standard error, and (for dc drives) a switching-time summary.
int cmd_mc(const RunConfig& cfg, std::ostream& diag);

/// Writes the LTspice netlist for the circuit.
int cmd_emit_spice(const RunConfig& cfg, std::ostream& diag);

/// Closed-form switching-time report for series-identical binary circuits
/// under dc drive.
int cmd_analytic(const RunConfig& cfg, std::ostream& diag);

}  // namespace memsim

#endif
