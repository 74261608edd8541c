#ifndef MEMSIM_MCSIM_HPP
#define MEMSIM_MCSIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "memsim/statespace.hpp"
#include "memsim/waveform.hpp"

namespace memsim {

struct TrialEvent {
    double time = 0.0;
    int memristor = 0;
    Direction dir = Direction::Up;
};

/// One stochastic realization of the network. Deterministic in (inputs, seed).
struct TrialPath {
    std::vector<TrialEvent> events;
    NetworkState final_state;
    std::uint64_t seed = 0;
};

struct EnsembleStats {
    int trials = 0;
    std::vector<double> report_times;
    std::vector<std::string> labels;               // reporting-state labels
    std::vector<std::vector<double>> empirical_p;  // [report time][state]
    std::vector<double> mean_current;              // amperes, per report time
    std::vector<double> current_stderr;
    std::vector<double> switching_times;  // per-trial first passage to all-on (dc)
};

/// Fixed-step Bernoulli scheme: within each step every admissible transition
/// fires independently with probability rate * dt; at most one fires, chosen
/// proportionally when several do. The step is halved on the fly whenever
/// total rate * dt would exceed rate_dt_cap.
TrialPath mc_trial(const StateSpace& full_space, const Waveform& wave, std::uint64_t seed,
                   double dt, double t_stop, double rate_dt_cap = 0.1);
TrialPath mc_trial(const CircuitSpec& spec, const Waveform& wave, std::uint64_t seed, double dt,
                   double t_stop, double rate_dt_cap = 0.1);

/// Exact continuous-time sampling for constant drive: exponential waiting
/// times with the current state's total outflow; terminates at an absorbing
/// state (or after t_stop).
TrialPath gillespie_dc(const StateSpace& full_space, double v_dc, std::uint64_t seed,
                       double t_stop);
TrialPath gillespie_dc(const CircuitSpec& spec, double v_dc, std::uint64_t seed, double t_stop);

struct McOptions {
    double dt = 0.0;            // fixed-step size; 0 derives one from the peak rate
    double rate_dt_cap = 0.02;  // per-step bound on total rate * dt
    bool lumped_report = true;  // aggregate occupancies over symmetry orbits
};

/// Runs independent trials (Gillespie for dc, fixed-step otherwise) with
/// per-trial seeds derived from the master seed, and aggregates occupation
/// frequencies, current statistics and first-passage times.
EnsembleStats mc_ensemble(const CircuitSpec& spec, const Waveform& wave, int trials,
                          std::uint64_t seed, const std::vector<double>& report_times,
                          const McOptions& options = {});

}  // namespace memsim

#endif
