#ifndef MEMSIM_OBSERVABLES_HPP
#define MEMSIM_OBSERVABLES_HPP

#include <utility>
#include <vector>

#include "memsim/master.hpp"
#include "memsim/statespace.hpp"

namespace memsim {

/// Derived per-sample quantities of a trajectory.
struct ObservableSeries {
    std::vector<double> times;
    std::vector<double> mean_current;     // amperes
    std::vector<double> source_voltage;   // volts
    std::vector<double> switch_time_accumulator;  // running first-passage integral, seconds
};

/// Probability-weighted network current at one instant. Orbit multiplicities
/// are already carried by the orbit-total probabilities, so this reduces to
/// sum_state p_state * conductance_state * v_source.
double mean_current(const StateSpace& space, const ProbabilityVector& p, double v_source);

/// Closed-form mean first-passage time (all-off to all-on) for n identical
/// binary memristors in series under positive dc drive:
/// sum_j 1/((n-j) gamma_j). Returns +inf when the drive produces no switching.
double mean_switching_time_analytic(int n, const MemristorModel& model, double v_dc);

/// The per-stage terms 1/((n-j) gamma_j) of the same sum, j = 0..n-1.
std::vector<double> switching_time_stages(int n, const MemristorModel& model, double v_dc);

struct SwitchingTimeEstimate {
    double mean = 0.0;             // integral plus tail correction
    double tail_correction = 0.0;  // (1 - absorbed mass) * truncation time
    double absorbed_mass = 0.0;    // mass in the all-on state at truncation
};

/// Trapezoidal evaluation of the first-passage integral
/// int t * (influx into the absorbing all-on state) dt over a dc trajectory,
/// truncated once the absorbing state holds mass 1 - 1e-6.
SwitchingTimeEstimate mean_switching_time_numeric(const ProbabilityTrajectory& traj,
                                                  const StateSpace& space);

/// (source voltage, mean current) pairs across the trajectory samples.
std::vector<std::pair<double, double>> iv_curve(const ProbabilityTrajectory& traj,
                                                const StateSpace& space);

/// Shoelace area of the closed (V, I) polygon.
double loop_area(const std::vector<std::pair<double, double>>& points);

ObservableSeries observable_series(const ProbabilityTrajectory& traj, const StateSpace& space);

struct Plateau {
    double level = 0.0;
    double t_begin = 0.0;
    double t_end = 0.0;
};

/// Maximal sample runs whose spread stays within rel_flatness of their level;
/// consecutive runs at the same level merge. Runs shorter than min_samples
/// are dropped.
std::vector<Plateau> detect_plateaus(const std::vector<double>& times,
                                     const std::vector<double>& values,
                                     double rel_flatness = 0.01, int min_samples = 10);

}  // namespace memsim

#endif
