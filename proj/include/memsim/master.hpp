#ifndef MEMSIM_MASTER_HPP
#define MEMSIM_MASTER_HPP

#include <stdexcept>
#include <vector>

#include "memsim/statespace.hpp"
#include "memsim/waveform.hpp"

namespace memsim {

/// Runtime failure of a solver (stiffness beyond the reducible range, step
/// underflow, capacity limits).
class SimulationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Master-equation generator at one source voltage: entry (a,b) holds the
/// rate of probability flow b -> a for a != b, the diagonal holds the
/// negated total outflow, so every column sums to zero.
struct GeneratorMatrix {
    int dim = 0;
    std::vector<double> q;  // row-major

    double at(int a, int b) const { return q[static_cast<std::size_t>(a) * dim + b]; }
    double& at(int a, int b) { return q[static_cast<std::size_t>(a) * dim + b]; }
};

GeneratorMatrix generator_matrix(const StateSpace& space, double v_source);

/// Column sum in the construction order (off-diagonals by ascending row, then
/// the diagonal); exactly 0.0 for matrices built by generator_matrix.
double generator_column_sum(const GeneratorMatrix& g, int column);

struct ProbabilityVector {
    std::vector<double> p;
};

/// Delta distribution on the declared initial configuration.
ProbabilityVector initial_probability(const StateSpace& space);

/// Occupation probabilities over time. For lumped spaces the entries are
/// orbit totals, so every snapshot sums to one either way.
struct ProbabilityTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> probabilities;
    std::vector<double> source_values;

    /// Ultra-fast states removed by quasi-steady-state reduction before
    /// integration (their occupancies are backfilled from the instantaneous
    /// influx). Empty when the system was integrated as-is.
    std::vector<int> reduced_states;
    double reduction_rate_cut = 0.0;   // outflow threshold used, 0 = none
    double max_reduced_occupancy = 0.0;
};

/// Propagates dp/dt = Q p for a constant drive by uniformization
/// (Poisson-weighted powers of the jump matrix, truncation below 1e-12 per
/// entry, positivity preserved by construction). States whose outflow makes
/// the Poisson sum intractable are first removed by exact-flux
/// quasi-steady-state reduction; the trajectory records that.
ProbabilityTrajectory solve_dc(const StateSpace& space, double v_dc, const ProbabilityVector& p0,
                               const std::vector<double>& times, double work_budget = 5e7);

/// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) integration of
/// dp/dt = Q(V(t)) p. Local error per step is kept below tol, the step size
/// below 1/(20 * max outflow) and, for sine drive, below 1/(1000 f).
/// Steps producing entries under -tol are retried smaller; residual negatives
/// are clamped and the vector renormalized.
ProbabilityTrajectory solve_transient(const StateSpace& space, const Waveform& wave,
                                      const ProbabilityVector& p0, double t_stop,
                                      double tol = 1e-8, int output_points = 2000);

}  // namespace memsim

#endif
