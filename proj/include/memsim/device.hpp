#ifndef MEMSIM_DEVICE_HPP
#define MEMSIM_DEVICE_HPP

#include <string>
#include <vector>

namespace memsim {

/// Parameters of one directed switching edge: the rate at device voltage v
/// is 1 / (tau * exp(-|v|/v_scale)) on the active sign of v.
struct RateEdgeParams {
    double tau = 0.0;      // seconds
    double v_scale = 0.0;  // volts
};

/// A discrete-state memristor. State 0 is the off-state (highest resistance),
/// state K-1 the on-state (lowest). Transitions move between adjacent states
/// only: up_edges[i] drives i -> i+1, down_edges[i] drives i+1 -> i.
struct MemristorModel {
    std::string name;
    std::vector<double> resistances;        // ohms, strictly decreasing, size K
    std::vector<RateEdgeParams> up_edges;   // size K-1
    std::vector<RateEdgeParams> down_edges; // size K-1

    int state_count() const { return static_cast<int>(resistances.size()); }
};

// Rates above this are treated as "switches within any resolvable interval";
// exp(|v|/v_scale) overflows double just past |v|/v_scale ~= 709.
inline constexpr double kRateClamp = 1e300;

/// Upward (set) switching rate at device voltage v. Zero for v <= 0.
double rate_up(const RateEdgeParams& edge, double v);

/// Downward (reset) switching rate at device voltage v. Zero for v >= 0.
double rate_down(const RateEdgeParams& edge, double v);

/// Resistance of the model in the given state; throws std::out_of_range.
double resistance(const MemristorModel& model, int state);

struct ModelViolation {
    std::string field;
    std::string rule;
};

/// Checks all MemristorModel invariants; empty result means the model is valid.
std::vector<ModelViolation> validate_model(const MemristorModel& model);

}  // namespace memsim

#endif
