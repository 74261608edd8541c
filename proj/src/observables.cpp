#include "memsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace memsim {

namespace {

constexpr double kAbsorbedTarget = 1.0 - 1e-6;

// Probability flux into the absorbing state at one sample.
double absorbing_influx(const StateSpace& space, const std::vector<double>& p, double v,
                        int absorbing) {
    double flux = 0.0;
    for (int b = 0; b < space.size(); ++b) {
        if (b == absorbing) continue;
        for (const Transition& tr : space.transitions(b))
            if (tr.target == absorbing)
                flux += transition_rate(space, b, tr, v) * p[static_cast<std::size_t>(b)];
    }
    return flux;
}

}  // namespace

double mean_current(const StateSpace& space, const ProbabilityVector& p, double v_source) {
    if (static_cast<int>(p.p.size()) != space.size())
        throw std::invalid_argument("probability vector does not match the state space");
    double current = 0.0;
    for (int s = 0; s < space.size(); ++s)
        current += p.p[static_cast<std::size_t>(s)] * space.conductance(s) * v_source;
    return current;
}

std::vector<double> switching_time_stages(int n, const MemristorModel& model, double v_dc) {
    if (model.state_count() != 2)
        throw std::invalid_argument(
            "analytic switching time is only defined for binary models; model " + model.name +
            " has " + std::to_string(model.state_count()) + " states");
    if (n < 1) throw std::invalid_argument("need at least one memristor");

    const double r_off = model.resistances[0];
    const double r_on = model.resistances[1];
    std::vector<double> stages;
    for (int j = 0; j < n; ++j) {
        double r_total = (n - j) * r_off + j * r_on;
        double v_dev = v_dc * r_off / r_total;
        double gamma = rate_up(model.up_edges[0], v_dev);
        stages.push_back(gamma > 0.0 ? 1.0 / ((n - j) * gamma)
                                     : std::numeric_limits<double>::infinity());
    }
    return stages;
}

double mean_switching_time_analytic(int n, const MemristorModel& model, double v_dc) {
    double total = 0.0;
    for (double stage : switching_time_stages(n, model, v_dc)) total += stage;
    return total;
}

SwitchingTimeEstimate mean_switching_time_numeric(const ProbabilityTrajectory& traj,
                                                  const StateSpace& space) {
    auto absorbing = space.absorbing_index();
    if (!absorbing) throw std::invalid_argument("state space has no absorbing all-on state");
    if (traj.times.empty()) throw std::invalid_argument("empty trajectory");
    for (double v : traj.source_values)
        if (v != traj.source_values.front())
            throw std::invalid_argument("switching-time integral needs a dc trajectory");

    const double v = traj.source_values.front();
    const auto abs_idx = static_cast<std::size_t>(*absorbing);

    double integral = 0.0;
    double prev_t = 0.0, prev_f = 0.0;  // integrand is t * influx, zero at t = 0
    SwitchingTimeEstimate est;
    bool truncated = false;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        double t = traj.times[k];
        double f = t * absorbing_influx(space, traj.probabilities[k], v, *absorbing);
        integral += 0.5 * (prev_f + f) * (t - prev_t);
        prev_t = t;
        prev_f = f;
        est.absorbed_mass = traj.probabilities[k][abs_idx];
        if (est.absorbed_mass > kAbsorbedTarget) {
            est.tail_correction = (1.0 - est.absorbed_mass) * t;
            truncated = true;
            break;
        }
    }
    if (!truncated)
        throw SimulationError("trajectory too short for the switching-time integral: absorbed "
                              "mass reached only " +
                              std::to_string(est.absorbed_mass));
    est.mean = integral + est.tail_correction;
    return est;
}

std::vector<std::pair<double, double>> iv_curve(const ProbabilityTrajectory& traj,
                                                const StateSpace& space) {
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.times.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        ProbabilityVector p{traj.probabilities[k]};
        out.emplace_back(traj.source_values[k], mean_current(space, p, traj.source_values[k]));
    }
    return out;
}

double loop_area(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& [x0, y0] = points[i];
        const auto& [x1, y1] = points[(i + 1) % points.size()];
        twice += x0 * y1 - x1 * y0;
    }
    return 0.5 * std::abs(twice);
}

ObservableSeries observable_series(const ProbabilityTrajectory& traj, const StateSpace& space) {
    ObservableSeries s;
    auto absorbing = space.absorbing_index();
    double acc = 0.0, prev_t = 0.0, prev_f = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        double t = traj.times[k];
        double v = traj.source_values[k];
        ProbabilityVector p{traj.probabilities[k]};
        s.times.push_back(t);
        s.source_voltage.push_back(v);
        s.mean_current.push_back(mean_current(space, p, v));
        if (absorbing) {
            double f = t * absorbing_influx(space, traj.probabilities[k], v, *absorbing);
            acc += 0.5 * (prev_f + f) * (t - prev_t);
            prev_t = t;
            prev_f = f;
        }
        s.switch_time_accumulator.push_back(acc);
    }
    return s;
}

std::vector<Plateau> detect_plateaus(const std::vector<double>& times,
                                     const std::vector<double>& values, double rel_flatness,
                                     int min_samples) {
    std::vector<Plateau> out;
    std::size_t i = 0;
    while (i < values.size()) {
        double lo = values[i], hi = values[i];
        std::size_t j = i + 1;
        while (j < values.size()) {
            double nlo = std::min(lo, values[j]);
            double nhi = std::max(hi, values[j]);
            if (nhi - nlo > rel_flatness * std::max(std::abs(nhi), 1e-300)) break;
            lo = nlo;
            hi = nhi;
            ++j;
        }
        if (static_cast<int>(j - i) >= min_samples) {
            double level = 0.5 * (lo + hi);
            if (!out.empty() &&
                std::abs(out.back().level - level) <=
                    rel_flatness * std::max(std::abs(level), 1e-300)) {
                out.back().t_end = times[j - 1];  // same level, extend
            } else {
                out.push_back({level, times[i], times[j - 1]});
            }
        }
        i = j;
    }
    return out;
}

}  // namespace memsim
