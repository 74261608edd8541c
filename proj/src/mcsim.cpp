#include "memsim/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "memsim/master.hpp"

namespace memsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
    std::uint64_t x = master;
    (void)splitmix64(x);
    x ^= (trial + 1) * 0xD1B54A32D192ED03ULL;
    return splitmix64(x);
}

// xoshiro256** seeded through splitmix64; counter-based derivation keeps
// trials reproducible independently of execution order.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : s_) word = splitmix64(x);
    }

    std::uint64_t next() {
        auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }      // [0,1)
    double uniform_pos() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }
    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  private:
    std::uint64_t s_[4];
};

void apply_event(NetworkState& s, const Transition& tr) {
    s.digits[static_cast<std::size_t>(tr.memristor)] += tr.dir == Direction::Up ? 1 : -1;
}

double derive_dt(const StateSpace& space, const Waveform& wave, double t_stop, double cap) {
    double peak = std::abs(wave.amplitude);
    double lam = 0.0;
    for (double v : {peak, -peak}) {
        for (int b = 0; b < space.size(); ++b) {
            double out = 0.0;
            for (const Transition& tr : space.transitions(b))
                out += transition_rate(space, b, tr, v);
            lam = std::max(lam, out);
        }
    }
    if (lam <= 0.0) return t_stop;
    return std::min(t_stop, cap / lam);
}

}  // namespace

TrialPath mc_trial(const StateSpace& space, const Waveform& wave, std::uint64_t seed, double dt,
                   double t_stop, double rate_dt_cap) {
    if (space.lumped()) throw std::invalid_argument("mc_trial needs the full state space");
    if (!(t_stop > 0.0)) throw std::invalid_argument("t_stop must be > 0");
    if (!(rate_dt_cap > 0.0 && rate_dt_cap <= 1.0))
        throw std::invalid_argument("rate_dt_cap must be in (0, 1]");
    if (dt <= 0.0) dt = derive_dt(space, wave, t_stop, rate_dt_cap);

    Rng rng(seed);
    TrialPath path;
    path.seed = seed;
    NetworkState state = space.initial_state();
    int idx = space.index_of(state);

    double t = 0.0;
    std::vector<double> rates;
    std::vector<std::size_t> fired;
    while (t < t_stop) {
        double v = wave.value(t);
        const auto& trans = space.transitions(idx);
        rates.assign(trans.size(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < trans.size(); ++i) {
            rates[i] = transition_rate(space, idx, trans[i], v);
            total += rates[i];
        }

        double dt_eff = std::min(dt, t_stop - t);
        while (total * dt_eff > rate_dt_cap) dt_eff *= 0.5;

        fired.clear();
        double fired_total = 0.0;
        for (std::size_t i = 0; i < trans.size(); ++i) {
            if (rates[i] == 0.0) continue;
            if (rng.uniform01() < rates[i] * dt_eff) {
                fired.push_back(i);
                fired_total += rates[i];
            }
        }
        int chosen = -1;
        if (fired.size() == 1) {
            chosen = static_cast<int>(fired.front());
        } else if (fired.size() > 1) {
            // several fired in one step: accept one in proportion to its rate
            double u = rng.uniform01() * fired_total;
            double acc = 0.0;
            for (std::size_t i : fired) {
                acc += rates[i];
                if (u < acc) {
                    chosen = static_cast<int>(i);
                    break;
                }
            }
            if (chosen < 0) chosen = static_cast<int>(fired.back());
        }
        t += dt_eff;
        if (chosen >= 0) {
            const Transition& tr = trans[static_cast<std::size_t>(chosen)];
            path.events.push_back({t, tr.memristor, tr.dir});
            apply_event(state, tr);
            idx = space.index_of(state);
        }
    }
    path.final_state = state;
    return path;
}

TrialPath mc_trial(const CircuitSpec& spec, const Waveform& wave, std::uint64_t seed, double dt,
                   double t_stop, double rate_dt_cap) {
    return mc_trial(enumerate_states(spec), wave, seed, dt, t_stop, rate_dt_cap);
}

TrialPath gillespie_dc(const StateSpace& space, double v_dc, std::uint64_t seed, double t_stop) {
    if (space.lumped()) throw std::invalid_argument("gillespie_dc needs the full state space");

    Rng rng(seed);
    TrialPath path;
    path.seed = seed;
    NetworkState state = space.initial_state();
    int idx = space.index_of(state);

    double t = 0.0;
    std::vector<double> rates;
    while (true) {
        const auto& trans = space.transitions(idx);
        rates.assign(trans.size(), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < trans.size(); ++i) {
            rates[i] = transition_rate(space, idx, trans[i], v_dc);
            total += rates[i];
        }
        if (total <= 0.0) break;  // absorbing configuration

        t += rng.exponential(total);
        if (t > t_stop) break;

        double u = rng.uniform01() * total;
        double acc = 0.0;
        std::size_t pick = trans.size() - 1;
        for (std::size_t i = 0; i < trans.size(); ++i) {
            acc += rates[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        const Transition& tr = trans[pick];
        path.events.push_back({t, tr.memristor, tr.dir});
        apply_event(state, tr);
        idx = space.index_of(state);
    }
    path.final_state = state;
    return path;
}

TrialPath gillespie_dc(const CircuitSpec& spec, double v_dc, std::uint64_t seed, double t_stop) {
    return gillespie_dc(enumerate_states(spec), v_dc, seed, t_stop);
}

EnsembleStats mc_ensemble(const CircuitSpec& spec, const Waveform& wave, int trials,
                          std::uint64_t seed, const std::vector<double>& report_times,
                          const McOptions& options) {
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    if (report_times.empty()) throw std::invalid_argument("need at least one report time");
    for (std::size_t i = 1; i < report_times.size(); ++i)
        if (!(report_times[i] > report_times[i - 1]))
            throw std::invalid_argument("report times must be strictly increasing");

    StateSpace full = enumerate_states(spec);
    StateSpace report_space = options.lumped_report ? lump_states(full) : full;

    EnsembleStats stats;
    stats.trials = trials;
    stats.report_times = report_times;
    for (int s = 0; s < report_space.size(); ++s)
        stats.labels.push_back(report_space.column_label(s));

    const std::size_t nt = report_times.size();
    const auto ns = static_cast<std::size_t>(report_space.size());
    std::vector<std::vector<double>> counts(nt, std::vector<double>(ns, 0.0));
    std::vector<double> cur_sum(nt, 0.0), cur_sumsq(nt, 0.0);

    const double t_stop = report_times.back();
    NetworkState all_on;
    for (int m = 0; m < full.instance_count(); ++m)
        all_on.digits.push_back(full.radix(m) - 1);

    double dt = options.dt;
    if (!wave.is_dc() && dt <= 0.0) dt = derive_dt(full, wave, t_stop, options.rate_dt_cap);

    for (int trial = 0; trial < trials; ++trial) {
        std::uint64_t ts = trial_seed(seed, static_cast<std::uint64_t>(trial));
        TrialPath path =
            wave.is_dc()
                ? gillespie_dc(full, wave.amplitude, ts, std::numeric_limits<double>::infinity())
                : mc_trial(full, wave, ts, dt, t_stop, options.rate_dt_cap);

        // replay the path against the report grid
        NetworkState state = full.initial_state();
        std::size_t ev = 0;
        bool absorbed = false;
        for (std::size_t k = 0; k < nt; ++k) {
            double tk = report_times[k];
            while (ev < path.events.size() && path.events[ev].time <= tk) {
                const auto& e = path.events[ev];
                state.digits[static_cast<std::size_t>(e.memristor)] +=
                    e.dir == Direction::Up ? 1 : -1;
                if (!absorbed && wave.is_dc() && state == all_on) {
                    stats.switching_times.push_back(e.time);
                    absorbed = true;
                }
                ++ev;
            }
            int ridx = report_space.index_of(state);
            counts[k][static_cast<std::size_t>(ridx)] += 1.0;
            double cur = full.conductance(full.index_of(state)) * wave.value(tk);
            cur_sum[k] += cur;
            cur_sumsq[k] += cur * cur;
        }
        // events beyond the last report time still count toward first passage
        while (ev < path.events.size()) {
            const auto& e = path.events[ev];
            state.digits[static_cast<std::size_t>(e.memristor)] +=
                e.dir == Direction::Up ? 1 : -1;
            if (!absorbed && wave.is_dc() && state == all_on) {
                stats.switching_times.push_back(e.time);
                absorbed = true;
            }
            ++ev;
        }
    }

    stats.empirical_p.assign(nt, std::vector<double>(ns, 0.0));
    for (std::size_t k = 0; k < nt; ++k) {
        for (std::size_t s = 0; s < ns; ++s)
            stats.empirical_p[k][s] = counts[k][s] / trials;
        double mean = cur_sum[k] / trials;
        stats.mean_current.push_back(mean);
        double var = trials > 1 ? (cur_sumsq[k] - trials * mean * mean) / (trials - 1) : 0.0;
        stats.current_stderr.push_back(std::sqrt(std::max(0.0, var) / trials));
    }
    return stats;
}

}  // namespace memsim
