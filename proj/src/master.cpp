#include "memsim/master.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace memsim {

namespace {

constexpr int kDenseReductionCap = 2048;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Frozen transition rates for one source voltage.
struct RateSystem {
    int m = 0;
    std::vector<std::vector<std::pair<int, double>>> edges;  // per source: (target, rate)
    std::vector<double> outflow;

    double max_outflow() const {
        double r = 0.0;
        for (double x : outflow) r = std::max(r, x);
        return r;
    }

    // out = Q * v
    void apply(const std::vector<double>& v, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        for (int b = 0; b < m; ++b) {
            double pb = v[static_cast<std::size_t>(b)];
            if (pb == 0.0) continue;
            for (const auto& [a, r] : edges[static_cast<std::size_t>(b)])
                out[static_cast<std::size_t>(a)] += r * pb;
            out[static_cast<std::size_t>(b)] -= outflow[static_cast<std::size_t>(b)] * pb;
        }
    }
};

RateSystem build_rates(const StateSpace& space, double v) {
    RateSystem rs;
    rs.m = space.size();
    rs.edges.resize(static_cast<std::size_t>(rs.m));
    rs.outflow.assign(static_cast<std::size_t>(rs.m), 0.0);
    for (int b = 0; b < rs.m; ++b) {
        for (const Transition& tr : space.transitions(b)) {
            double r = transition_rate(space, b, tr, v);
            if (r > 0.0) {
                rs.edges[static_cast<std::size_t>(b)].push_back({tr.target, r});
                rs.outflow[static_cast<std::size_t>(b)] += r;
            }
        }
    }
    return rs;
}

// Quasi-steady-state removal of states whose outflow exceeds rate_cut.
// Flux through a removed state is redirected to its successors in proportion
// to the branching probabilities (exact for the jump structure; the ignored
// sojourn time is below 1/rate_cut per traversal).
struct Reduction {
    std::vector<int> eliminated;  // elimination order
    std::vector<char> is_eliminated;
    std::vector<std::vector<std::pair<int, double>>> branch;   // per eliminated: (target, prob)
    std::vector<std::vector<std::pair<int, double>>> elim_in;  // original in-edges (source, rate)
    std::vector<double> elim_outflow;                          // original outflow

    bool active() const { return !eliminated.empty(); }

    // Moves any initial mass off eliminated states; the branch targets of a
    // state were not yet eliminated when captured, so one ordered pass drains
    // everything onto kept states.
    void push_mass(std::vector<double>& p) const {
        for (std::size_t k = 0; k < eliminated.size(); ++k) {
            auto s = static_cast<std::size_t>(eliminated[k]);
            if (p[s] == 0.0) continue;
            for (const auto& [a, prob] : branch[k]) p[static_cast<std::size_t>(a)] += p[s] * prob;
            p[s] = 0.0;
        }
    }

    // Occupancy of eliminated states implied by the instantaneous influx.
    // Repeated passes resolve chains of eliminated states (the dc transition
    // graph is acyclic, so #eliminated passes reach the fixed point).
    void backfill(std::vector<double>& p) const {
        for (std::size_t pass = 0; pass <= eliminated.size(); ++pass) {
            for (std::size_t k = 0; k < eliminated.size(); ++k) {
                auto s = static_cast<std::size_t>(eliminated[k]);
                double inflow = 0.0;
                for (const auto& [b, r] : elim_in[k]) inflow += r * p[static_cast<std::size_t>(b)];
                p[s] = inflow / elim_outflow[k];
            }
        }
    }
};

Reduction reduce_fast_states(RateSystem& rs, double rate_cut) {
    Reduction red;
    red.is_eliminated.assign(static_cast<std::size_t>(rs.m), 0);
    if (rs.m > kDenseReductionCap)
        throw SimulationError("system of " + std::to_string(rs.m) +
                              " states is too stiff to reduce densely (cap " +
                              std::to_string(kDenseReductionCap) + ")");

    const auto n = static_cast<std::size_t>(rs.m);
    std::vector<double> dense(n * n, 0.0);  // dense[a*n+b] = rate b->a
    for (std::size_t b = 0; b < n; ++b)
        for (const auto& [a, r] : rs.edges[b]) dense[static_cast<std::size_t>(a) * n + b] += r;

    // fastest states first
    std::vector<int> order;
    for (int s = 0; s < rs.m; ++s)
        if (rs.outflow[static_cast<std::size_t>(s)] > rate_cut) order.push_back(s);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return rs.outflow[static_cast<std::size_t>(a)] > rs.outflow[static_cast<std::size_t>(b)];
    });

    for (int s : order) {
        auto su = static_cast<std::size_t>(s);
        red.is_eliminated[su] = 1;
        red.eliminated.push_back(s);
        red.elim_outflow.push_back(rs.outflow[su]);
        std::vector<std::pair<int, double>> in_orig;
        for (std::size_t b = 0; b < n; ++b)
            for (const auto& [a, r] : rs.edges[b])
                if (a == s) in_orig.push_back({static_cast<int>(b), r});
        red.elim_in.push_back(std::move(in_orig));

        double lam = 0.0;
        for (std::size_t a = 0; a < n; ++a)
            if (a != su) lam += dense[a * n + su];
        std::vector<std::pair<int, double>> br;
        if (lam > 0.0) {
            for (std::size_t a = 0; a < n; ++a)
                if (a != su && dense[a * n + su] > 0.0)
                    br.push_back({static_cast<int>(a), dense[a * n + su] / lam});
        }
        for (std::size_t b = 0; b < n; ++b) {
            double fb = dense[su * n + b];  // flow b -> s
            if (b == su || fb == 0.0) continue;
            for (const auto& [a, prob] : br)
                if (a != static_cast<int>(b))
                    dense[static_cast<std::size_t>(a) * n + b] += fb * prob;
        }
        for (std::size_t i = 0; i < n; ++i) {
            dense[su * n + i] = 0.0;
            dense[i * n + su] = 0.0;
        }
        red.branch.push_back(std::move(br));
    }

    if (!order.empty()) {
        for (std::size_t b = 0; b < n; ++b) {
            rs.edges[b].clear();
            rs.outflow[b] = 0.0;
            for (std::size_t a = 0; a < n; ++a) {
                double r = dense[a * n + b];
                if (r > 0.0 && a != b) {
                    rs.edges[b].push_back({static_cast<int>(a), r});
                    rs.outflow[b] += r;
                }
            }
        }
    }
    return red;
}

void check_p0(const StateSpace& space, const ProbabilityVector& p0) {
    if (static_cast<int>(p0.p.size()) != space.size())
        throw std::invalid_argument("initial probability vector has " +
                                    std::to_string(p0.p.size()) + " entries, space has " +
                                    std::to_string(space.size()) + " states");
    double sum = 0.0;
    for (double x : p0.p) {
        if (!(x >= -1e-12) || !std::isfinite(x))
            throw std::invalid_argument("initial probabilities must be non-negative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw std::invalid_argument("initial probabilities must sum to 1, got " + fmt(sum));
}

// One uniformization interval: p <- exp(Q dt) p, all operations on
// non-negative quantities. Poisson mass beyond the truncation point is below
// 1e-13 and the weights are renormalized, so positivity and conservation hold
// by construction.
void uniformize_interval(const RateSystem& rs, std::vector<double>& p, double dt) {
    if (dt <= 0.0) return;
    double lam = rs.max_outflow();
    if (lam <= 0.0) return;
    double lam_u = 1.02 * lam;

    const double mu_max = 1000.0;
    double mu_total = lam_u * dt;
    int n_sub = std::max(1, static_cast<int>(std::ceil(mu_total / mu_max)));
    double delta = dt / n_sub;
    double mu = lam_u * delta;

    int khi = static_cast<int>(std::ceil(mu + 12.0 * std::sqrt(mu + 1.0) + 20.0));
    std::vector<double> w(static_cast<std::size_t>(khi) + 1);
    double log_mu = std::log(mu);
    double wsum = 0.0;
    for (int k = 0; k <= khi; ++k) {
        w[static_cast<std::size_t>(k)] =
            std::exp(k * log_mu - mu - std::lgamma(static_cast<double>(k) + 1.0));
        wsum += w[static_cast<std::size_t>(k)];
    }
    for (double& x : w) x /= wsum;

    std::vector<double> v = p, qv(p.size()), acc(p.size());
    for (int sub = 0; sub < n_sub; ++sub) {
        if (sub > 0) v = p;
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int k = 0; k <= khi; ++k) {
            double wk = w[static_cast<std::size_t>(k)];
            if (wk > 0.0)
                for (std::size_t i = 0; i < v.size(); ++i) acc[i] += wk * v[i];
            if (k == khi) break;
            rs.apply(v, qv);
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] += qv[i] / lam_u;
                if (v[i] < 0.0) v[i] = 0.0;  // roundoff guard; P is non-negative
            }
        }
        p = acc;
    }
}

}  // namespace

GeneratorMatrix generator_matrix(const StateSpace& space, double v_source) {
    const int m = space.size();
    GeneratorMatrix g;
    g.dim = m;
    g.q.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int b = 0; b < m; ++b)
        for (const Transition& tr : space.transitions(b))
            g.at(tr.target, b) += transition_rate(space, b, tr, v_source);
    for (int b = 0; b < m; ++b) {
        double s = 0.0;
        for (int a = 0; a < m; ++a)
            if (a != b) s += g.at(a, b);
        g.at(b, b) = -s;
    }
    return g;
}

double generator_column_sum(const GeneratorMatrix& g, int column) {
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a)
        if (a != column) s += g.at(a, column);
    return s + g.at(column, column);
}

ProbabilityVector initial_probability(const StateSpace& space) {
    ProbabilityVector p;
    p.p.assign(static_cast<std::size_t>(space.size()), 0.0);
    p.p[static_cast<std::size_t>(space.index_of(space.initial_state()))] = 1.0;
    return p;
}

ProbabilityTrajectory solve_dc(const StateSpace& space, double v_dc, const ProbabilityVector& p0,
                               const std::vector<double>& times, double work_budget) {
    check_p0(space, p0);
    if (times.empty()) throw std::invalid_argument("solve_dc needs at least one output time");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) throw std::invalid_argument("output times must be >= 0");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw std::invalid_argument("output times must be strictly increasing");
    }

    RateSystem rs = build_rates(space, v_dc);
    const double t_end = times.back();

    Reduction red;
    double rate_cut = 0.0;
    if (t_end > 0.0 && rs.max_outflow() * t_end > work_budget) {
        rate_cut = work_budget / t_end;
        red = reduce_fast_states(rs, rate_cut);
        if (rs.max_outflow() * t_end > 20.0 * work_budget)
            throw SimulationError("dc system remains too stiff after reduction (max rate " +
                                  fmt(rs.max_outflow()) + " over " + fmt(t_end) + " s)");
    }

    std::vector<double> p = p0.p;
    if (red.active()) red.push_mass(p);

    ProbabilityTrajectory traj;
    traj.reduced_states = red.eliminated;
    traj.reduction_rate_cut = rate_cut;

    double t = 0.0;
    for (double t_out : times) {
        uniformize_interval(rs, p, t_out - t);
        t = t_out;

        double kept_sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (!red.active() || !red.is_eliminated[i]) kept_sum += p[i];
        if (kept_sum > 0.0)
            for (std::size_t i = 0; i < p.size(); ++i) p[i] /= kept_sum;

        std::vector<double> out = p;
        if (red.active()) {
            red.backfill(out);
            double total = 0.0;
            for (double x : out) total += x;
            for (std::size_t k = 0; k < red.eliminated.size(); ++k)
                traj.max_reduced_occupancy =
                    std::max(traj.max_reduced_occupancy,
                             out[static_cast<std::size_t>(red.eliminated[k])]);
            for (double& x : out) x /= total;
        }
        traj.times.push_back(t_out);
        traj.source_values.push_back(v_dc);
        traj.probabilities.push_back(std::move(out));
    }
    return traj;
}

ProbabilityTrajectory solve_transient(const StateSpace& space, const Waveform& wave,
                                      const ProbabilityVector& p0, double t_stop, double tol,
                                      int output_points) {
    check_p0(space, p0);
    if (!(t_stop > 0.0)) throw std::invalid_argument("t_stop must be > 0");
    if (output_points < 1) throw std::invalid_argument("need at least one output point");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");

    const auto m = static_cast<std::size_t>(space.size());
    const bool dc = wave.is_dc();

    // For constant drive the rates are frozen once; ultra-fast states are
    // reduced away when the explicit step bound would make the run intractable.
    RateSystem rs;
    Reduction red;
    double rate_cut = 0.0;
    const double step_budget = 2e7;
    if (dc) {
        rs = build_rates(space, wave.amplitude);
        if (20.0 * rs.max_outflow() * t_stop > step_budget) {
            rate_cut = std::max(1e9, step_budget / (20.0 * t_stop));
            red = reduce_fast_states(rs, rate_cut);
            if (20.0 * rs.max_outflow() * t_stop > 4.0 * step_budget)
                throw SimulationError(
                    "dc drive too stiff for the explicit integrator (max rate " +
                    fmt(rs.max_outflow()) + "); use the uniformization path");
        }
    }

    std::vector<double> p = p0.p;
    if (red.active()) red.push_mass(p);

    auto derivative = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
        if (dc) {
            rs.apply(y, dy);
            return;
        }
        double v = wave.value(t);
        std::fill(dy.begin(), dy.end(), 0.0);
        for (int b = 0; b < space.size(); ++b) {
            double pb = y[static_cast<std::size_t>(b)];
            for (const Transition& tr : space.transitions(b)) {
                double r = transition_rate(space, b, tr, v);
                if (r == 0.0) continue;
                dy[static_cast<std::size_t>(tr.target)] += r * pb;
                dy[static_cast<std::size_t>(b)] -= r * pb;
            }
        }
    };

    auto max_rate_at = [&](double t) {
        if (dc) return rs.max_outflow();
        double v = wave.value(t);
        double lam = 0.0;
        for (int b = 0; b < space.size(); ++b) {
            double out = 0.0;
            for (const Transition& tr : space.transitions(b))
                out += transition_rate(space, b, tr, v);
            lam = std::max(lam, out);
        }
        return lam;
    };

    auto h_cap = [&](double t) {
        double h = t_stop;
        double lam = max_rate_at(t);
        if (lam > 0.0) h = std::min(h, 1.0 / (20.0 * lam));
        if (!dc && wave.frequency > 0.0) h = std::min(h, 1.0 / (1000.0 * wave.frequency));
        return h;
    };

    // Dormand-Prince 5(4) coefficients
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    std::vector<double> k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), yt(m), y5(m);

    ProbabilityTrajectory traj;
    traj.reduced_states = red.eliminated;
    traj.reduction_rate_cut = rate_cut;

    auto record = [&](double t) {
        std::vector<double> out = p;
        if (red.active()) {
            red.backfill(out);
            double total = 0.0;
            for (double x : out) total += x;
            for (std::size_t k = 0; k < red.eliminated.size(); ++k)
                traj.max_reduced_occupancy =
                    std::max(traj.max_reduced_occupancy,
                             out[static_cast<std::size_t>(red.eliminated[k])]);
            for (double& x : out) x /= total;
        }
        traj.times.push_back(t);
        traj.source_values.push_back(wave.value(t));
        traj.probabilities.push_back(std::move(out));
    };

    record(0.0);

    double t = 0.0;
    double h = std::min(h_cap(0.0), t_stop / output_points);
    long steps = 0;
    const long max_steps = 200'000'000;

    for (int out_idx = 1; out_idx <= output_points; ++out_idx) {
        double t_out = t_stop * out_idx / output_points;
        while (t < t_out) {
            double cap = std::min(h_cap(t), t_out - t);
            double h_use = std::min(h, cap);
            if (h_use < std::max(1e-300, 4.0 * std::numeric_limits<double>::epsilon() * t))
                throw SimulationError("step size underflow at t=" + fmt(t) +
                                      " s (dominant rate " + fmt(max_rate_at(t)) + " 1/s)");
            if (++steps > max_steps)
                throw SimulationError("step budget exhausted at t=" + fmt(t) +
                                      " s (dominant rate " + fmt(max_rate_at(t)) + " 1/s)");

            derivative(t, p, k1);
            for (std::size_t i = 0; i < m; ++i) yt[i] = p[i] + h_use * a21 * k1[i];
            derivative(t + c2 * h_use, yt, k2);
            for (std::size_t i = 0; i < m; ++i)
                yt[i] = p[i] + h_use * (a31 * k1[i] + a32 * k2[i]);
            derivative(t + c3 * h_use, yt, k3);
            for (std::size_t i = 0; i < m; ++i)
                yt[i] = p[i] + h_use * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            derivative(t + c4 * h_use, yt, k4);
            for (std::size_t i = 0; i < m; ++i)
                yt[i] = p[i] + h_use * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            derivative(t + c5 * h_use, yt, k5);
            for (std::size_t i = 0; i < m; ++i)
                yt[i] = p[i] +
                        h_use * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                 a65 * k5[i]);
            derivative(t + h_use, yt, k6);
            for (std::size_t i = 0; i < m; ++i)
                y5[i] = p[i] +
                        h_use * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            derivative(t + h_use, y5, k7);

            double err = 0.0;
            double min_p = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                double e = h_use * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                    e6 * k6[i] + e7 * k7[i]);
                err = std::max(err, std::abs(e));
                min_p = std::min(min_p, y5[i]);
            }

            if (err <= tol && min_p >= -tol) {
                t = (t_out - (t + h_use) < 1e-12 * t_out) ? t_out : t + h_use;
                double sum = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    if (y5[i] < 0.0) y5[i] = 0.0;
                    sum += y5[i];
                }
                for (std::size_t i = 0; i < m; ++i) p[i] = y5[i] / sum;
                double grow = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
                h = h_use * std::clamp(grow, 0.2, 5.0);
            } else {
                double shrink =
                    err > tol ? std::max(0.2, 0.9 * std::pow(tol / err, 0.2)) : 0.5;
                h = h_use * shrink;
            }
        }
        record(t_out);
    }
    return traj;
}

}  // namespace memsim
