#include "memsim/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "memsim/master.hpp"
#include "memsim/mcsim.hpp"
#include "memsim/netdsl.hpp"
#include "memsim/observables.hpp"
#include "memsim/spicegen.hpp"
#include "memsim/statespace.hpp"

namespace memsim {

namespace {

std::string csv_num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CircuitSpec load_circuit(const RunConfig& cfg) {
    std::ifstream in(cfg.circuit_path);
    if (!in) throw ParseError(1, 1, "cannot open circuit file '" + cfg.circuit_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    CircuitSpec spec = parse_circuit(buf.str());
    if (cfg.freq_override > 0.0 && spec.source.kind == Waveform::Kind::Sine)
        spec.source.frequency = cfg.freq_override;
    return spec;
}

int write_output(const RunConfig& cfg, const std::string& content, std::ostream& diag) {
    if (cfg.out == "-") {
        std::cout << content;
        return kExitOk;
    }
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) {
        diag << "error: cannot open output file '" << cfg.out << "'\n";
        return kExitInputError;
    }
    out << content;
    return kExitOk;
}

// Exception-to-exit-code policy shared by every command.
template <typename Fn>
int run_guarded(const RunConfig& cfg, std::ostream& diag, Fn fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        diag << cfg.circuit_path << ":" << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        diag << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const SimulationError& e) {
        diag << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
}

std::vector<double> time_grid(double t_stop, int points) {
    std::vector<double> t;
    for (int k = 0; k <= points; ++k) t.push_back(t_stop * k / points);
    return t;
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& diag) {
    return run_guarded(cfg, diag, [&]() -> int {
        if (!(cfg.t_stop > 0.0)) throw std::invalid_argument("simulate needs --tstop > 0");
        CircuitSpec spec = load_circuit(cfg);
        StateSpace full = enumerate_states(spec);
        StateSpace space = cfg.full_space ? std::move(full) : lump_states(full);

        ProbabilityVector p0 = initial_probability(space);
        ProbabilityTrajectory traj;
        if (spec.source.is_dc())
            traj = solve_dc(space, spec.source.amplitude, p0, time_grid(cfg.t_stop, cfg.points));
        else
            traj = solve_transient(space, spec.source, p0, cfg.t_stop, cfg.tol, cfg.points);

        ObservableSeries series = observable_series(traj, space);

        std::ostringstream out;
        out << "t";
        for (int s = 0; s < space.size(); ++s) out << ",p" << space.column_label(s);
        out << ",V_source,I_mean,T_accum\n";
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            out << csv_num(traj.times[k]);
            for (int s = 0; s < space.size(); ++s)
                out << ',' << csv_num(traj.probabilities[k][static_cast<std::size_t>(s)]);
            out << ',' << csv_num(series.source_voltage[k]) << ','
                << csv_num(series.mean_current[k]) << ','
                << csv_num(series.switch_time_accumulator[k]) << '\n';
        }
        return write_output(cfg, out.str(), diag);
    });
}

int cmd_mc(const RunConfig& cfg, std::ostream& diag) {
    return run_guarded(cfg, diag, [&]() -> int {
        if (!(cfg.t_stop > 0.0)) throw std::invalid_argument("mc needs --tstop > 0");
        if (cfg.trials < 1) throw std::invalid_argument("mc needs --trials >= 1");
        CircuitSpec spec = load_circuit(cfg);

        McOptions opts;
        opts.dt = cfg.mc_dt;
        opts.lumped_report = !cfg.full_space;
        std::vector<double> grid = time_grid(cfg.t_stop, cfg.points);
        EnsembleStats stats = mc_ensemble(spec, spec.source, static_cast<int>(cfg.trials),
                                          cfg.seed, grid, opts);

        std::ostringstream out;
        out << "t";
        for (const auto& label : stats.labels) out << ",p" << label;
        out << ",V_source,I_mean,I_stderr\n";
        for (std::size_t k = 0; k < stats.report_times.size(); ++k) {
            out << csv_num(stats.report_times[k]);
            for (double p : stats.empirical_p[k]) out << ',' << csv_num(p);
            out << ',' << csv_num(spec.source.value(stats.report_times[k])) << ','
                << csv_num(stats.mean_current[k]) << ',' << csv_num(stats.current_stderr[k])
                << '\n';
        }
        if (spec.source.is_dc() && !stats.switching_times.empty()) {
            double sum = 0.0, sumsq = 0.0;
            for (double t : stats.switching_times) {
                sum += t;
                sumsq += t * t;
            }
            double n = static_cast<double>(stats.switching_times.size());
            double mean = sum / n;
            double var = n > 1 ? (sumsq - n * mean * mean) / (n - 1) : 0.0;
            out << "# switching_time_mean=" << csv_num(mean)
                << " switching_time_stderr=" << csv_num(std::sqrt(std::max(0.0, var) / n))
                << " absorbed_trials=" << stats.switching_times.size() << "/" << cfg.trials
                << "\n";
        }
        return write_output(cfg, out.str(), diag);
    });
}

int cmd_emit_spice(const RunConfig& cfg, std::ostream& diag) {
    return run_guarded(cfg, diag, [&]() -> int {
        CircuitSpec spec = load_circuit(cfg);
        StateSpace space = lump_states(enumerate_states(spec));
        SimWindow sim{cfg.spice_t_stop, cfg.spice_t_record, cfg.spice_max_step};
        NetlistDoc doc = emit_ltspice(space, spec.source, sim);
        auto problems = lint_netlist(doc);
        if (!problems.empty()) {
            for (const auto& p : problems) diag << "lint: " << p << "\n";
            throw SimulationError("emitted netlist failed its structural lint");
        }
        return write_output(cfg, doc.text(), diag);
    });
}

int cmd_analytic(const RunConfig& cfg, std::ostream& diag) {
    return run_guarded(cfg, diag, [&]() -> int {
        CircuitSpec spec = load_circuit(cfg);
        if (!spec.source.is_dc())
            throw std::invalid_argument("analytic switching time needs a dc source");

        // series chain (or a single device) of identical instances, all off
        const TopologyNode& top = spec.topology;
        bool series_only = top.kind == TopologyNode::Kind::Leaf;
        if (top.kind == TopologyNode::Kind::Series) {
            series_only = true;
            for (const auto& child : top.children)
                if (child.kind != TopologyNode::Kind::Leaf) series_only = false;
        }
        if (!series_only)
            throw std::invalid_argument(
                "analytic switching time covers only a plain series chain of memristors");
        if (!spec.fixed_resistors.empty())
            throw std::invalid_argument(
                "analytic switching time covers only memristor-only chains");
        const std::string& model_name = spec.instances.front().model;
        for (const auto& inst : spec.instances) {
            if (inst.model != model_name)
                throw std::invalid_argument(
                    "analytic switching time needs identical memristors");
            if (inst.initial_state != 0)
                throw std::invalid_argument(
                    "analytic switching time assumes every device starts in the off-state");
        }
        const MemristorModel& model = *spec.find_model(model_name);
        int n = static_cast<int>(spec.instances.size());
        double v = spec.source.amplitude;

        std::ostringstream out;
        std::vector<double> stages = switching_time_stages(n, model, v);
        out << "mean switching time, " << n << " identical binary memristors in series, dc "
            << csv_num(v) << " V\n";
        double total = 0.0;
        for (std::size_t j = 0; j < stages.size(); ++j) {
            out << "  stage " << j << " (" << j << " on -> " << j + 1
                << " on): " << csv_num(stages[j]) << " s\n";
            total += stages[j];
        }
        if (std::isinf(total))
            out << "  no finite switching: every switching rate is zero at this drive\n";
        else
            out << "  total: " << csv_num(total) << " s\n";
        return write_output(cfg, out.str(), diag);
    });
}

}  // namespace memsim
