#ifndef MEMSIM_SPICEGEN_HPP
#define MEMSIM_SPICEGEN_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "memsim/statespace.hpp"
#include "memsim/waveform.hpp"

namespace memsim {

struct SimWindow {
    double t_stop = 0.1;
    double t_start_recording = 0.05;
    double max_step = 1e-6;
};

/// An LTspice netlist: each probability node p<k> carries a 1 F capacitor
/// integrated by a behavioral current source realizing that state's balance
/// equation; one resistor copy of the network per state feeds the rate
/// expressions; a current source into node VI reports the mean current.
struct NetlistDoc {
    std::vector<std::string> lines;
    std::map<int, std::string> probability_node;  // state index -> node name

    std::string text() const;
};

/// Emits the netlist for a (lumped) state space driven by `wave`. For positive
/// dc drive the switching-time integrator pair (behavioral source + 1 F
/// capacitor on node Vt) is appended. Capacity: at most 64 states, models of
/// at most 10 states.
NetlistDoc emit_ltspice(const StateSpace& space, const Waveform& wave, const SimWindow& sim);

/// Just the integrator fragment: a source charging node Vt with
/// current time * (influx into the absorbing all-on state), plus its 1 F
/// capacitor. V(Vt) saturates at the mean switching time.
std::vector<std::string> emit_switch_time_integrator(const StateSpace& space,
                                                     const Waveform& wave);

/// Structural checks: capacitor/source pairing per probability node, .param
/// coverage of every tau/V symbol used in gm() calls, IC values summing to 1,
/// unique component names, exactly one .tran/.func/.backanno/.end.
std::vector<std::string> lint_netlist(const NetlistDoc& doc);

/// Sums the behavioral state equations weighted by orbit multiplicity by
/// re-parsing the emitted expressions; every gm term must cancel exactly.
/// Returns the non-cancelling term keys (empty = conservation holds).
std::vector<std::string> conservation_residual(const NetlistDoc& doc, const StateSpace& space);

/// Whitespace-, case-, ordering- and parenthesization-insensitive comparison
/// of two netlists: lines are tokenized, numeric tokens compared by value,
/// '**' collapsed to '*', sign runs folded, trailing zero arguments of
/// SINE(...) dropped, and the line multisets compared.
bool netlists_token_equivalent(std::string_view a, std::string_view b);

/// The normalized form used by netlists_token_equivalent, for diagnostics.
std::vector<std::string> normalized_netlist_lines(std::string_view text);

}  // namespace memsim

#endif
