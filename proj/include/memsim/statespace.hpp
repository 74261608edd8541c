#ifndef MEMSIM_STATESPACE_HPP
#define MEMSIM_STATESPACE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "memsim/circuit.hpp"
#include "memsim/netdsl.hpp"

namespace memsim {

/// One network configuration: a state digit per memristor instance, in
/// declaration order.
struct NetworkState {
    std::vector<int> digits;

    bool operator==(const NetworkState&) const = default;
};

enum class Direction { Up, Down };

/// A structural move: one memristor changes its state by +-1.
struct Transition {
    int target = 0;     // state index in the owning StateSpace
    int memristor = 0;  // instance index
    Direction dir = Direction::Up;
};

/// Enumerated network configurations with their transition graph and the
/// divider solution of every configuration. In the lumped form, each state
/// stands for an orbit of permutation-equivalent configurations and carries
/// the orbit size as its multiplicity.
class StateSpace {
  public:
    const CircuitSpec& spec() const { return spec_; }
    bool lumped() const { return lumped_; }
    int size() const { return static_cast<int>(states_.size()); }
    int instance_count() const { return static_cast<int>(radix_.size()); }

    const NetworkState& state(int i) const { return states_[static_cast<std::size_t>(i)]; }
    const std::vector<Transition>& transitions(int i) const {
        return transitions_[static_cast<std::size_t>(i)];
    }
    std::int64_t multiplicity(int i) const { return multiplicity_[static_cast<std::size_t>(i)]; }

    /// Voltage-divider ratio seen by an instance in configuration i.
    double instance_ratio(int i, int instance) const {
        return ratios_[static_cast<std::size_t>(i)][static_cast<std::size_t>(instance)];
    }
    /// Network conductance of configuration i (amps per source volt).
    double conductance(int i) const { return conductance_[static_cast<std::size_t>(i)]; }
    /// Full divider solution of configuration i, keyed by element name.
    ConfigSolution config_solution(int i) const;

    /// Index of the all-on configuration when it is represented here.
    std::optional<int> absorbing_index() const { return absorbing_; }

    const MemristorModel& instance_model(int instance) const {
        return spec_.models[static_cast<std::size_t>(
            model_index_[static_cast<std::size_t>(instance)])];
    }
    int radix(int instance) const { return radix_[static_cast<std::size_t>(instance)]; }

    /// Digit string in declaration order, e.g. "01111".
    std::string label(int i) const;
    /// Label plus an x<multiplicity> suffix for lumped orbits larger than one.
    std::string column_label(int i) const;

    /// Index of the state (full space) or of the orbit containing it (lumped).
    int index_of(const NetworkState& s) const;

    /// Initial configuration from the declared per-instance init digits.
    NetworkState initial_state() const;

    /// Interchangeable instances (same model, same initial state, siblings
    /// under one topology node) share a symmetry group id.
    int symmetry_group(int instance) const {
        return symmetry_group_[static_cast<std::size_t>(instance)];
    }
    const std::vector<int>& group_members(int group) const {
        return group_members_[static_cast<std::size_t>(group)];
    }

    friend StateSpace enumerate_states(const CircuitSpec& spec, std::size_t cap);
    friend StateSpace lump_states(const StateSpace& full);

  private:
    CircuitSpec spec_;
    bool lumped_ = false;
    std::vector<int> radix_;        // K per instance
    std::vector<int> model_index_;  // per instance, into spec_.models
    std::vector<NetworkState> states_;
    std::vector<std::vector<Transition>> transitions_;
    std::vector<std::int64_t> multiplicity_;
    std::vector<std::vector<double>> ratios_;  // per state, per instance
    std::vector<double> conductance_;
    std::optional<int> absorbing_;
    // instances interchangeable under the topology symmetry share a group id
    std::vector<int> symmetry_group_;
    std::vector<std::vector<int>> group_members_;
    std::vector<std::int64_t> strides_;              // full-space mixed-radix strides
    std::unordered_map<std::int64_t, int> orbit_of_;  // rep full index -> lumped index

    NetworkState canonical(const NetworkState& s) const;
    std::int64_t full_index(const NetworkState& s) const;
};

/// Full product state space; throws std::length_error past the cap.
StateSpace enumerate_states(const CircuitSpec& spec, std::size_t cap = std::size_t{1} << 20);

const std::vector<Transition>& neighbors(const StateSpace& space, int s);

/// Rate of the move `tr` out of state `from`, at the given source voltage.
/// The device voltage comes from the source state's divider solution.
double transition_rate(const StateSpace& space, int from, const Transition& tr, double v_source);

/// Merge permutation-equivalent states of interchangeable instances. The
/// resulting master equation over orbit-total probabilities is exactly
/// equivalent to the full one. No-op (returns a copy) when no symmetry exists.
StateSpace lump_states(const StateSpace& full);

}  // namespace memsim

#endif
