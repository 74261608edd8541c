#include "memsim/statespace.hpp"

#include <algorithm>
#include <stdexcept>

namespace memsim {

namespace {

std::map<std::string, double> resistance_map(const CircuitSpec& spec, const NetworkState& s) {
    std::map<std::string, double> ohms;
    for (std::size_t m = 0; m < spec.instances.size(); ++m) {
        const auto& inst = spec.instances[m];
        const MemristorModel* model = spec.find_model(inst.model);
        ohms[inst.name] = resistance(*model, s.digits[m]);
    }
    for (const auto& r : spec.fixed_resistors) ohms[r.name] = r.ohms;
    return ohms;
}

void collect_groups(const TopologyNode& node, const CircuitSpec& spec,
                    std::vector<int>& group_of, std::vector<std::vector<int>>& members) {
    if (node.kind == TopologyNode::Kind::Leaf) return;
    // leaf children of this node, keyed by (model, initial state)
    std::map<std::pair<int, int>, std::vector<int>> buckets;
    for (const auto& child : node.children) {
        if (child.kind != TopologyNode::Kind::Leaf) {
            collect_groups(child, spec, group_of, members);
            continue;
        }
        int idx = spec.instance_index(child.element);
        if (idx < 0) continue;  // fixed resistor
        const auto& inst = spec.instances[static_cast<std::size_t>(idx)];
        int model_idx = 0;
        for (std::size_t k = 0; k < spec.models.size(); ++k)
            if (spec.models[k].name == inst.model) model_idx = static_cast<int>(k);
        buckets[{model_idx, inst.initial_state}].push_back(idx);
    }
    for (auto& [key, bucket] : buckets) {
        if (bucket.size() < 2) continue;
        int gid = static_cast<int>(members.size());
        std::sort(bucket.begin(), bucket.end());
        for (int idx : bucket) group_of[static_cast<std::size_t>(idx)] = gid;
        members.push_back(bucket);
    }
}

}  // namespace

ConfigSolution StateSpace::config_solution(int i) const {
    return solve_configuration(spec_.topology, resistance_map(spec_, state(i)));
}

std::string StateSpace::label(int i) const {
    std::string out;
    for (int d : state(i).digits) out += static_cast<char>('0' + d % 10);
    return out;
}

std::string StateSpace::column_label(int i) const {
    std::string out = label(i);
    if (multiplicity(i) > 1) out += "x" + std::to_string(multiplicity(i));
    return out;
}

std::int64_t StateSpace::full_index(const NetworkState& s) const {
    std::int64_t idx = 0;
    for (std::size_t m = 0; m < strides_.size(); ++m) idx += strides_[m] * s.digits[m];
    return idx;
}

NetworkState StateSpace::canonical(const NetworkState& s) const {
    NetworkState c = s;
    for (const auto& members : group_members_) {
        std::vector<int> digits;
        digits.reserve(members.size());
        for (int m : members) digits.push_back(c.digits[static_cast<std::size_t>(m)]);
        std::sort(digits.begin(), digits.end());
        for (std::size_t k = 0; k < members.size(); ++k)
            c.digits[static_cast<std::size_t>(members[k])] = digits[k];
    }
    return c;
}

int StateSpace::index_of(const NetworkState& s) const {
    if (!lumped_) return static_cast<int>(full_index(s));
    auto it = orbit_of_.find(full_index(canonical(s)));
    if (it == orbit_of_.end())
        throw std::invalid_argument("state is not part of this state space");
    return it->second;
}

NetworkState StateSpace::initial_state() const {
    NetworkState s;
    for (const auto& inst : spec_.instances) s.digits.push_back(inst.initial_state);
    return s;
}

StateSpace enumerate_states(const CircuitSpec& spec, std::size_t cap) {
    StateSpace sp;
    sp.spec_ = spec;
    sp.lumped_ = false;

    const std::size_t n = spec.instances.size();
    if (n == 0) throw std::invalid_argument("circuit declares no memristor instances");

    std::size_t count = 1;
    for (std::size_t m = 0; m < n; ++m) {
        const auto& inst = spec.instances[m];
        const MemristorModel* model = spec.find_model(inst.model);
        if (!model) throw std::invalid_argument("instance references unknown model " + inst.model);
        int model_idx = 0;
        for (std::size_t k = 0; k < spec.models.size(); ++k)
            if (spec.models[k].name == inst.model) model_idx = static_cast<int>(k);
        sp.model_index_.push_back(model_idx);
        int k_states = model->state_count();
        sp.radix_.push_back(k_states);
        sp.strides_.push_back(static_cast<std::int64_t>(count));
        if (count > cap / static_cast<std::size_t>(k_states))
            throw std::length_error(
                "state space exceeds the cap of " + std::to_string(cap) +
                " states; reduce the network or rely on lumped symmetry classes");
        count *= static_cast<std::size_t>(k_states);
    }

    sp.symmetry_group_.assign(n, -1);
    collect_groups(spec.topology, spec, sp.symmetry_group_, sp.group_members_);

    sp.states_.reserve(count);
    NetworkState cur;
    cur.digits.assign(n, 0);
    for (std::size_t i = 0; i < count; ++i) {
        sp.states_.push_back(cur);
        // mixed-radix increment, least significant digit first
        for (std::size_t m = 0; m < n; ++m) {
            if (++cur.digits[m] < sp.radix_[m]) break;
            cur.digits[m] = 0;
        }
    }

    sp.multiplicity_.assign(count, 1);
    sp.transitions_.resize(count);
    sp.ratios_.resize(count);
    sp.conductance_.resize(count);

    for (std::size_t i = 0; i < count; ++i) {
        const NetworkState& s = sp.states_[i];
        ConfigSolution sol = solve_configuration(spec.topology, resistance_map(spec, s));
        sp.conductance_[i] = sol.total_conductance;
        auto& ratios = sp.ratios_[i];
        ratios.resize(n);
        for (std::size_t m = 0; m < n; ++m)
            ratios[m] = sol.element_voltage_ratio.at(spec.instances[m].name);

        auto& trans = sp.transitions_[i];
        for (std::size_t m = 0; m < n; ++m) {
            int d = s.digits[m];
            if (d + 1 < sp.radix_[m])
                trans.push_back({static_cast<int>(i + static_cast<std::size_t>(sp.strides_[m])),
                                 static_cast<int>(m), Direction::Up});
            if (d > 0)
                trans.push_back({static_cast<int>(i - static_cast<std::size_t>(sp.strides_[m])),
                                 static_cast<int>(m), Direction::Down});
        }
    }

    NetworkState all_on;
    for (std::size_t m = 0; m < n; ++m) all_on.digits.push_back(sp.radix_[m] - 1);
    sp.absorbing_ = static_cast<int>(sp.full_index(all_on));
    return sp;
}

const std::vector<Transition>& neighbors(const StateSpace& space, int s) {
    return space.transitions(s);
}

double transition_rate(const StateSpace& space, int from, const Transition& tr, double v_source) {
    const MemristorModel& model = space.instance_model(tr.memristor);
    double v = space.instance_ratio(from, tr.memristor) * v_source;
    int d = space.state(from).digits[static_cast<std::size_t>(tr.memristor)];
    if (tr.dir == Direction::Up)
        return rate_up(model.up_edges[static_cast<std::size_t>(d)], v);
    return rate_down(model.down_edges[static_cast<std::size_t>(d - 1)], v);
}

StateSpace lump_states(const StateSpace& full) {
    if (full.lumped()) throw std::invalid_argument("state space is already lumped");

    StateSpace sp;
    sp.spec_ = full.spec_;
    sp.lumped_ = true;
    sp.radix_ = full.radix_;
    sp.model_index_ = full.model_index_;
    sp.strides_ = full.strides_;
    sp.symmetry_group_ = full.symmetry_group_;
    sp.group_members_ = full.group_members_;

    const int n_full = full.size();
    std::vector<int> lumped_index(static_cast<std::size_t>(n_full), -1);

    // representatives appear in full-index order, which keeps the lumped
    // ordering lexicographic in the same digit convention as the full space
    for (int i = 0; i < n_full; ++i) {
        NetworkState canon = sp.canonical(full.state(i));
        auto rep_full = sp.full_index(canon);
        auto it = sp.orbit_of_.find(rep_full);
        if (it == sp.orbit_of_.end()) {
            int idx = static_cast<int>(sp.states_.size());
            sp.orbit_of_.emplace(rep_full, idx);
            sp.states_.push_back(canon);
            sp.multiplicity_.push_back(0);
            lumped_index[static_cast<std::size_t>(i)] = idx;
        } else {
            lumped_index[static_cast<std::size_t>(i)] = it->second;
        }
        ++sp.multiplicity_[static_cast<std::size_t>(lumped_index[static_cast<std::size_t>(i)])];
    }

    const int m = static_cast<int>(sp.states_.size());
    sp.transitions_.resize(static_cast<std::size_t>(m));
    sp.ratios_.resize(static_cast<std::size_t>(m));
    sp.conductance_.resize(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        int rep_full = static_cast<int>(sp.full_index(sp.states_[static_cast<std::size_t>(a)]));
        sp.ratios_[static_cast<std::size_t>(a)] = full.ratios_[static_cast<std::size_t>(rep_full)];
        sp.conductance_[static_cast<std::size_t>(a)] =
            full.conductance_[static_cast<std::size_t>(rep_full)];
        for (const Transition& tr : full.transitions(rep_full)) {
            Transition out = tr;
            out.target = lumped_index[static_cast<std::size_t>(tr.target)];
            sp.transitions_[static_cast<std::size_t>(a)].push_back(out);
        }
    }

    if (full.absorbing_)
        sp.absorbing_ = lumped_index[static_cast<std::size_t>(*full.absorbing_)];
    return sp;
}

}  // namespace memsim
