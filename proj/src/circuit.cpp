#include "memsim/circuit.hpp"

#include <stdexcept>

namespace memsim {

namespace {

double element_ohms(const std::map<std::string, double>& ohms, const std::string& name) {
    auto it = ohms.find(name);
    if (it == ohms.end())
        throw std::invalid_argument("no resistance given for element '" + name + "'");
    if (!(it->second > 0.0))
        throw std::invalid_argument("element '" + name + "' needs resistance > 0");
    return it->second;
}

double reduce(const TopologyNode& node, const std::map<std::string, double>& ohms) {
    switch (node.kind) {
        case TopologyNode::Kind::Leaf:
            return element_ohms(ohms, node.element);
        case TopologyNode::Kind::Series: {
            double total = 0.0;
            for (const auto& child : node.children) total += reduce(child, ohms);
            return total;
        }
        case TopologyNode::Kind::Parallel: {
            double recip = 0.0;
            for (const auto& child : node.children) recip += 1.0 / reduce(child, ohms);
            return 1.0 / recip;
        }
    }
    throw std::logic_error("unreachable topology kind");
}

// Top-down voltage split: a series child takes the fraction of its parent's
// voltage given by its share of the chain resistance; parallel children see
// the full parent voltage.
void assign_ratios(const TopologyNode& node, const std::map<std::string, double>& ohms,
                   double ratio, ConfigSolution& out) {
    switch (node.kind) {
        case TopologyNode::Kind::Leaf:
            out.element_voltage_ratio[node.element] = ratio;
            return;
        case TopologyNode::Kind::Series: {
            double chain = reduce(node, ohms);
            for (const auto& child : node.children)
                assign_ratios(child, ohms, ratio * reduce(child, ohms) / chain, out);
            return;
        }
        case TopologyNode::Kind::Parallel:
            for (const auto& child : node.children) assign_ratios(child, ohms, ratio, out);
            return;
    }
}

}  // namespace

double equivalent_resistance(const TopologyNode& topology,
                             const std::map<std::string, double>& ohms) {
    return reduce(topology, ohms);
}

ConfigSolution solve_configuration(const TopologyNode& topology,
                                   const std::map<std::string, double>& ohms) {
    ConfigSolution sol;
    sol.total_conductance = 1.0 / reduce(topology, ohms);
    assign_ratios(topology, ohms, 1.0, sol);
    return sol;
}

double total_current(const ConfigSolution& sol, double v_source) {
    return sol.total_conductance * v_source;
}

}  // namespace memsim
