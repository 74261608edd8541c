#ifndef MEMSIM_CIRCUIT_HPP
#define MEMSIM_CIRCUIT_HPP

#include <map>
#include <string>

#include "memsim/netdsl.hpp"

namespace memsim {

/// Divider solution of the resistive network for one fixed set of element
/// resistances. Ratios are per volt of source, so the voltage across an
/// element at source value V is ratio * V; the network current is
/// total_conductance * V.
struct ConfigSolution {
    std::map<std::string, double> element_voltage_ratio;
    double total_conductance = 0.0;
};

/// Series/parallel reduction; series resistances add, parallel conductances add.
double equivalent_resistance(const TopologyNode& topology,
                             const std::map<std::string, double>& ohms);

ConfigSolution solve_configuration(const TopologyNode& topology,
                                   const std::map<std::string, double>& ohms);

double total_current(const ConfigSolution& sol, double v_source);

}  // namespace memsim

#endif
