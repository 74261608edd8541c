#ifndef MEMSIM_NETDSL_HPP
#define MEMSIM_NETDSL_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "memsim/device.hpp"
#include "memsim/waveform.hpp"

namespace memsim {

/// Series/parallel connection tree. Leaves name a memristor instance or a
/// fixed resistor; inner nodes hold at least two children.
struct TopologyNode {
    enum class Kind { Series, Parallel, Leaf };

    Kind kind = Kind::Leaf;
    std::vector<TopologyNode> children;  // Series/Parallel
    std::string element;                 // Leaf

    bool operator==(const TopologyNode&) const = default;
};

struct MemristorInstance {
    std::string name;
    std::string model;       // name of a declared model
    int initial_state = 0;   // < K of the model

    bool operator==(const MemristorInstance&) const = default;
};

struct FixedResistor {
    std::string name;
    double ohms = 0.0;

    bool operator==(const FixedResistor&) const = default;
};

/// One parsed circuit file: device models, element declarations, the
/// connection tree and the single driving source.
struct CircuitSpec {
    std::vector<MemristorModel> models;          // declaration order
    std::vector<MemristorInstance> instances;    // first-appearance order
    std::vector<FixedResistor> fixed_resistors;  // declaration order
    TopologyNode topology;
    Waveform source;

    const MemristorModel* find_model(std::string_view name) const;
    const MemristorInstance* find_instance(std::string_view name) const;
    int instance_index(std::string_view name) const;  // -1 when absent
    const FixedResistor* find_resistor(std::string_view name) const;
};

bool operator==(const Waveform& a, const Waveform& b);
bool operator==(const RateEdgeParams& a, const RateEdgeParams& b);
bool operator==(const MemristorModel& a, const MemristorModel& b);
bool operator==(const CircuitSpec& a, const CircuitSpec& b);

/// Parse failure with 1-based source location.
class ParseError : public std::runtime_error {
  public:
    ParseError(int line, int column, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(column) +
                             ": " + message),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

/// Parses a numeric literal with SPICE magnitude suffixes
/// (meg=1e6, k=1e3, m=1e-3, u=1e-6, n=1e-9, p=1e-12, case-insensitive).
/// Throws ParseError on malformed input.
double parse_value(std::string_view token);

/// Parses the `.mn` circuit language; throws ParseError with the location of
/// the first syntax or validation failure.
CircuitSpec parse_circuit(std::string_view text);

/// Canonical text form; parse_circuit(format_circuit(s)) == s structurally.
std::string format_circuit(const CircuitSpec& spec);

/// Canonical literal: suffixed form when exact (10000 -> "10k"), shortest
/// round-trip decimal otherwise.
std::string format_value(double value);

}  // namespace memsim

#endif
