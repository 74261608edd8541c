#ifndef MEMSIM_WAVEFORM_HPP
#define MEMSIM_WAVEFORM_HPP

#include <cmath>
#include <numbers>

namespace memsim {

/// Single driving voltage source: constant or sinusoidal.
struct Waveform {
    enum class Kind { Dc, Sine };

    Kind kind = Kind::Dc;
    double amplitude = 0.0;  // volts (peak for Sine)
    double frequency = 0.0;  // hertz, Sine only
    double phase = 0.0;      // radians, Sine only

    bool is_dc() const { return kind == Kind::Dc; }

    double value(double t) const {
        if (kind == Kind::Dc) return amplitude;
        return amplitude * std::sin(2.0 * std::numbers::pi * frequency * t + phase);
    }
};

}  // namespace memsim

#endif
