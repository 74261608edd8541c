#include "memsim/device.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace memsim {

namespace {

double clamped_rate(const RateEdgeParams& edge, double drive) {
    // drive > 0 is required by both callers; rate = exp(drive/v_scale)/tau.
    double r = std::exp(drive / edge.v_scale) / edge.tau;
    return r > kRateClamp ? kRateClamp : r;
}

void require_finite(double v) {
    if (!std::isfinite(v))
        throw std::invalid_argument("device voltage must be finite, got " + std::to_string(v));
}

}  // namespace

double rate_up(const RateEdgeParams& edge, double v) {
    require_finite(v);
    if (v <= 0.0) return 0.0;
    return clamped_rate(edge, v);
}

double rate_down(const RateEdgeParams& edge, double v) {
    require_finite(v);
    if (v >= 0.0) return 0.0;
    return clamped_rate(edge, -v);
}

double resistance(const MemristorModel& model, int state) {
    if (state < 0 || state >= model.state_count())
        throw std::out_of_range("state " + std::to_string(state) + " out of range for model " +
                                model.name + " with " + std::to_string(model.state_count()) +
                                " states");
    return model.resistances[static_cast<std::size_t>(state)];
}

std::vector<ModelViolation> validate_model(const MemristorModel& model) {
    std::vector<ModelViolation> out;
    const int k = model.state_count();
    if (k < 2) out.push_back({"resistances", "model needs at least 2 states"});

    for (int i = 0; i < k; ++i) {
        double r = model.resistances[static_cast<std::size_t>(i)];
        if (!(r > 0.0) || !std::isfinite(r)) {
            out.push_back({"resistances[" + std::to_string(i) + "]",
                           "resistance must be finite and > 0"});
        }
    }
    for (int i = 0; i + 1 < k; ++i) {
        if (!(model.resistances[static_cast<std::size_t>(i)] >
              model.resistances[static_cast<std::size_t>(i) + 1])) {
            out.push_back({"resistances",
                           "resistances must be strictly decreasing in state index (off-state "
                           "has the highest resistance)"});
            break;
        }
    }

    auto check_edges = [&](const std::vector<RateEdgeParams>& edges, const char* field) {
        if (static_cast<int>(edges.size()) != k - 1 && k >= 2) {
            out.push_back({field, "expected " + std::to_string(k - 1) + " edges, got " +
                                      std::to_string(edges.size())});
        }
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const auto& e = edges[i];
            if (!(e.tau > 0.0) || !std::isfinite(e.tau))
                out.push_back({std::string(field) + "[" + std::to_string(i) + "].tau",
                               "must be finite and > 0"});
            if (!(e.v_scale > 0.0) || !std::isfinite(e.v_scale))
                out.push_back({std::string(field) + "[" + std::to_string(i) + "].v_scale",
                               "must be finite and > 0"});
        }
    };
    check_edges(model.up_edges, "up_edges");
    check_edges(model.down_edges, "down_edges");
    return out;
}

}  // namespace memsim
