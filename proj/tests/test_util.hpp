#ifndef MEMSIM_TESTS_TEST_UTIL_HPP
#define MEMSIM_TESTS_TEST_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "memsim/netdsl.hpp"

namespace testutil {

// Circuits used across the suites. Model parameters follow the worked cases:
// binary 10k/1k with tau=3e5 s and 0.05 V scales, tri-state 10k/3k/1k with a
// 0.07 V scale on the upper transition.

inline const char* kBinarySingleAc =
    "model B states=2 R=[10k,1k] tau_up=[3e5] V_up=[0.05] tau_down=[3e5] V_down=[0.05]\n"
    "source sine amp=1 freq=200\n"
    "net m1:B\n";

inline const char* kBinarySingleDc1V =
    "model B states=2 R=[10k,1k] tau_up=[3e5] V_up=[0.05] tau_down=[3e5] V_down=[0.05]\n"
    "source dc V=1\n"
    "net m1:B\n";

inline const char* kFiveSeriesDc5V =
    "model B states=2 R=[10k,1k] tau_up=[3e5] V_up=[0.05] tau_down=[3e5] V_down=[0.05]\n"
    "source dc V=5\n"
    "net m1 + m2 + m3 + m4 + m5\n";

inline const char* kTriSingleAc =
    "model T states=3 R=[10k,3k,1k] tau_up=[3e5,3e5] V_up=[0.05,0.07] "
    "tau_down=[3e5,3e5] V_down=[0.05,0.07]\n"
    "source sine amp=1.5 freq=200\n"
    "net m1:T\n";

inline const char* kTriPairDc =
    "model T states=3 R=[10k,3k,1k] tau_up=[3e5,3e5] V_up=[0.05,0.07] "
    "tau_down=[3e5,3e5] V_down=[0.05,0.07]\n"
    "source dc V=1.5\n"
    "net m1 + m2\n";

inline const char* kTwoSeriesAc =
    "model B states=2 R=[10k,1k] tau_up=[3e5] V_up=[0.05] tau_down=[3e5] V_down=[0.05]\n"
    "source sine amp=1 freq=200\n"
    "net m1 + m2\n";

inline memsim::CircuitSpec circuit(const char* text) { return memsim::parse_circuit(text); }

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::abs((i + 1) / n - f));
        d = std::max(d, std::abs(f - i / n));
    }
    return d;
}

}  // namespace testutil

#endif
