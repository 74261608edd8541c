#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "memsim/device.hpp"

using namespace memsim;

namespace {

MemristorModel binary_model() {
    MemristorModel m;
    m.name = "B";
    m.resistances = {10e3, 1e3};
    m.up_edges = {{3e5, 0.05}};
    m.down_edges = {{3e5, 0.05}};
    return m;
}

MemristorModel tri_model() {
    MemristorModel m;
    m.name = "T";
    m.resistances = {10e3, 3e3, 1e3};
    m.up_edges = {{3e5, 0.05}, {3e5, 0.07}};
    m.down_edges = {{3e5, 0.05}, {3e5, 0.07}};
    return m;
}

}  // namespace

TEST_CASE("switching rate follows the exponential law") {
    RateEdgeParams e{3e5, 0.05};
    // exp(20)/3e5, frozen from an arbitrary-precision evaluation
    CHECK(rate_up(e, 1.0) == doctest::Approx(1617.2173180326342).epsilon(1e-12));
    CHECK(rate_down(e, -1.0) == doctest::Approx(1617.2173180326342).epsilon(1e-12));

    // exp(1.5/0.07)/3e5, parameters of the tri-state upper edge
    RateEdgeParams e7{3e5, 0.07};
    CHECK(rate_down(e7, -1.5) == doctest::Approx(6748.2175000964115).epsilon(1e-12));
}

TEST_CASE("rates are gated by drive sign") {
    RateEdgeParams e{3e5, 0.05};
    CHECK(rate_up(e, -0.3) == 0.0);
    CHECK(rate_up(e, 0.0) == 0.0);
    CHECK(rate_down(e, 0.7) == 0.0);
    CHECK(rate_down(e, 0.0) == 0.0);
}

TEST_CASE("rates reject non-finite voltages") {
    RateEdgeParams e{3e5, 0.05};
    CHECK_THROWS_AS(rate_up(e, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(rate_down(e, -INFINITY), std::invalid_argument);
}

TEST_CASE("rate evaluation is clamped instead of overflowing") {
    RateEdgeParams e{3e5, 0.05};
    double r = rate_up(e, 100.0);  // exp(2000) overflows double
    CHECK(r == kRateClamp);
    CHECK(std::isfinite(r));
    CHECK(rate_down(e, -100.0) == kRateClamp);
}

TEST_CASE("rate properties: monotonicity, mirror symmetry, exponential scaling") {
    RateEdgeParams e{3e5, 0.05};
    double prev = 0.0;
    for (double v = 0.01; v < 2.0; v += 0.01) {
        double r = rate_up(e, v);
        CHECK(r > prev);
        prev = r;
        CHECK(rate_down(e, -v) == r);  // mirror law
    }
    // rate_up(e, v_scale*ln(x)) == x/tau
    for (double x : {2.0, 10.0, 100.0, 1e4}) {
        CHECK(rate_up(e, e.v_scale * std::log(x)) ==
              doctest::Approx(x / e.tau).epsilon(1e-12));
    }
}

TEST_CASE("resistance lookup") {
    MemristorModel b = binary_model();
    CHECK(resistance(b, 0) == 10e3);
    CHECK(resistance(b, 1) == 1e3);
    CHECK(resistance(tri_model(), 1) == 3e3);
    CHECK_THROWS_AS(resistance(b, 2), std::out_of_range);
    CHECK_THROWS_AS(resistance(b, -1), std::out_of_range);
}

TEST_CASE("validate_model flags each broken invariant") {
    CHECK(validate_model(binary_model()).empty());
    CHECK(validate_model(tri_model()).empty());

    MemristorModel increasing = binary_model();
    increasing.resistances = {1e3, 10e3};
    auto v = validate_model(increasing);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().field == "resistances");

    MemristorModel zero_tau = binary_model();
    zero_tau.up_edges[0].tau = 0.0;
    v = validate_model(zero_tau);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().field == "up_edges[0].tau");

    MemristorModel wrong_len = tri_model();
    wrong_len.down_edges.pop_back();
    CHECK_FALSE(validate_model(wrong_len).empty());
}
