#include <doctest.h>

#include <map>
#include <random>

#include "memsim/circuit.hpp"
#include "test_util.hpp"

using namespace memsim;

namespace {

TopologyNode leaf(const std::string& name) {
    TopologyNode n;
    n.kind = TopologyNode::Kind::Leaf;
    n.element = name;
    return n;
}

TopologyNode series(std::vector<TopologyNode> children) {
    TopologyNode n;
    n.kind = TopologyNode::Kind::Series;
    n.children = std::move(children);
    return n;
}

TopologyNode parallel(std::vector<TopologyNode> children) {
    TopologyNode n;
    n.kind = TopologyNode::Kind::Parallel;
    n.children = std::move(children);
    return n;
}

}  // namespace

TEST_CASE("series and parallel reduction") {
    TopologyNode five = series({leaf("a"), leaf("b"), leaf("c"), leaf("d"), leaf("e")});
    std::map<std::string, double> all_off{
        {"a", 1e4}, {"b", 1e4}, {"c", 1e4}, {"d", 1e4}, {"e", 1e4}};
    CHECK(equivalent_resistance(five, all_off) == 5e4);

    std::map<std::string, double> one_on = all_off;
    one_on["c"] = 1e3;
    CHECK(equivalent_resistance(five, one_on) == 4.1e4);

    TopologyNode pair = parallel({leaf("a"), leaf("b")});
    CHECK(equivalent_resistance(pair, {{"a", 1e4}, {"b", 1e4}}) == doctest::Approx(5e3));
}

TEST_CASE("two identical series elements split the source evenly") {
    TopologyNode two = series({leaf("a"), leaf("b")});
    ConfigSolution sol = solve_configuration(two, {{"a", 1e4}, {"b", 1e4}});
    CHECK(sol.element_voltage_ratio.at("a") == doctest::Approx(0.5));
    CHECK(sol.element_voltage_ratio.at("b") == doctest::Approx(0.5));
    CHECK(sol.total_conductance == doctest::Approx(1.0 / 2e4));
}

TEST_CASE("five in series with one on: divider ratios") {
    TopologyNode five = series({leaf("a"), leaf("b"), leaf("c"), leaf("d"), leaf("e")});
    std::map<std::string, double> r{{"a", 1e4}, {"b", 1e4}, {"c", 1e4}, {"d", 1e4}, {"e", 1e3}};
    ConfigSolution sol = solve_configuration(five, r);
    // frozen against an independent nodal solve: each off device carries 10/41
    CHECK(sol.element_voltage_ratio.at("a") == doctest::Approx(10.0 / 41.0).epsilon(1e-12));
    CHECK(5.0 * sol.element_voltage_ratio.at("a") ==
          doctest::Approx(1.2195121951219512).epsilon(1e-12));  // volts at Va = 5 V
    CHECK(sol.element_voltage_ratio.at("e") == doctest::Approx(1.0 / 41.0).epsilon(1e-12));
}

TEST_CASE("single element sees the whole source") {
    ConfigSolution sol = solve_configuration(leaf("m"), {{"m", 1e4}});
    CHECK(sol.element_voltage_ratio.at("m") == 1.0);
    CHECK(total_current(sol, 1.0) == doctest::Approx(1e-4));
}

TEST_CASE("total_current is Ohm's law on the equivalent network") {
    ConfigSolution on = solve_configuration(leaf("m"), {{"m", 1e3}});
    CHECK(total_current(on, 1.0) == doctest::Approx(1e-3));
    TopologyNode five = series({leaf("a"), leaf("b"), leaf("c"), leaf("d"), leaf("e")});
    std::map<std::string, double> all_off{
        {"a", 1e4}, {"b", 1e4}, {"c", 1e4}, {"d", 1e4}, {"e", 1e4}};
    CHECK(total_current(solve_configuration(five, all_off), 5.0) == doctest::Approx(1e-4));
}

namespace {

TopologyNode random_tree(std::mt19937_64& rng, int depth, int& next,
                         std::map<std::string, double>& r) {
    auto pick = [&](int lo, int hi) {
        return static_cast<int>(lo + rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    if (depth >= 3 || pick(0, 2) == 0) {
        std::string name = "e" + std::to_string(next++);
        r[name] = 100.0 * pick(1, 100);
        return leaf(name);
    }
    TopologyNode n;
    n.kind = pick(0, 1) ? TopologyNode::Kind::Series : TopologyNode::Kind::Parallel;
    int kids = pick(2, 4);
    for (int i = 0; i < kids; ++i) n.children.push_back(random_tree(rng, depth + 1, next, r));
    return n;
}

void check_kvl(const TopologyNode& node, const ConfigSolution& sol, double ratio) {
    if (node.kind == TopologyNode::Kind::Leaf) {
        CHECK(sol.element_voltage_ratio.at(node.element) == doctest::Approx(ratio).epsilon(1e-12));
        return;
    }
    if (node.kind == TopologyNode::Kind::Parallel) {
        for (const auto& c : node.children) check_kvl(c, sol, ratio);
        return;
    }
    // Series: child ratios must sum to the node's ratio
    double sum = 0.0;
    std::function<double(const TopologyNode&)> first_ratio = [&](const TopologyNode& n) {
        if (n.kind == TopologyNode::Kind::Leaf) return sol.element_voltage_ratio.at(n.element);
        if (n.kind == TopologyNode::Kind::Parallel) return first_ratio(n.children.front());
        double s = 0.0;
        for (const auto& c : n.children) s += first_ratio(c);
        return s;
    };
    for (const auto& c : node.children) sum += first_ratio(c);
    CHECK(sum == doctest::Approx(ratio).epsilon(1e-9));
    for (const auto& c : node.children) check_kvl(c, sol, first_ratio(c));
}

}  // namespace

TEST_CASE("property: KVL, linearity and monotonicity on random series-parallel trees") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 100; ++round) {
        std::map<std::string, double> r;
        int next = 0;
        TopologyNode tree = random_tree(rng, 0, next, r);
        ConfigSolution sol = solve_configuration(tree, r);

        check_kvl(tree, sol, 1.0);

        // linearity: scaling the source scales every element voltage
        for (const auto& [name, ratio] : sol.element_voltage_ratio) {
            CHECK(ratio * 7.5 == doctest::Approx(7.5 * ratio));  // exact by construction
            CHECK(ratio >= 0.0);
        }

        // raising any one resistance never lowers the equivalent resistance
        double base = equivalent_resistance(tree, r);
        for (auto& [name, ohms] : r) {
            auto bumped = r;
            bumped[name] = ohms * 1.5;
            CHECK(equivalent_resistance(tree, bumped) >= base * (1.0 - 1e-12));
        }
    }
}
