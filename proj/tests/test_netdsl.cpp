#include <doctest.h>

#include <cstdint>
#include <random>

#include "memsim/netdsl.hpp"
#include "test_util.hpp"

using namespace memsim;

TEST_CASE("parse_value handles decimal, scientific and suffixed literals") {
    CHECK(parse_value("10k") == 1.0e4);
    CHECK(parse_value("3E5") == 3.0e5);
    CHECK(parse_value("2meg") == 2.0e6);
    CHECK(parse_value("2MEG") == 2.0e6);
    CHECK(parse_value(".05") == 0.05);
    CHECK(parse_value("10E-7") == 1e-6);
    CHECK(parse_value("-5") == -5.0);
    CHECK(parse_value("4u") == 4e-6);
    CHECK(parse_value("7n") == 7e-9);
    CHECK(parse_value("2p") == 2e-12);
    CHECK(parse_value("3m") == 3e-3);
    CHECK(parse_value("1e3k") == 1e6);
}

TEST_CASE("parse_value rejects malformed literals") {
    for (const char* bad : {"", "k", "10kx", "1..2", "meg", "10q", "1e", "--3", "0x10"}) {
        CHECK_THROWS_AS(parse_value(bad), ParseError);
    }
    try {
        parse_value("10kx");
    } catch (const ParseError& e) {
        CHECK(e.line() >= 1);
    }
}

TEST_CASE("single ac-driven memristor circuit parses") {
    CircuitSpec spec = parse_circuit(testutil::kBinarySingleAc);
    REQUIRE(spec.models.size() == 1);
    CHECK(spec.models[0].name == "B");
    CHECK(spec.models[0].resistances == std::vector<double>{1e4, 1e3});
    REQUIRE(spec.instances.size() == 1);
    CHECK(spec.instances[0].name == "m1");
    CHECK(spec.instances[0].model == "B");
    CHECK(spec.instances[0].initial_state == 0);
    CHECK(spec.source.kind == Waveform::Kind::Sine);
    CHECK(spec.source.amplitude == 1.0);
    CHECK(spec.source.frequency == 200.0);
    CHECK(spec.topology.kind == TopologyNode::Kind::Leaf);
}

TEST_CASE("five series memristors bind to the only declared model") {
    CircuitSpec spec = parse_circuit(testutil::kFiveSeriesDc5V);
    REQUIRE(spec.instances.size() == 5);
    for (const auto& inst : spec.instances) CHECK(inst.model == "B");
    CHECK(spec.source.kind == Waveform::Kind::Dc);
    CHECK(spec.source.amplitude == 5.0);
    REQUIRE(spec.topology.kind == TopologyNode::Kind::Series);
    CHECK(spec.topology.children.size() == 5);
}

TEST_CASE("parse errors carry a location") {
    const char* unknown_model =
        "model B states=2 R=[10k,1k] tau_up=[3e5] V_up=[0.05] tau_down=[3e5] V_down=[0.05]\n"
        "source dc V=1\n"
        "net m1:X\n";
    try {
        parse_circuit(unknown_model);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("unknown model X") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_circuit("source dc V=1\nnet m1\n"), ParseError);  // no model
    CHECK_THROWS_AS(parse_circuit("net m1\n"), ParseError);                 // no source

    const char* dup =
        "model B states=2 R=[10k,1k] tau_up=[3e5] V_up=[0.05] tau_down=[3e5] V_down=[0.05]\n"
        "source dc V=1\n"
        "net m1 + m1\n";
    CHECK_THROWS_AS(parse_circuit(dup), ParseError);

    const char* bad_init =
        "model B states=2 R=[10k,1k] tau_up=[3e5] V_up=[0.05] tau_down=[3e5] V_down=[0.05]\n"
        "source dc V=1\n"
        "net m1\n"
        "init m1=7\n";
    try {
        parse_circuit(bad_init);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }

    const char* two_sources =
        "model B states=2 R=[10k,1k] tau_up=[3e5] V_up=[0.05] tau_down=[3e5] V_down=[0.05]\n"
        "source dc V=1\nsource dc V=2\nnet m1\n";
    CHECK_THROWS_AS(parse_circuit(two_sources), ParseError);
}

TEST_CASE("comments, init overrides and fixed resistors") {
    const char* text =
        "# tri-state pair with a shunt\n"
        "model T states=3 R=[10k,3k,1k] tau_up=[3e5,3e5] V_up=[0.05,0.07] "
        "tau_down=[3e5,3e5] V_down=[0.05,0.07]\n"
        "res Rload 2k  # plain resistor\n"
        "source dc V=1.5\n"
        "net (m1:T + m2:T) | Rload\n"
        "init m2=1\n";
    CircuitSpec spec = parse_circuit(text);
    CHECK(spec.fixed_resistors.size() == 1);
    CHECK(spec.fixed_resistors[0].ohms == 2e3);
    CHECK(spec.instances[1].initial_state == 1);
    CHECK(spec.topology.kind == TopologyNode::Kind::Parallel);
}

TEST_CASE("formatting normalizes literals") {
    CHECK(format_value(10000.0) == "10k");
    CHECK(format_value(0.0) == "0");
    CHECK(parse_value(format_value(0.05)) == 0.05);
    CHECK(parse_value(format_value(3e5)) == 3e5);
    // round-trip exactness on awkward values
    for (double v : {1.0 / 3.0, 1234.5678, 9.999999e8, 2.5e-7}) {
        CHECK(parse_value(format_value(v)) == v);
    }
}

TEST_CASE("format/parse round-trip on the worked circuits") {
    for (const char* text : {testutil::kBinarySingleAc, testutil::kFiveSeriesDc5V,
                             testutil::kTriSingleAc, testutil::kTriPairDc}) {
        CircuitSpec spec = parse_circuit(text);
        CircuitSpec again = parse_circuit(format_circuit(spec));
        CHECK(again == spec);
    }
}

namespace {

// random series-parallel circuit over a couple of models
CircuitSpec random_spec(std::mt19937_64& rng) {
    auto pick = [&](int lo, int hi) {
        return static_cast<int>(lo + rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    CircuitSpec spec;
    int n_models = pick(1, 2);
    for (int i = 0; i < n_models; ++i) {
        MemristorModel m;
        m.name = "M" + std::to_string(i);
        int k = pick(2, 4);
        for (int s = 0; s < k; ++s) m.resistances.push_back(1e3 * (k - s) + pick(0, 999));
        for (int s = 0; s + 1 < k; ++s) {
            m.up_edges.push_back({1e5 * pick(1, 9), 0.01 * pick(1, 9)});
            m.down_edges.push_back({1e5 * pick(1, 9), 0.01 * pick(1, 9)});
        }
        spec.models.push_back(std::move(m));
    }
    if (pick(0, 1)) {
        spec.source.kind = Waveform::Kind::Dc;
        spec.source.amplitude = pick(-5, 5);
    } else {
        spec.source.kind = Waveform::Kind::Sine;
        spec.source.amplitude = 0.5 * pick(1, 6);
        spec.source.frequency = 100.0 * pick(1, 20);
        if (pick(0, 1)) spec.source.phase = 0.1 * pick(1, 10);
    }
    int n_res = pick(0, 2);
    for (int i = 0; i < n_res; ++i)
        spec.fixed_resistors.push_back({"r" + std::to_string(i), 100.0 * pick(1, 50)});

    int next_inst = 0;
    std::size_t res_used = 0;
    std::function<TopologyNode(int)> build = [&](int depth) {
        TopologyNode node;
        bool leaf = depth >= 2 || pick(0, 2) == 0;
        if (leaf) {
            if (res_used < spec.fixed_resistors.size() && pick(0, 3) == 0) {
                node.kind = TopologyNode::Kind::Leaf;
                node.element = spec.fixed_resistors[res_used++].name;
                return node;
            }
            node.kind = TopologyNode::Kind::Leaf;
            std::string name = "m" + std::to_string(next_inst++);
            const auto& model = spec.models[static_cast<std::size_t>(
                pick(0, static_cast<int>(spec.models.size()) - 1))];
            int init = pick(0, model.state_count() - 1);
            spec.instances.push_back({name, model.name, init});
            node.element = name;
            return node;
        }
        node.kind = pick(0, 1) ? TopologyNode::Kind::Series : TopologyNode::Kind::Parallel;
        int n_children = pick(2, 3);
        for (int c = 0; c < n_children; ++c) node.children.push_back(build(depth + 1));
        return node;
    };
    spec.topology = build(0);
    if (spec.instances.empty()) {  // ensure at least one memristor
        spec.instances.push_back({"mx", spec.models[0].name, 0});
        TopologyNode leaf;
        leaf.kind = TopologyNode::Kind::Leaf;
        leaf.element = "mx";
        if (spec.topology.kind == TopologyNode::Kind::Leaf) {
            TopologyNode series;
            series.kind = TopologyNode::Kind::Series;
            series.children.push_back(spec.topology);
            series.children.push_back(leaf);
            spec.topology = series;
        } else {
            spec.topology.children.push_back(leaf);
        }
    }
    // drop declared-but-unused resistors so the spec stays well-formed
    spec.fixed_resistors.resize(res_used);
    return spec;
}

}  // namespace

TEST_CASE("property: parse(format(spec)) is the identity on random specs") {
    std::mt19937_64 rng(20260809);
    for (int round = 0; round < 200; ++round) {
        CircuitSpec spec = random_spec(rng);
        std::string text = format_circuit(spec);
        CAPTURE(text);
        CircuitSpec again = parse_circuit(text);
        CHECK(again == spec);
    }
}
