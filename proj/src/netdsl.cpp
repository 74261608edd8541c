#include "memsim/netdsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>

namespace memsim {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

std::optional<int> suffix_exponent(std::string_view s) {
    if (s.empty()) return 0;
    if (iequals(s, "meg")) return 6;
    if (s.size() != 1) return std::nullopt;
    switch (std::tolower(static_cast<unsigned char>(s[0]))) {
        case 'k': return 3;
        case 'm': return -3;
        case 'u': return -6;
        case 'n': return -9;
        case 'p': return -12;
        default: return std::nullopt;
    }
}

// Validates and evaluates a literal: [sign] digits [. digits] [e[sign]digits] [suffix].
// The suffix is folded into the decimal exponent so strtod rounds exactly once.
std::optional<double> try_parse_value(std::string_view tok) {
    std::size_t i = 0;
    if (i < tok.size() && (tok[i] == '+' || tok[i] == '-')) ++i;
    std::size_t digits = 0;
    while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i, ++digits;
    if (i < tok.size() && tok[i] == '.') {
        ++i;
        while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i, ++digits;
    }
    if (digits == 0) return std::nullopt;
    std::size_t mantissa_end = i;
    long exponent = 0;
    if (i < tok.size() && (tok[i] == 'e' || tok[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < tok.size() && (tok[j] == '+' || tok[j] == '-')) ++j;
        std::size_t exp_digits = 0;
        while (j < tok.size() && std::isdigit(static_cast<unsigned char>(tok[j]))) ++j, ++exp_digits;
        if (exp_digits == 0) return std::nullopt;
        exponent = std::strtol(std::string(tok.substr(i + 1, j - i - 1)).c_str(), nullptr, 10);
        i = j;
    }
    auto suffix = suffix_exponent(tok.substr(i));
    if (!suffix) return std::nullopt;
    std::string rebuilt(tok.substr(0, mantissa_end));
    rebuilt += "e" + std::to_string(exponent + *suffix);
    char* end = nullptr;
    double value = std::strtod(rebuilt.c_str(), &end);
    if (end != rebuilt.c_str() + rebuilt.size()) return std::nullopt;
    return value;
}

struct Token {
    std::string text;
    int column = 0;  // 1-based
    bool is_word = false;
};

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

std::vector<Token> lex_line(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') break;  // comment to end of line
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (is_word_char(c)) {
            std::size_t j = i;
            while (j < line.size() && is_word_char(line[j])) ++j;
            out.push_back({std::string(line.substr(i, j - i)), static_cast<int>(i + 1), true});
            i = j;
        } else {
            out.push_back({std::string(1, c), static_cast<int>(i + 1), false});
            ++i;
        }
    }
    return out;
}

struct Statement {
    int line = 0;
    std::vector<Token> tokens;
};

class Cursor {
  public:
    Cursor(const Statement& st) : st_(st) {}

    bool done() const { return pos_ >= st_.tokens.size(); }
    const Token& peek() const {
        if (done()) fail_at_end("unexpected end of line");
        return st_.tokens[pos_];
    }
    Token take() {
        Token t = peek();
        ++pos_;
        return t;
    }
    bool accept_punct(char c) {
        if (!done() && !peek().is_word && peek().text[0] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect_punct(char c, const std::string& what) {
        if (!accept_punct(c)) fail("expected '" + std::string(1, c) + "' " + what);
    }
    Token expect_word(const std::string& what) {
        if (done() || !peek().is_word) fail("expected " + what);
        return take();
    }
    void expect_done() {
        if (!done()) fail("unexpected trailing input '" + peek().text + "'");
    }

    // Numeric literal: optional sign token, word, optional spliced exponent
    // tail when the word ends in e/E (so "10E - 7" written as 10E-7 lexes back
    // together; '-' is a separate token in this lexer).
    double expect_value(const std::string& what) {
        int col = done() ? end_column() : peek().column;
        std::string text;
        if (!done() && !peek().is_word && (peek().text == "-" || peek().text == "+"))
            text += take().text;
        if (done() || !peek().is_word) fail_col(col, "expected numeric value " + what);
        text += take().text;
        if (!text.empty() && (text.back() == 'e' || text.back() == 'E') && !done() &&
            !peek().is_word && (peek().text == "-" || peek().text == "+")) {
            std::size_t save = pos_;
            std::string sign = take().text;
            if (!done() && peek().is_word &&
                std::isdigit(static_cast<unsigned char>(peek().text[0]))) {
                text += sign + take().text;
            } else {
                pos_ = save;
            }
        }
        auto v = try_parse_value(text);
        if (!v) fail_col(col, "malformed numeric literal '" + text + "' " + what);
        return *v;
    }

    long expect_int(const std::string& what) {
        int col = peek().column;
        double v = expect_value(what);
        double r = std::round(v);
        if (!(std::abs(v - r) < 1e-9) || std::abs(r) > 1e15)
            fail_col(col, "expected integer " + what);
        return static_cast<long>(r);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(st_.line, done() ? end_column() : peek().column, msg);
    }
    [[noreturn]] void fail_col(int col, const std::string& msg) const {
        throw ParseError(st_.line, col, msg);
    }
    int line() const { return st_.line; }

  private:
    [[noreturn]] void fail_at_end(const std::string& msg) const {
        throw ParseError(st_.line, end_column(), msg);
    }
    int end_column() const {
        return st_.tokens.empty() ? 1 : st_.tokens.back().column +
                                            static_cast<int>(st_.tokens.back().text.size());
    }

    const Statement& st_;
    std::size_t pos_ = 0;
};

std::vector<double> parse_value_list(Cursor& c, const std::string& what) {
    std::vector<double> out;
    c.expect_punct('[', "to open " + what);
    if (!c.accept_punct(']')) {
        out.push_back(c.expect_value("in " + what));
        while (c.accept_punct(',')) out.push_back(c.expect_value("in " + what));
        c.expect_punct(']', "to close " + what);
    }
    return out;
}

struct NetLeafRef {
    std::string name;
    std::string model;  // empty when unannotated
    int line = 0;
    int column = 0;
};

// factor := NAME (':' NAME)? | '(' expr ')'
// term   := factor ('|' factor)*
// expr   := term ('+' term)*
TopologyNode parse_topo_expr(Cursor& c, std::vector<NetLeafRef>& leaves);

TopologyNode parse_topo_factor(Cursor& c, std::vector<NetLeafRef>& leaves) {
    if (c.accept_punct('(')) {
        TopologyNode inner = parse_topo_expr(c, leaves);
        c.expect_punct(')', "to close group");
        return inner;
    }
    Token name = c.expect_word("element name");
    NetLeafRef ref{name.text, "", c.line(), name.column};
    if (c.accept_punct(':')) {
        Token model = c.expect_word("model name after ':'");
        ref.model = model.text;
    }
    leaves.push_back(ref);
    TopologyNode leaf;
    leaf.kind = TopologyNode::Kind::Leaf;
    leaf.element = ref.name;
    return leaf;
}

TopologyNode parse_topo_term(Cursor& c, std::vector<NetLeafRef>& leaves) {
    TopologyNode first = parse_topo_factor(c, leaves);
    if (c.done() || !c.accept_punct('|')) return first;
    TopologyNode node;
    node.kind = TopologyNode::Kind::Parallel;
    node.children.push_back(std::move(first));
    node.children.push_back(parse_topo_factor(c, leaves));
    while (c.accept_punct('|')) node.children.push_back(parse_topo_factor(c, leaves));
    return node;
}

TopologyNode parse_topo_expr(Cursor& c, std::vector<NetLeafRef>& leaves) {
    TopologyNode first = parse_topo_term(c, leaves);
    if (c.done() || !c.accept_punct('+')) return first;
    TopologyNode node;
    node.kind = TopologyNode::Kind::Series;
    node.children.push_back(std::move(first));
    node.children.push_back(parse_topo_term(c, leaves));
    while (c.accept_punct('+')) node.children.push_back(parse_topo_term(c, leaves));
    return node;
}

}  // namespace

double parse_value(std::string_view token) {
    auto v = try_parse_value(token);
    if (!v) throw ParseError(1, 1, "malformed numeric literal '" + std::string(token) + "'");
    return *v;
}

const MemristorModel* CircuitSpec::find_model(std::string_view name) const {
    for (const auto& m : models)
        if (m.name == name) return &m;
    return nullptr;
}

const MemristorInstance* CircuitSpec::find_instance(std::string_view name) const {
    for (const auto& i : instances)
        if (i.name == name) return &i;
    return nullptr;
}

int CircuitSpec::instance_index(std::string_view name) const {
    for (std::size_t i = 0; i < instances.size(); ++i)
        if (instances[i].name == name) return static_cast<int>(i);
    return -1;
}

const FixedResistor* CircuitSpec::find_resistor(std::string_view name) const {
    for (const auto& r : fixed_resistors)
        if (r.name == name) return &r;
    return nullptr;
}

bool operator==(const RateEdgeParams& a, const RateEdgeParams& b) {
    return a.tau == b.tau && a.v_scale == b.v_scale;
}

bool operator==(const MemristorModel& a, const MemristorModel& b) {
    return a.name == b.name && a.resistances == b.resistances && a.up_edges == b.up_edges &&
           a.down_edges == b.down_edges;
}

bool operator==(const Waveform& a, const Waveform& b) {
    return a.kind == b.kind && a.amplitude == b.amplitude && a.frequency == b.frequency &&
           a.phase == b.phase;
}

bool operator==(const CircuitSpec& a, const CircuitSpec& b) {
    return a.models == b.models && a.instances == b.instances &&
           a.fixed_resistors == b.fixed_resistors && a.topology == b.topology &&
           a.source == b.source;
}

CircuitSpec parse_circuit(std::string_view text) {
    std::vector<Statement> statements;
    {
        int lineno = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t end = text.find('\n', start);
            std::string_view line =
                text.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                                 : end - start);
            ++lineno;
            auto toks = lex_line(line);
            if (!toks.empty()) statements.push_back({lineno, std::move(toks)});
            if (end == std::string_view::npos) break;
            start = end + 1;
        }
    }

    CircuitSpec spec;
    const Statement* net_stmt = nullptr;
    std::vector<const Statement*> init_stmts;
    int source_count = 0, net_count = 0;

    auto name_in_use = [&](const std::string& n) {
        return spec.find_model(n) || spec.find_resistor(n);
    };

    // First pass: declarations and the source; the net and inits are resolved
    // after all models/resistors are known.
    for (const auto& st : statements) {
        Cursor c(st);
        Token kw = c.expect_word("statement keyword");
        if (kw.text == "model") {
            Token name = c.expect_word("model name");
            if (name_in_use(name.text))
                c.fail_col(name.column, "duplicate name '" + name.text + "'");
            MemristorModel m;
            m.name = name.text;
            long states = -1;
            std::vector<double> taus_up, vs_up, taus_down, vs_down;
            bool have[6] = {false, false, false, false, false, false};
            while (!c.done()) {
                Token key = c.expect_word("model attribute");
                c.expect_punct('=', "after '" + key.text + "'");
                if (key.text == "states") {
                    states = c.expect_int("for states");
                    have[0] = true;
                } else if (key.text == "R") {
                    m.resistances = parse_value_list(c, "R list");
                    have[1] = true;
                } else if (key.text == "tau_up") {
                    taus_up = parse_value_list(c, "tau_up list");
                    have[2] = true;
                } else if (key.text == "V_up") {
                    vs_up = parse_value_list(c, "V_up list");
                    have[3] = true;
                } else if (key.text == "tau_down") {
                    taus_down = parse_value_list(c, "tau_down list");
                    have[4] = true;
                } else if (key.text == "V_down") {
                    vs_down = parse_value_list(c, "V_down list");
                    have[5] = true;
                } else {
                    c.fail_col(key.column, "unknown model attribute '" + key.text + "'");
                }
            }
            static const char* kAttr[6] = {"states", "R", "tau_up", "V_up", "tau_down", "V_down"};
            for (int i = 0; i < 6; ++i)
                if (!have[i])
                    throw ParseError(st.line, 1,
                                     "model " + m.name + " is missing attribute '" +
                                         std::string(kAttr[i]) + "'");
            if (states < 2) throw ParseError(st.line, 1, "model needs states >= 2");
            auto expect_len = [&](std::size_t got, std::size_t want, const char* which) {
                if (got != want)
                    throw ParseError(st.line, 1,
                                     "model " + m.name + ": " + which + " needs " +
                                         std::to_string(want) + " entries, got " +
                                         std::to_string(got));
            };
            expect_len(m.resistances.size(), static_cast<std::size_t>(states), "R");
            expect_len(taus_up.size(), static_cast<std::size_t>(states - 1), "tau_up");
            expect_len(vs_up.size(), static_cast<std::size_t>(states - 1), "V_up");
            expect_len(taus_down.size(), static_cast<std::size_t>(states - 1), "tau_down");
            expect_len(vs_down.size(), static_cast<std::size_t>(states - 1), "V_down");
            for (long i = 0; i < states - 1; ++i) {
                m.up_edges.push_back({taus_up[static_cast<std::size_t>(i)],
                                      vs_up[static_cast<std::size_t>(i)]});
                m.down_edges.push_back({taus_down[static_cast<std::size_t>(i)],
                                        vs_down[static_cast<std::size_t>(i)]});
            }
            auto violations = validate_model(m);
            if (!violations.empty())
                throw ParseError(st.line, 1,
                                 "model " + m.name + ": " + violations.front().field + ": " +
                                     violations.front().rule);
            spec.models.push_back(std::move(m));
        } else if (kw.text == "res") {
            Token name = c.expect_word("resistor name");
            if (name_in_use(name.text))
                c.fail_col(name.column, "duplicate name '" + name.text + "'");
            double ohms = c.expect_value("for resistance");
            c.expect_done();
            if (!(ohms > 0.0) || !std::isfinite(ohms))
                throw ParseError(st.line, name.column, "resistance must be finite and > 0");
            spec.fixed_resistors.push_back({name.text, ohms});
        } else if (kw.text == "source") {
            ++source_count;
            if (source_count > 1)
                c.fail_col(kw.column, "a circuit has exactly one source statement");
            Token kind = c.expect_word("source kind (dc or sine)");
            std::map<std::string, double> kv;
            while (!c.done()) {
                Token key = c.expect_word("source attribute");
                c.expect_punct('=', "after '" + key.text + "'");
                double v = c.expect_value("for " + key.text);
                if (!kv.emplace(key.text, v).second)
                    c.fail_col(key.column, "duplicate attribute '" + key.text + "'");
            }
            auto need = [&](const char* k) {
                auto it = kv.find(k);
                if (it == kv.end())
                    throw ParseError(st.line, kind.column,
                                     "source " + kind.text + " needs '" + k + "='");
                double v = it->second;
                kv.erase(it);
                return v;
            };
            if (kind.text == "dc") {
                spec.source.kind = Waveform::Kind::Dc;
                spec.source.amplitude = need("V");
            } else if (kind.text == "sine") {
                spec.source.kind = Waveform::Kind::Sine;
                spec.source.amplitude = need("amp");
                spec.source.frequency = need("freq");
                if (auto it = kv.find("phase"); it != kv.end()) {
                    spec.source.phase = it->second;
                    kv.erase(it);
                }
                if (!(spec.source.frequency > 0.0))
                    throw ParseError(st.line, kind.column, "sine source needs freq > 0");
            } else {
                c.fail_col(kind.column, "unknown source kind '" + kind.text + "'");
            }
            if (!kv.empty())
                throw ParseError(st.line, kind.column,
                                 "unknown source attribute '" + kv.begin()->first + "'");
        } else if (kw.text == "net") {
            ++net_count;
            if (net_count > 1) c.fail_col(kw.column, "a circuit has exactly one net statement");
            net_stmt = &st;
        } else if (kw.text == "init") {
            init_stmts.push_back(&st);
        } else {
            c.fail_col(kw.column, "unknown statement '" + kw.text + "'");
        }
    }

    if (source_count == 0) throw ParseError(1, 1, "missing source statement");
    if (net_count == 0) throw ParseError(1, 1, "missing net statement");

    // Resolve the topology: leaves either name a declared resistor or declare
    // a memristor instance (bound by NAME:Model, or to the only model when
    // the file declares exactly one).
    {
        Cursor c(*net_stmt);
        c.expect_word("net");
        std::vector<NetLeafRef> leaves;
        spec.topology = parse_topo_expr(c, leaves);
        c.expect_done();

        for (const auto& leaf : leaves) {
            bool is_res = spec.find_resistor(leaf.name) != nullptr;
            if (is_res && !leaf.model.empty())
                throw ParseError(leaf.line, leaf.column,
                                 "'" + leaf.name + "' is a resistor and cannot carry a model");
            if (spec.find_instance(leaf.name) || (is_res && [&] {
                    int uses = 0;
                    for (const auto& l : leaves)
                        if (l.name == leaf.name) ++uses;
                    return uses > 1;
                }()))
                throw ParseError(leaf.line, leaf.column,
                                 "element '" + leaf.name + "' appears more than once in net");
            if (is_res) continue;
            MemristorInstance inst;
            inst.name = leaf.name;
            if (!leaf.model.empty()) {
                if (!spec.find_model(leaf.model))
                    throw ParseError(leaf.line, leaf.column,
                                     "unknown model " + leaf.model);
                inst.model = leaf.model;
            } else if (spec.models.size() == 1) {
                inst.model = spec.models.front().name;
            } else if (spec.models.empty()) {
                throw ParseError(leaf.line, leaf.column,
                                 "no model declared for instance '" + leaf.name + "'");
            } else {
                throw ParseError(leaf.line, leaf.column,
                                 "instance '" + leaf.name +
                                     "' needs an explicit model (" + leaf.name + ":Model)");
            }
            spec.instances.push_back(std::move(inst));
        }
    }

    for (const Statement* st : init_stmts) {
        Cursor c(*st);
        c.expect_word("init");
        if (c.done()) c.fail("init needs at least one NAME=STATE pair");
        while (!c.done()) {
            Token name = c.expect_word("instance name");
            c.expect_punct('=', "after '" + name.text + "'");
            long state = c.expect_int("for initial state");
            int idx = spec.instance_index(name.text);
            if (idx < 0)
                c.fail_col(name.column, "unknown instance '" + name.text + "' in init");
            const MemristorModel* m = spec.find_model(spec.instances[static_cast<std::size_t>(idx)].model);
            if (state < 0 || state >= m->state_count())
                c.fail_col(name.column,
                           "initial state " + std::to_string(state) + " out of range for model " +
                               m->name + " (K=" + std::to_string(m->state_count()) + ")");
            spec.instances[static_cast<std::size_t>(idx)].initial_state = static_cast<int>(state);
        }
    }

    return spec;
}

std::string format_value(double value) {
    if (value == 0.0) return "0";
    auto shortest = [](double v) {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        std::string s(buf, res.ptr);
        // strip '+' and leading zeros from any exponent, e.g. 1e+06 -> 1e6
        auto epos = s.find('e');
        if (epos != std::string::npos) {
            std::string exp = s.substr(epos + 1);
            bool neg = !exp.empty() && exp[0] == '-';
            std::size_t i = (neg || (!exp.empty() && exp[0] == '+')) ? 1 : 0;
            while (i + 1 < exp.size() && exp[i] == '0') ++i;
            s = s.substr(0, epos + 1) + (neg ? "-" : "") + exp.substr(i);
        }
        return s;
    };

    std::string best = shortest(value);
    if (std::abs(value) >= 1000.0) {
        for (auto [mult, sfx] : {std::pair<double, const char*>{1e6, "meg"}, {1e3, "k"}}) {
            double scaled = value / mult;
            if (std::abs(scaled) < 1.0 || std::abs(scaled) >= 1000.0) continue;
            std::string cand = shortest(scaled) + sfx;
            if (cand.size() <= best.size() && parse_value(cand) == value) best = cand;
        }
    }
    return best;
}

namespace {

void print_topology(std::ostringstream& out, const TopologyNode& node, const CircuitSpec& spec,
                    TopologyNode::Kind parent) {
    if (node.kind == TopologyNode::Kind::Leaf) {
        out << node.element;
        if (const auto* inst = spec.find_instance(node.element)) out << ':' << inst->model;
        return;
    }
    bool parens = !(parent == TopologyNode::Kind::Series &&
                    node.kind == TopologyNode::Kind::Parallel) &&
                  parent != TopologyNode::Kind::Leaf;  // Leaf marks the root call
    const char* sep = node.kind == TopologyNode::Kind::Series ? " + " : " | ";
    if (parens) out << '(';
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out << sep;
        print_topology(out, node.children[i], spec, node.kind);
    }
    if (parens) out << ')';
}

std::string format_list(const std::vector<double>& vals) {
    std::string out = "[";
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) out += ",";
        out += format_value(vals[i]);
    }
    return out + "]";
}

}  // namespace

std::string format_circuit(const CircuitSpec& spec) {
    std::ostringstream out;
    for (const auto& m : spec.models) {
        std::vector<double> tu, vu, td, vd;
        for (const auto& e : m.up_edges) {
            tu.push_back(e.tau);
            vu.push_back(e.v_scale);
        }
        for (const auto& e : m.down_edges) {
            td.push_back(e.tau);
            vd.push_back(e.v_scale);
        }
        out << "model " << m.name << " states=" << m.state_count()
            << " R=" << format_list(m.resistances) << " tau_up=" << format_list(tu)
            << " V_up=" << format_list(vu) << " tau_down=" << format_list(td)
            << " V_down=" << format_list(vd) << '\n';
    }
    for (const auto& r : spec.fixed_resistors)
        out << "res " << r.name << ' ' << format_value(r.ohms) << '\n';
    if (spec.source.kind == Waveform::Kind::Dc) {
        out << "source dc V=" << format_value(spec.source.amplitude) << '\n';
    } else {
        out << "source sine amp=" << format_value(spec.source.amplitude)
            << " freq=" << format_value(spec.source.frequency);
        if (spec.source.phase != 0.0) out << " phase=" << format_value(spec.source.phase);
        out << '\n';
    }
    out << "net ";
    print_topology(out, spec.topology, spec, TopologyNode::Kind::Leaf);
    out << '\n';
    bool any_init = false;
    for (const auto& inst : spec.instances)
        if (inst.initial_state != 0) any_init = true;
    if (any_init) {
        out << "init";
        for (const auto& inst : spec.instances)
            if (inst.initial_state != 0) out << ' ' << inst.name << '=' << inst.initial_state;
        out << '\n';
    }
    return out.str();
}

}  // namespace memsim
