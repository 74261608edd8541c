#include "memsim/spicegen.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "memsim/master.hpp"
#include "memsim/netdsl.hpp"

namespace memsim {

namespace {

constexpr int kMaxStates = 64;
constexpr int kMaxModelStates = 10;  // single-digit state indices in parameter names

std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Paper-style numerals: uppercase exponent without '+' or leading zeros
// (3E5, 1E-6), fractions without the leading zero (.05).
std::string spice_num(double v) {
    std::string s = shortest(v);
    auto epos = s.find('e');
    if (epos != std::string::npos) {
        std::string mant = s.substr(0, epos);
        std::string exp = s.substr(epos + 1);
        bool neg = !exp.empty() && exp[0] == '-';
        std::size_t i = (neg || (!exp.empty() && exp[0] == '+')) ? 1 : 0;
        while (i + 1 < exp.size() && exp[i] == '0') ++i;
        s = mant + "E" + (neg ? "-" : "") + exp.substr(i);
    }
    if (s.rfind("0.", 0) == 0) s = s.substr(1);
    else if (s.rfind("-0.", 0) == 0) s = "-" + s.substr(2);
    return s;
}

// Resistances in the tables use the k suffix (10k, 3k, 1k).
std::string spice_res(double ohms) {
    for (auto [mult, sfx] : {std::pair<double, const char*>{1e6, "meg"}, {1e3, "k"}}) {
        double scaled = ohms / mult;
        if (scaled >= 1.0 && scaled < 1000.0 && scaled == std::floor(scaled) &&
            scaled * mult == ohms)
            return shortest(scaled) + sfx;
    }
    return spice_num(ohms);
}

struct CopyInfo {
    // per instance index: node pair of its resistor in this network copy
    std::vector<std::pair<std::string, std::string>> inst_nodes;
    std::vector<std::string> entry_resistors;  // elements carrying the copy's total current
};

std::string volt_expr(const std::pair<std::string, std::string>& nodes) {
    if (nodes.second == "0") return "V(" + nodes.first + ")";
    return "V(" + nodes.first + "," + nodes.second + ")";
}

// One gm(...) * V(p<state>) term of a behavioral expression.
struct Term {
    std::int64_t count = 1;
    std::string tau_param;
    std::string v_param;
    std::string drive;  // voltage expression handed to gm, sign included
    int prob_state = 0;
    bool negative = false;
};

std::string render_terms(const std::vector<Term>& terms) {
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const Term& t = terms[i];
        if (t.negative) out += "-";
        else if (i > 0) out += "+";
        if (t.count != 1) out += std::to_string(t.count) + "*";
        out += "gm(" + t.tau_param + "," + t.v_param + "," + t.drive + ")*V(p" +
               std::to_string(t.prob_state) + ")";
    }
    return out;
}

class Emitter {
  public:
    Emitter(const StateSpace& space, const Waveform& wave, const SimWindow& sim)
        : space_(space), wave_(wave), sim_(sim) {}

    NetlistDoc emit();
    std::vector<std::string> integrator_lines();

  private:
    const StateSpace& space_;
    const Waveform& wave_;
    const SimWindow& sim_;
    std::vector<CopyInfo> copies_;
    std::vector<std::string> copy_lines_;
    int rseq_ = 1;

    void check_capacity() const;
    std::string tau_name(int model_idx, int from, int to) const;
    std::string v_name(int model_idx, int from, int to) const;
    void build_copy(int state, const TopologyNode& node, const std::string& top,
                    const std::string& bottom, bool entry, CopyInfo& info, int& internal_seq);
    void build_copies();

    // representative device for a (symmetry group of m, digit) slot in a state
    int rep_device(int state, int m, int digit) const;

    std::string state_expression(int a) const;
    std::vector<Term> influx_terms(bool positive_drive) const;
};

void Emitter::check_capacity() const {
    if (space_.size() > kMaxStates)
        throw SimulationError("netlist capacity exceeded: " + std::to_string(space_.size()) +
                              " probability nodes (cap " + std::to_string(kMaxStates) + ")");
    for (int m = 0; m < space_.instance_count(); ++m)
        if (space_.radix(m) > kMaxModelStates)
            throw SimulationError("netlist capacity exceeded: model with " +
                                  std::to_string(space_.radix(m)) + " states (cap " +
                                  std::to_string(kMaxModelStates) + ")");
}

std::string Emitter::tau_name(int model_idx, int from, int to) const {
    std::string base = "tau" + std::to_string(from) + std::to_string(to);
    if (space_.spec().models.size() > 1)
        base += "_" + space_.spec().models[static_cast<std::size_t>(model_idx)].name;
    return base;
}

std::string Emitter::v_name(int model_idx, int from, int to) const {
    std::string base = "V" + std::to_string(from) + std::to_string(to);
    if (space_.spec().models.size() > 1)
        base += "_" + space_.spec().models[static_cast<std::size_t>(model_idx)].name;
    return base;
}

void Emitter::build_copy(int state, const TopologyNode& node, const std::string& top,
                         const std::string& bottom, bool entry, CopyInfo& info,
                         int& internal_seq) {
    const CircuitSpec& spec = space_.spec();
    switch (node.kind) {
        case TopologyNode::Kind::Leaf: {
            std::string name = "R" + std::to_string(rseq_++);
            double ohms;
            int m = spec.instance_index(node.element);
            if (m >= 0) {
                const MemristorModel& model = space_.instance_model(m);
                ohms = model.resistances[static_cast<std::size_t>(
                    space_.state(state).digits[static_cast<std::size_t>(m)])];
                info.inst_nodes[static_cast<std::size_t>(m)] = {top, bottom};
            } else {
                ohms = spec.find_resistor(node.element)->ohms;
            }
            copy_lines_.push_back(name + " " + top + " " + bottom + " " + spice_res(ohms));
            if (entry) info.entry_resistors.push_back(name);
            return;
        }
        case TopologyNode::Kind::Series: {
            std::string prev = top;
            for (std::size_t i = 0; i < node.children.size(); ++i) {
                bool last = i + 1 == node.children.size();
                std::string next =
                    last ? bottom
                         : "n" + std::to_string(state) + "_" + std::to_string(internal_seq++);
                build_copy(state, node.children[i], prev, next, entry && i == 0, info,
                           internal_seq);
                prev = next;
            }
            return;
        }
        case TopologyNode::Kind::Parallel:
            for (const auto& child : node.children)
                build_copy(state, child, top, bottom, entry, info, internal_seq);
            return;
    }
}

void Emitter::build_copies() {
    copies_.clear();
    copy_lines_.clear();
    rseq_ = 1;
    for (int k = 0; k < space_.size(); ++k) {
        CopyInfo info;
        info.inst_nodes.resize(static_cast<std::size_t>(space_.instance_count()));
        int internal_seq = 1;
        build_copy(k, space_.spec().topology, "Va", "0", true, info, internal_seq);
        copies_.push_back(std::move(info));
    }
}

int Emitter::rep_device(int state, int m, int digit) const {
    int group = space_.symmetry_group(m);
    if (group < 0) return m;
    for (int member : space_.group_members(group))
        if (space_.state(state).digits[static_cast<std::size_t>(member)] == digit) return member;
    throw std::logic_error("no representative device for the requested digit");
}

std::string Emitter::state_expression(int a) const {
    const NetworkState& digits = space_.state(a);
    const int n = space_.instance_count();

    auto add_term = [](std::vector<Term>& list, Term t) {
        for (Term& u : list) {
            if (u.tau_param == t.tau_param && u.v_param == t.v_param && u.drive == t.drive &&
                u.prob_state == t.prob_state && u.negative == t.negative) {
                u.count += t.count;
                return;
            }
        }
        list.push_back(std::move(t));
    };

    std::vector<Term> pos_gain, pos_loss, neg_gain, neg_loss;
    for (int m = 0; m < n; ++m) {
        int d = digits.digits[static_cast<std::size_t>(m)];
        int model_idx = 0;
        for (std::size_t k = 0; k < space_.spec().models.size(); ++k)
            if (space_.spec().models[k].name ==
                space_.spec().instances[static_cast<std::size_t>(m)].model)
                model_idx = static_cast<int>(k);

        if (d > 0) {
            // gain: some state one step below moved this device up into us
            NetworkState pred = digits;
            --pred.digits[static_cast<std::size_t>(m)];
            int b = space_.index_of(pred);
            int r = rep_device(b, m, d - 1);
            add_term(pos_gain, {1, tau_name(model_idx, d - 1, d), v_name(model_idx, d - 1, d),
                                volt_expr(copies_[static_cast<std::size_t>(b)]
                                              .inst_nodes[static_cast<std::size_t>(r)]),
                                b, false});
            // loss: this device can move down when the drive is negative
            int r_self = rep_device(a, m, d);
            add_term(neg_loss, {1, tau_name(model_idx, d, d - 1), v_name(model_idx, d, d - 1),
                                "-" + volt_expr(copies_[static_cast<std::size_t>(a)]
                                                    .inst_nodes[static_cast<std::size_t>(r_self)]),
                                a, true});
        }
        if (d + 1 < space_.radix(m)) {
            // loss: this device can move up under positive drive
            int r_self = rep_device(a, m, d);
            add_term(pos_loss, {1, tau_name(model_idx, d, d + 1), v_name(model_idx, d, d + 1),
                                volt_expr(copies_[static_cast<std::size_t>(a)]
                                              .inst_nodes[static_cast<std::size_t>(r_self)]),
                                a, true});
            // gain: some state one step above moved this device down into us
            NetworkState pred = digits;
            ++pred.digits[static_cast<std::size_t>(m)];
            int b = space_.index_of(pred);
            int r = rep_device(b, m, d + 1);
            add_term(neg_gain, {1, tau_name(model_idx, d + 1, d), v_name(model_idx, d + 1, d),
                                "-" + volt_expr(copies_[static_cast<std::size_t>(b)]
                                                    .inst_nodes[static_cast<std::size_t>(r)]),
                                b, false});
        }
    }

    std::vector<Term> pos = pos_gain, neg = neg_gain;
    pos.insert(pos.end(), pos_loss.begin(), pos_loss.end());
    neg.insert(neg.end(), neg_loss.begin(), neg_loss.end());

    std::string expr;
    if (!pos.empty()) expr += "(" + render_terms(pos) + ")*u(V(Va))";
    if (!neg.empty()) {
        if (!expr.empty()) expr += "+";
        expr += "(" + render_terms(neg) + ")*u(-V(Va))";
    }
    if (expr.empty()) expr = "0";
    return expr;
}

std::vector<Term> Emitter::influx_terms(bool positive_drive) const {
    auto absorbing = space_.absorbing_index();
    std::vector<Term> terms;
    if (!absorbing) return terms;
    const NetworkState& top = space_.state(*absorbing);

    auto add_term = [](std::vector<Term>& list, Term t) {
        for (Term& u : list) {
            if (u.tau_param == t.tau_param && u.v_param == t.v_param && u.drive == t.drive &&
                u.prob_state == t.prob_state) {
                u.count += t.count;
                return;
            }
        }
        list.push_back(std::move(t));
    };

    for (int m = 0; m < space_.instance_count(); ++m) {
        int model_idx = 0;
        for (std::size_t k = 0; k < space_.spec().models.size(); ++k)
            if (space_.spec().models[k].name ==
                space_.spec().instances[static_cast<std::size_t>(m)].model)
                model_idx = static_cast<int>(k);
        int d_top = top.digits[static_cast<std::size_t>(m)];
        if (positive_drive) {
            if (d_top == 0) continue;
            NetworkState pred = top;
            --pred.digits[static_cast<std::size_t>(m)];
            int b = space_.index_of(pred);
            int r = rep_device(b, m, d_top - 1);
            // one term per full-space predecessor; equivalent predecessors
            // merge into an integer count, e.g. 5*gm(...) for five in series
            add_term(terms,
                     {1, tau_name(model_idx, d_top - 1, d_top),
                      v_name(model_idx, d_top - 1, d_top),
                      volt_expr(copies_[static_cast<std::size_t>(b)]
                                    .inst_nodes[static_cast<std::size_t>(r)]),
                      b, false});
        }
    }
    return terms;
}

std::vector<std::string> Emitter::integrator_lines() {
    check_capacity();
    build_copies();
    const int m_states = space_.size();
    std::vector<Term> terms = influx_terms(true);
    std::vector<std::string> lines;
    std::string expr = terms.empty() ? "0" : "(" + render_terms(terms) + ")*u(V(Va))";
    lines.push_back("B" + std::to_string(m_states + 2) + " 0 Vt I=time*" + expr);
    lines.push_back("C" + std::to_string(m_states + 1) + " Vt 0 1 IC=0");
    return lines;
}

NetlistDoc Emitter::emit() {
    check_capacity();
    build_copies();
    const CircuitSpec& spec = space_.spec();
    const int m_states = space_.size();

    NetlistDoc doc;
    for (int k = 0; k < m_states; ++k)
        doc.probability_node[k] = "p" + std::to_string(k);

    for (int k = 0; k < m_states; ++k)
        doc.lines.push_back("B" + std::to_string(k + 1) + " 0 p" + std::to_string(k) +
                            " I=" + state_expression(k));

    doc.lines.insert(doc.lines.end(), copy_lines_.begin(), copy_lines_.end());
    std::string r_load = "R" + std::to_string(rseq_++);
    doc.lines.push_back(r_load + " VI 0 1k");

    int init = space_.index_of(space_.initial_state());
    for (int k = 0; k < m_states; ++k)
        doc.lines.push_back("C" + std::to_string(k + 1) + " p" + std::to_string(k) + " 0 1 IC=" +
                            (k == init ? "1" : "0"));

    {
        std::string expr;
        for (int k = 0; k < m_states; ++k) {
            if (k) expr += "+";
            if (space_.multiplicity(k) != 1)
                expr += std::to_string(space_.multiplicity(k)) + "*";
            const auto& entries = copies_[static_cast<std::size_t>(k)].entry_resistors;
            if (entries.size() == 1) {
                expr += "I(" + entries.front() + ")";
            } else {
                expr += "(";
                for (std::size_t i = 0; i < entries.size(); ++i) {
                    if (i) expr += "+";
                    expr += "I(" + entries[i] + ")";
                }
                expr += ")";
            }
            expr += "*V(p" + std::to_string(k) + ")";
        }
        doc.lines.push_back("B" + std::to_string(m_states + 1) + " 0 VI I=" + expr);
    }

    if (wave_.is_dc() && wave_.amplitude > 0.0 && space_.absorbing_index()) {
        std::vector<Term> terms = influx_terms(true);
        if (!terms.empty()) {
            doc.lines.push_back("B" + std::to_string(m_states + 2) + " 0 Vt I=time*(" +
                                render_terms(terms) + ")*u(V(Va))");
            doc.lines.push_back("C" + std::to_string(m_states + 1) + " Vt 0 1 IC=0");
        }
    }

    if (wave_.is_dc()) {
        doc.lines.push_back("V1 Va 0 " + spice_num(wave_.amplitude));
    } else {
        std::string line = "V1 Va 0 SINE(0 " + spice_num(wave_.amplitude) + " " +
                           spice_num(wave_.frequency);
        if (wave_.phase != 0.0)
            line += " 0 0 " + spice_num(wave_.phase * 180.0 / std::numbers::pi);
        doc.lines.push_back(line + ")");
    }

    doc.lines.push_back(".func gm(x,y,z){1/(x*exp(-z/y))}");

    for (std::size_t mi = 0; mi < spec.models.size(); ++mi) {
        const MemristorModel& model = spec.models[mi];
        bool used = false;
        for (const auto& inst : spec.instances)
            if (inst.model == model.name) used = true;
        if (!used) continue;
        for (std::size_t e = 0; e < model.up_edges.size(); ++e)
            doc.lines.push_back(
                ".param " + tau_name(static_cast<int>(mi), static_cast<int>(e),
                                     static_cast<int>(e) + 1) +
                "=" + spice_num(model.up_edges[e].tau) + " " +
                v_name(static_cast<int>(mi), static_cast<int>(e), static_cast<int>(e) + 1) +
                "=" + spice_num(model.up_edges[e].v_scale));
        for (std::size_t e = 0; e < model.down_edges.size(); ++e)
            doc.lines.push_back(
                ".param " + tau_name(static_cast<int>(mi), static_cast<int>(e) + 1,
                                     static_cast<int>(e)) +
                "=" + spice_num(model.down_edges[e].tau) + " " +
                v_name(static_cast<int>(mi), static_cast<int>(e) + 1, static_cast<int>(e)) +
                "=" + spice_num(model.down_edges[e].v_scale));
    }

    doc.lines.push_back(".tran 0 " + spice_num(sim_.t_stop) + " " +
                        spice_num(sim_.t_start_recording) + " " + spice_num(sim_.max_step));
    doc.lines.push_back(".backanno");
    doc.lines.push_back(".end");
    return doc;
}

}  // namespace

std::string NetlistDoc::text() const {
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

NetlistDoc emit_ltspice(const StateSpace& space, const Waveform& wave, const SimWindow& sim) {
    Emitter e(space, wave, sim);
    return e.emit();
}

std::vector<std::string> emit_switch_time_integrator(const StateSpace& space,
                                                     const Waveform& wave) {
    if (!wave.is_dc() || !(wave.amplitude > 0.0))
        throw std::invalid_argument(
            "the switching-time integrator needs a positive dc drive");
    SimWindow sim;
    Emitter e(space, wave, sim);
    return e.integrator_lines();
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

// Splits s at top-level occurrences of any character in seps (depth tracked
// over parentheses); the separator is prepended to the following piece.
std::vector<std::string> split_top_level(const std::string& s, std::string_view seps) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (depth == 0 && seps.find(c) != std::string_view::npos && !cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
        cur += c;
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct ParsedTerm {
    std::int64_t count = 1;
    bool negative = false;
    std::string tau, v, drive, prob;
};

// [sign][count*]gm(tau,V,drive)*V(pX)
bool parse_gm_term(std::string t, ParsedTerm& out) {
    if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
        out.negative = t[0] == '-';
        t = t.substr(1);
    }
    auto star = t.find('*');
    auto gm = t.find("gm(");
    if (gm == std::string::npos) return false;
    if (star != std::string::npos && star < gm) {
        out.count = std::strtoll(t.substr(0, star).c_str(), nullptr, 10);
        if (out.count <= 0) return false;
        t = t.substr(star + 1);
        gm = t.find("gm(");
    }
    if (gm != 0) return false;
    int depth = 0;
    std::size_t close = std::string::npos;
    for (std::size_t i = 2; i < t.size(); ++i) {
        if (t[i] == '(') ++depth;
        if (t[i] == ')' && --depth == 0) {
            close = i;
            break;
        }
    }
    if (close == std::string::npos) return false;
    std::string args = t.substr(3, close - 3);
    std::vector<std::string> parts;
    {
        int d = 0;
        std::string cur;
        for (char c : args) {
            if (c == '(') ++d;
            if (c == ')') --d;
            if (c == ',' && d == 0) {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
    }
    if (parts.size() != 3) return false;
    out.tau = parts[0];
    out.v = parts[1];
    out.drive = parts[2];
    std::string rest = t.substr(close + 1);
    if (rest.rfind("*V(p", 0) != 0 || rest.back() != ')') return false;
    out.prob = rest.substr(3, rest.size() - 4);  // "(pX"-> strip to pX
    out.prob = out.prob.substr(1);
    return true;
}

}  // namespace

std::vector<std::string> lint_netlist(const NetlistDoc& doc) {
    std::vector<std::string> problems;

    std::map<std::string, int> component_names;
    std::map<std::string, int> directives;
    for (const auto& line : doc.lines) {
        if (line.empty()) continue;
        if (line[0] == '.') {
            auto toks = split_ws(line);
            ++directives[toks.front().substr(1)];
            continue;
        }
        auto toks = split_ws(line);
        if (++component_names[toks.front()] > 1)
            problems.push_back("duplicate component name " + toks.front());
    }
    for (const char* d : {"tran", "func", "backanno", "end"}) {
        auto it = directives.find(d);
        int n = it == directives.end() ? 0 : it->second;
        if (n != 1)
            problems.push_back("expected exactly one ." + std::string(d) + ", found " +
                               std::to_string(n));
    }
    if (doc.lines.empty() || doc.lines.back() != ".end")
        problems.push_back(".end must be the last statement");

    double ic_sum = 0.0;
    for (const auto& [state, node] : doc.probability_node) {
        int caps = 0, sources = 0;
        for (const auto& line : doc.lines) {
            auto toks = split_ws(line);
            if (toks.size() >= 5 && toks[0][0] == 'C' && toks[1] == node && toks[2] == "0" &&
                toks[3] == "1" && toks[4].rfind("IC=", 0) == 0) {
                ++caps;
                ic_sum += std::strtod(toks[4].c_str() + 3, nullptr);
            }
            if (toks.size() >= 4 && toks[0][0] == 'B' && toks[1] == "0" && toks[2] == node)
                ++sources;
        }
        if (caps != 1)
            problems.push_back("probability node " + node + " needs exactly one 1 F capacitor, " +
                               "found " + std::to_string(caps));
        if (sources != 1)
            problems.push_back("probability node " + node + " needs exactly one behavioral " +
                               "source, found " + std::to_string(sources));
    }
    if (!doc.probability_node.empty() && std::abs(ic_sum - 1.0) > 1e-12)
        problems.push_back("initial conditions sum to " + std::to_string(ic_sum) +
                           " instead of 1");

    // .param symbols must exactly cover the gm() parameter references
    std::map<std::string, int> defined;
    for (const auto& line : doc.lines) {
        if (line.rfind(".param", 0) != 0) continue;
        for (const auto& tok : split_ws(line)) {
            auto eq = tok.find('=');
            if (eq != std::string::npos) ++defined[tok.substr(0, eq)];
        }
    }
    std::map<std::string, int> referenced;
    for (const auto& line : doc.lines) {
        std::size_t pos = 0;
        while ((pos = line.find("gm(", pos)) != std::string::npos) {
            if (pos > 0 && (std::isalnum(static_cast<unsigned char>(line[pos - 1])) ||
                            line[pos - 1] == '_')) {
                ++pos;
                continue;
            }
            std::size_t p = pos + 3;
            std::string first, second;
            int commas = 0;
            for (; p < line.size() && commas < 2; ++p) {
                if (line[p] == ',') {
                    ++commas;
                    continue;
                }
                (commas == 0 ? first : second) += line[p];
            }
            ++referenced[first];
            ++referenced[second];
            pos = p;
        }
    }
    for (const auto& [name, n] : referenced)
        if (!defined.count(name)) problems.push_back("parameter " + name + " is not defined");
    for (const auto& [name, n] : defined)
        if (!referenced.count(name)) problems.push_back("parameter " + name + " is never used");

    return problems;
}

std::vector<std::string> conservation_residual(const NetlistDoc& doc, const StateSpace& space) {
    std::map<std::string, std::int64_t> balance;
    for (const auto& [state, node] : doc.probability_node) {
        std::int64_t mult = space.multiplicity(state);
        for (const auto& line : doc.lines) {
            auto toks = split_ws(line);
            if (toks.size() < 4 || toks[0][0] != 'B' || toks[1] != "0" || toks[2] != node)
                continue;
            std::string expr = line.substr(line.find("I=") + 2);
            for (const std::string& group : split_top_level(expr, "+")) {
                std::string g = group;
                if (!g.empty() && g[0] == '+') g = g.substr(1);
                auto gate_pos = g.rfind(")*u(");
                if (gate_pos == std::string::npos) continue;  // e.g. "0"
                std::string gate = g.substr(gate_pos + 3);
                std::string inner = g.substr(1, gate_pos - 1);
                for (const std::string& term : split_top_level(inner, "+-")) {
                    ParsedTerm pt;
                    if (!parse_gm_term(term, pt)) continue;
                    std::string key = pt.tau + "|" + pt.v + "|" + pt.drive + "|" + pt.prob +
                                      "|" + gate;
                    balance[key] += (pt.negative ? -1 : 1) * pt.count * mult;
                }
            }
        }
    }
    std::vector<std::string> residuals;
    for (const auto& [key, coeff] : balance)
        if (coeff != 0)
            residuals.push_back(key + " -> " + std::to_string(coeff));
    return residuals;
}

namespace {

bool spice_numeric(const std::string& tok, double& value) {
    try {
        value = parse_value(tok);
        return true;
    } catch (const ParseError&) {
        return false;
    }
}

}  // namespace

std::vector<std::string> normalized_netlist_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string_view raw =
            text.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                             : end - start);

        std::vector<std::string> toks;
        std::string cur;
        auto flush = [&] {
            if (!cur.empty()) {
                toks.push_back(cur);
                cur.clear();
            }
        };
        for (char c : raw) {
            char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (std::isalnum(static_cast<unsigned char>(lc)) || lc == '_' || lc == '.') {
                cur += lc;
            } else if (std::isspace(static_cast<unsigned char>(lc))) {
                flush();
            } else if (lc == '(' || lc == ')') {
                flush();  // parentheses carry no token
            } else {
                flush();
                toks.push_back(std::string(1, lc));
            }
        }
        flush();

        // splice exponents split by the sign token: "10e" "-" "7" -> "10e-7"
        std::vector<std::string> merged;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            bool exp_head = !toks[i].empty() && toks[i].back() == 'e' &&
                            std::isdigit(static_cast<unsigned char>(toks[i][0]));
            if (exp_head && i + 2 < toks.size() && (toks[i + 1] == "-" || toks[i + 1] == "+") &&
                std::isdigit(static_cast<unsigned char>(toks[i + 2][0]))) {
                merged.push_back(toks[i] + toks[i + 1] + toks[i + 2]);
                i += 2;
            } else {
                merged.push_back(toks[i]);
            }
        }

        // collapse '**' and fold sign runs
        std::vector<std::string> folded;
        for (std::size_t i = 0; i < merged.size(); ++i) {
            if (merged[i] == "*" && !folded.empty() && folded.back() == "*") continue;
            if ((merged[i] == "+" || merged[i] == "-") && !folded.empty() &&
                (folded.back() == "+" || folded.back() == "-")) {
                bool neg = (folded.back() == "-") != (merged[i] == "-");
                folded.back() = neg ? "-" : "+";
                continue;
            }
            folded.push_back(merged[i]);
        }

        for (auto& tok : folded) {
            double v;
            if (!tok.empty() && tok[0] != '.' && !std::isdigit(static_cast<unsigned char>(tok[0])))
                continue;  // identifiers and directives stay as-is
            if (tok[0] == '.' && (tok.size() < 2 || !std::isdigit(static_cast<unsigned char>(tok[1]))))
                continue;
            if (spice_numeric(tok, v)) {
                char buf[64];
                auto res = std::to_chars(buf, buf + sizeof buf, v);
                tok.assign(buf, res.ptr);
            }
        }

        bool has_sine = std::find(folded.begin(), folded.end(), "sine") != folded.end();
        if (has_sine) {
            while (!folded.empty() && folded.back() == "0") folded.pop_back();
        }

        if (!folded.empty()) {
            std::string joined;
            for (std::size_t i = 0; i < folded.size(); ++i) {
                if (i) joined += ' ';
                joined += folded[i];
            }
            lines.push_back(joined);
        }
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    std::sort(lines.begin(), lines.end());
    return lines;
}

bool netlists_token_equivalent(std::string_view a, std::string_view b) {
    return normalized_netlist_lines(a) == normalized_netlist_lines(b);
}

}  // namespace memsim

