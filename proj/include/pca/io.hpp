// io.hpp -- line-based text formats: plain and marked automata, letter-to-
// letter transducers, composite automaton files with partitioned conditions,
// counter machines, and run traces. Parsers report 1-based line numbers.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pca/class_automata.hpp"
#include "pca/counter_machine.hpp"
#include "pca/data_word.hpp"
#include "pca/fsm.hpp"

namespace pca {

namespace io_detail {

struct Line {
    std::size_t number = 0;
    std::string text;
};

/// Strips comments (# to end of line) and blank lines.
inline std::vector<Line> significant_lines(const std::string& text) {
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::string t = trim(raw);
        if (!t.empty()) out.push_back(Line{number, t});
    }
    return out;
}

/// `key: rest` split; returns false when the line has no colon-terminated key.
inline bool key_line(const Line& line, std::string& key, std::string& rest) {
    auto colon = line.text.find(':');
    if (colon == std::string::npos) return false;
    key = trim(line.text.substr(0, colon));
    rest = trim(line.text.substr(colon + 1));
    return key.find(' ') == std::string::npos;
}

} // namespace io_detail

// --- plain and marked automata, transducers ----------------------------------
//
//   alphabet: a b
//   states: q0 q1
//   initial: q0
//   accepting: q0 q1
//   trans: q0 a q1        plain letter
//   trans: q0 a 1 q1      marked letter (mark 0 or 1)
//   trans: q0 a -> x q1   transducer step

inline Nfa<Tag> parse_nfa(const std::string& text) {
    Nfa<Tag> nfa;
    for (const auto& line : io_detail::significant_lines(text)) {
        std::string key, rest;
        if (!io_detail::key_line(line, key, rest))
            throw ParseError("expected 'key: ...'", line.number);
        std::vector<std::string> toks = split_ws(rest);
        if (key == "alphabet") {
            nfa.alphabet = toks;
        } else if (key == "states") {
            nfa.states.insert(toks.begin(), toks.end());
        } else if (key == "initial") {
            nfa.initial.insert(toks.begin(), toks.end());
        } else if (key == "accepting") {
            nfa.accepting.insert(toks.begin(), toks.end());
        } else if (key == "trans") {
            if (toks.size() != 3)
                throw ParseError("expected 'trans: from letter to'", line.number);
            nfa.add_transition(toks[0], toks[1], toks[2]);
        } else {
            throw ParseError("unknown section '" + key + "'", line.number);
        }
    }
    return nfa;
}

inline ClassDfa parse_class_dfa(const std::string& text) {
    ClassDfa dfa;
    std::vector<Tag> gamma;
    for (const auto& line : io_detail::significant_lines(text)) {
        std::string key, rest;
        if (!io_detail::key_line(line, key, rest))
            throw ParseError("expected 'key: ...'", line.number);
        std::vector<std::string> toks = split_ws(rest);
        if (key == "alphabet") {
            gamma = toks;
            dfa.alphabet = marked_alphabet(gamma);
        } else if (key == "states") {
            dfa.states.insert(toks.begin(), toks.end());
        } else if (key == "initial") {
            if (toks.size() != 1) throw ParseError("expected one initial state", line.number);
            dfa.initial = toks[0];
        } else if (key == "accepting") {
            dfa.accepting.insert(toks.begin(), toks.end());
        } else if (key == "trans") {
            if (toks.size() != 4 || (toks[2] != "0" && toks[2] != "1"))
                throw ParseError("expected 'trans: from tag mark to' with mark 0 or 1", line.number);
            dfa.states.insert(toks[0]);
            dfa.states.insert(toks[3]);
            auto key_pair = std::make_pair(toks[0], MarkedLetter{toks[1], toks[2] == "1"});
            if (dfa.delta.count(key_pair))
                throw ParseError("duplicate transition for " + toks[0] + " on (" + toks[1] + "," +
                                     toks[2] + ")",
                                 line.number);
            dfa.delta[key_pair] = toks[3];
        } else {
            throw ParseError("unknown section '" + key + "'", line.number);
        }
    }
    try {
        dfa.validate();
    } catch (const std::logic_error& e) {
        throw ParseError(std::string("automaton is not deterministic complete: ") + e.what());
    }
    return dfa;
}

inline Transducer parse_transducer_lines(const std::vector<io_detail::Line>& lines) {
    Transducer t;
    for (const auto& line : lines) {
        std::string key, rest;
        if (!io_detail::key_line(line, key, rest))
            throw ParseError("expected 'key: ...'", line.number);
        std::vector<std::string> toks = split_ws(rest);
        if (key == "input") {
            t.input_alphabet = toks;
        } else if (key == "output") {
            t.output_alphabet = toks;
        } else if (key == "states") {
            t.states.insert(toks.begin(), toks.end());
        } else if (key == "initial") {
            if (toks.size() != 1) throw ParseError("expected one initial state", line.number);
            t.initial = toks[0];
        } else if (key == "accepting") {
            t.accepting.insert(toks.begin(), toks.end());
        } else if (key == "trans") {
            if (toks.size() != 5 || toks[2] != "->")
                throw ParseError("expected 'trans: from in -> out to'", line.number);
            t.add_transition(toks[0], toks[1], toks[3], toks[4]);
        } else {
            throw ParseError("unknown section '" + key + "'", line.number);
        }
    }
    return t;
}

inline std::string serialize_class_dfa(const ClassDfa& dfa) {
    std::ostringstream out;
    std::vector<Tag> gamma;
    std::set<Tag> seen;
    for (const MarkedLetter& l : dfa.alphabet)
        if (seen.insert(l.tag).second) gamma.push_back(l.tag);
    out << "alphabet: " << join(gamma, " ") << "\n";
    out << "states: " << join(dfa.states, " ") << "\n";
    out << "initial: " << dfa.initial << "\n";
    out << "accepting: " << join(dfa.accepting, " ") << "\n";
    for (const auto& [key, to] : dfa.delta)
        out << "trans: " << key.first << " " << key.second.tag << " " << (key.second.marked ? 1 : 0)
            << " " << to << "\n";
    return out.str();
}

inline std::string serialize_transducer(const Transducer& t) {
    std::ostringstream out;
    out << "input: " << join(t.input_alphabet, " ") << "\n";
    out << "output: " << join(t.output_alphabet, " ") << "\n";
    out << "states: " << join(t.states, " ") << "\n";
    out << "initial: " << t.initial << "\n";
    out << "accepting: " << join(t.accepting, " ") << "\n";
    for (const auto& [from, in, emit, to] : t.transitions)
        out << "trans: " << from << " " << in << " -> " << emit << " " << to << "\n";
    return out.str();
}

// --- composite automata --------------------------------------------------------
//
//   type: pca            (or ca, da, eda)
//   [transducer]
//   ...transducer lines...
//   [partition]
//   G1: a b
//   [condition G1]
//   ...marked automaton lines, plus an `ordering:` line...
//
// ca uses a single [condition] section with marked letters; da and eda use a
// plain-letter condition (eda letters may include 0).

enum class CompositeKind { Pca, Ca, Da, Eda };

struct CompositeAutomaton {
    CompositeKind kind = CompositeKind::Pca;
    std::optional<Pca> pca;
    std::optional<ClassAutomaton> ca;
    std::optional<DataAutomaton> da;
    std::optional<ExtendedDataAutomaton> eda;

    const Transducer& transducer() const {
        switch (kind) {
            case CompositeKind::Pca: return pca->transducer;
            case CompositeKind::Ca: return ca->transducer;
            case CompositeKind::Da: return da->transducer;
            case CompositeKind::Eda: return eda->transducer;
        }
        throw std::logic_error("bad composite kind");
    }

    bool accepts(const DataWord& dw) const {
        switch (kind) {
            case CompositeKind::Pca: return pca_accepts(*pca, dw);
            case CompositeKind::Ca: return ca_accepts(*ca, dw);
            case CompositeKind::Da: return da_accepts(*da, dw);
            case CompositeKind::Eda: return eda_accepts(*eda, dw);
        }
        throw std::logic_error("bad composite kind");
    }

    std::optional<DataWord> bounded_witness(std::size_t max_len) const {
        switch (kind) {
            case CompositeKind::Pca: return bounded_nonempty(*pca, max_len);
            case CompositeKind::Ca: return bounded_nonempty(*ca, max_len);
            case CompositeKind::Da: return bounded_nonempty(*da, max_len);
            case CompositeKind::Eda: return bounded_nonempty(*eda, max_len);
        }
        throw std::logic_error("bad composite kind");
    }
};

namespace io_detail {

/// Reassembles section lines at their original line numbers, so nested
/// parsers report positions in the whole file.
inline std::string lines_text(const std::vector<Line>& lines) {
    std::string out;
    std::size_t current = 1;
    for (const Line& l : lines) {
        while (current < l.number) {
            out += "\n";
            ++current;
        }
        out += l.text + "\n";
        ++current;
    }
    return out;
}

} // namespace io_detail

inline CompositeAutomaton parse_composite(const std::string& text) {
    auto lines = io_detail::significant_lines(text);
    if (lines.empty()) throw ParseError("empty automaton file");

    std::string kind_str;
    {
        std::string key, rest;
        if (!io_detail::key_line(lines.front(), key, rest) || key != "type")
            throw ParseError("file must start with 'type: pca|ca|da|eda'", lines.front().number);
        kind_str = rest;
    }
    CompositeAutomaton out;
    if (kind_str == "pca") out.kind = CompositeKind::Pca;
    else if (kind_str == "ca") out.kind = CompositeKind::Ca;
    else if (kind_str == "da") out.kind = CompositeKind::Da;
    else if (kind_str == "eda") out.kind = CompositeKind::Eda;
    else throw ParseError("unknown automaton type '" + kind_str + "'", lines.front().number);

    // Split into [section] blocks.
    std::map<std::string, std::vector<io_detail::Line>> sections;
    std::vector<std::string> section_order;
    std::string current;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (line.text.front() == '[') {
            if (line.text.back() != ']')
                throw ParseError("malformed section header", line.number);
            current = trim(line.text.substr(1, line.text.size() - 2));
            if (sections.count(current))
                throw ParseError("duplicate section [" + current + "]", line.number);
            sections[current];
            section_order.push_back(current);
        } else {
            if (current.empty())
                throw ParseError("content before the first section", line.number);
            sections[current].push_back(line);
        }
    }
    if (!sections.count("transducer")) throw ParseError("missing [transducer] section");
    Transducer transducer = parse_transducer_lines(sections.at("transducer"));

    auto parse_plain_condition = [&](const std::vector<io_detail::Line>& ls) {
        return parse_nfa(io_detail::lines_text(ls));
    };

    switch (out.kind) {
        case CompositeKind::Da: {
            if (!sections.count("condition")) throw ParseError("missing [condition] section");
            out.da = DataAutomaton{transducer, parse_plain_condition(sections.at("condition"))};
            return out;
        }
        case CompositeKind::Eda: {
            if (!sections.count("condition")) throw ParseError("missing [condition] section");
            out.eda = ExtendedDataAutomaton{transducer, parse_plain_condition(sections.at("condition"))};
            return out;
        }
        case CompositeKind::Ca: {
            if (!sections.count("condition")) throw ParseError("missing [condition] section");
            out.ca = ClassAutomaton{
                transducer, parse_class_dfa(io_detail::lines_text(sections.at("condition")))};
            out.ca->class_condition.validate();
            return out;
        }
        case CompositeKind::Pca: break;
    }

    // pca: [partition] block names letter groups, then one [condition G] each.
    if (!sections.count("partition")) throw ParseError("missing [partition] section");
    std::vector<std::pair<std::string, std::vector<Tag>>> groups;
    for (const auto& line : sections.at("partition")) {
        std::string key, rest;
        if (!io_detail::key_line(line, key, rest))
            throw ParseError("expected 'Name: letters' in [partition]", line.number);
        groups.emplace_back(key, split_ws(rest));
    }
    if (groups.empty()) throw ParseError("empty [partition] section");

    Pca pca;
    pca.transducer = transducer;
    for (const auto& [name, gamma] : groups) {
        auto it = sections.find("condition " + name);
        if (it == sections.end()) throw ParseError("missing [condition " + name + "] section");
        std::vector<io_detail::Line> body;
        std::vector<Tag> ordering;
        for (const auto& line : it->second) {
            std::string key, rest;
            if (io_detail::key_line(line, key, rest) && key == "ordering") {
                ordering = split_ws(rest);
            } else {
                body.push_back(line);
            }
        }
        ClassDfa cond = parse_class_dfa(io_detail::lines_text(body));
        if (ordering.empty()) {
            PriorityVerdict v = decide_zero_priority(cond);
            if (!v.is_zero_priority)
                throw std::invalid_argument("condition " + name +
                                            " is not 0-priority under any ordering");
            ordering = *v.ordering;
        }
        pca.conditions.push_back(PcaCondition{gamma, std::move(cond), std::move(ordering)});
    }
    validate_pca(pca);
    out.pca = std::move(pca);
    return out;
}

inline std::string serialize_pca(const Pca& pca) {
    std::ostringstream out;
    out << "type: pca\n\n[transducer]\n" << serialize_transducer(pca.transducer);
    out << "\n[partition]\n";
    for (std::size_t i = 0; i < pca.conditions.size(); ++i)
        out << "G" << i + 1 << ": " << join(pca.conditions[i].gamma, " ") << "\n";
    for (std::size_t i = 0; i < pca.conditions.size(); ++i) {
        out << "\n[condition G" << i + 1 << "]\n";
        out << "ordering: " << join(pca.conditions[i].ordering, " ") << "\n";
        out << serialize_class_dfa(pca.conditions[i].condition);
    }
    return out.str();
}

// --- counter machines ----------------------------------------------------------
//
//   alphabet: a b
//   counters: 3
//   initial: q0
//   accepting: acc
//   trans: q0 a inc 1 q1
//   trans: q1 eps ifzp 2 q2

inline std::optional<Op> parse_op(const std::string& name) {
    if (name == "inc") return Op::Inc;
    if (name == "dec") return Op::Dec;
    if (name == "ifz") return Op::IfZero;
    if (name == "ifzp") return Op::IfZeroPrefix;
    return std::nullopt;
}

inline CounterMachine parse_counter_machine(const std::string& text) {
    CounterMachine m;
    bool saw_counters = false;
    for (const auto& line : io_detail::significant_lines(text)) {
        std::string key, rest;
        if (!io_detail::key_line(line, key, rest))
            throw ParseError("expected 'key: ...'", line.number);
        std::vector<std::string> toks = split_ws(rest);
        if (key == "alphabet") {
            m.alphabet = toks;
        } else if (key == "counters") {
            if (toks.size() != 1) throw ParseError("expected 'counters: k'", line.number);
            m.counter_count = parse_nat(toks[0], line.number);
            saw_counters = true;
        } else if (key == "states") {
            m.states.insert(toks.begin(), toks.end());
        } else if (key == "initial") {
            if (toks.size() != 1) throw ParseError("expected one initial state", line.number);
            m.initial = toks[0];
            m.states.insert(m.initial);
        } else if (key == "accepting") {
            m.accepting.insert(toks.begin(), toks.end());
            m.states.insert(toks.begin(), toks.end());
        } else if (key == "trans") {
            if (toks.size() != 5)
                throw ParseError("expected 'trans: from letter op index to'", line.number);
            std::optional<Tag> letter;
            if (toks[1] != "eps") letter = toks[1];
            auto op = parse_op(toks[2]);
            if (!op) throw ParseError("unknown instruction '" + toks[2] + "'", line.number);
            std::uint64_t index = parse_nat(toks[3], line.number);
            if (index < 1) throw ParseError("counter indices are 1-based", line.number);
            m.add(toks[0], letter, Instr{*op, static_cast<std::size_t>(index)}, toks[4]);
        } else {
            throw ParseError("unknown section '" + key + "'", line.number);
        }
    }
    if (!saw_counters) throw ParseError("missing 'counters:' line");
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return m;
}

inline std::string serialize_counter_machine(const CounterMachine& m) {
    std::ostringstream out;
    out << "alphabet: " << join(m.alphabet, " ") << "\n";
    out << "counters: " << m.counter_count << "\n";
    out << "initial: " << m.initial << "\n";
    out << "accepting: " << join(m.accepting, " ") << "\n";
    for (const Transition& t : m.transitions)
        out << "trans: " << t.from << " " << (t.letter ? *t.letter : "eps") << " "
            << to_string(t.instr.op) << " " << t.instr.counter << " " << t.to << "\n";
    return out.str();
}

// --- traces ---------------------------------------------------------------------
//
// One step per line: `letter op index to`, with `eps` for silent steps.

inline std::string serialize_trace(const std::vector<TraceStep>& trace) {
    std::ostringstream out;
    for (const TraceStep& s : trace)
        out << (s.letter ? *s.letter : "eps") << " " << to_string(s.instr.op) << " "
            << s.instr.counter << " " << s.to << "\n";
    return out.str();
}

inline std::vector<TraceStep> parse_trace(const std::string& text) {
    std::vector<TraceStep> trace;
    for (const auto& line : io_detail::significant_lines(text)) {
        std::vector<std::string> toks = split_ws(line.text);
        if (toks.size() != 4) throw ParseError("expected 'letter op index to'", line.number);
        std::optional<Tag> letter;
        if (toks[0] != "eps") letter = toks[0];
        auto op = parse_op(toks[1]);
        if (!op) throw ParseError("unknown instruction '" + toks[1] + "'", line.number);
        trace.push_back(TraceStep{letter, Instr{*op, static_cast<std::size_t>(parse_nat(toks[2], line.number))},
                                  toks[3]});
    }
    return trace;
}

/// Data-word file: one word per line.
inline std::vector<DataWord> parse_data_word_file(const std::string& text) {
    std::vector<DataWord> out;
    for (const auto& line : io_detail::significant_lines(text))
        out.push_back(parse_data_word(line.text, line.number));
    return out;
}

} // namespace pca
