// counter_machine.hpp -- multicounter automata with plain or prefix zero
// tests: configurations, small-step semantics, run replay, and bounded
// breadth-first exploration of the accepted language.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "pca/fsm.hpp"

namespace pca {

enum class Op { Inc, Dec, IfZero, IfZeroPrefix };

inline std::string to_string(Op op) {
    switch (op) {
        case Op::Inc: return "inc";
        case Op::Dec: return "dec";
        case Op::IfZero: return "ifz";
        case Op::IfZeroPrefix: return "ifzp";
    }
    return "?";
}

/// One counter instruction; counter indices are 1-based. IfZeroPrefix(i)
/// tests that counters 1..i are all zero.
struct Instr {
    Op op = Op::Inc;
    std::size_t counter = 1;

    auto operator<=>(const Instr&) const = default;
};

/// A transition consumes one letter (or nothing, for epsilon) and executes
/// exactly one instruction.
struct Transition {
    State from;
    std::optional<Tag> letter; // nullopt = epsilon
    Instr instr;
    State to;

    auto operator<=>(const Transition&) const = default;
};

struct CounterMachine {
    std::vector<Tag> alphabet;
    std::set<State> states;
    State initial;
    std::set<State> accepting;
    std::size_t counter_count = 0;
    std::set<Transition> transitions;

    void add(const State& from, std::optional<Tag> letter, Instr instr, const State& to) {
        states.insert(from);
        states.insert(to);
        transitions.insert(Transition{from, std::move(letter), instr, to});
    }

    void validate() const {
        if (!states.count(initial))
            throw std::invalid_argument("initial state not in the state set");
        for (const State& q : accepting)
            if (!states.count(q))
                throw std::invalid_argument("accepting state '" + q + "' not in the state set");
        for (const Transition& t : transitions) {
            if (t.instr.counter < 1 || t.instr.counter > counter_count)
                throw std::invalid_argument("counter index out of range in transition from " + t.from);
            if (t.letter) {
                bool known = std::find(alphabet.begin(), alphabet.end(), *t.letter) != alphabet.end();
                if (!known)
                    throw std::invalid_argument("letter '" + *t.letter + "' outside the alphabet");
            }
        }
    }
};

/// True iff the machine only uses prefix zero tests (no plain ifz).
inline bool validate_priority(const CounterMachine& m) {
    return std::none_of(m.transitions.begin(), m.transitions.end(),
                        [](const Transition& t) { return t.instr.op == Op::IfZero; });
}

/// A counter machine whose zero tests are all prefix tests.
struct Pma {
    CounterMachine machine;

    static Pma adopt(CounterMachine m) {
        if (!validate_priority(m))
            throw std::invalid_argument("machine uses a plain zero test; not a priority machine");
        return Pma{std::move(m)};
    }
};

/// A state plus natural counter values.
struct Configuration {
    State state;
    std::vector<std::uint64_t> counters;

    bool operator==(const Configuration&) const = default;
};

inline bool guard_passes(const Instr& instr, const std::vector<std::uint64_t>& counters) {
    std::size_t i = instr.counter - 1;
    switch (instr.op) {
        case Op::Inc: return true;
        case Op::Dec: return counters[i] > 0;
        case Op::IfZero: return counters[i] == 0;
        case Op::IfZeroPrefix:
            for (std::size_t j = 0; j <= i; ++j)
                if (counters[j] != 0) return false;
            return true;
    }
    return false;
}

inline void apply_instr(const Instr& instr, std::vector<std::uint64_t>& counters) {
    std::size_t i = instr.counter - 1;
    if (instr.op == Op::Inc) ++counters[i];
    if (instr.op == Op::Dec) --counters[i];
}

/// All configurations reachable by one transition on `letter` (pass nullopt
/// for epsilon moves). Inapplicable transitions contribute nothing.
inline std::vector<Configuration> step(const CounterMachine& m, const Configuration& cfg,
                                       const std::optional<Tag>& letter) {
    if (cfg.counters.size() != m.counter_count)
        throw std::invalid_argument("configuration has the wrong number of counters");
    std::vector<Configuration> out;
    for (const Transition& t : m.transitions) {
        if (t.from != cfg.state || t.letter != letter) continue;
        if (!guard_passes(t.instr, cfg.counters)) continue;
        Configuration next{t.to, cfg.counters};
        apply_instr(t.instr, next.counters);
        out.push_back(std::move(next));
    }
    return out;
}

/// One replayable run step.
struct TraceStep {
    std::optional<Tag> letter;
    Instr instr;
    State to;
};

/// Replays a trace from the initial configuration; true iff every step is an
/// enabled transition, the consumed letters spell `word`, and the run ends
/// accepting. An empty trace accepts the empty word iff the initial state
/// accepts.
inline bool run_check(const CounterMachine& m, const Word& word,
                      const std::vector<TraceStep>& trace) {
    Configuration cfg{m.initial, std::vector<std::uint64_t>(m.counter_count, 0)};
    Word consumed;
    for (const TraceStep& s : trace) {
        if (s.instr.counter < 1 || s.instr.counter > m.counter_count)
            throw std::invalid_argument("trace step uses counter index out of range");
        if (!m.transitions.count(Transition{cfg.state, s.letter, s.instr, s.to})) return false;
        if (!guard_passes(s.instr, cfg.counters)) return false;
        apply_instr(s.instr, cfg.counters);
        cfg.state = s.to;
        if (s.letter) consumed.push_back(*s.letter);
    }
    return consumed == word && m.accepting.count(cfg.state) > 0;
}

/// Result of a bounded exploration. `complete` is true when no branch was
/// cut off by the sum or step bound, so absent words are genuinely not
/// accepted within the word bound.
struct BoundedLanguage {
    std::vector<Word> words; // length-lexicographic, alphabet order
    std::map<Word, std::vector<TraceStep>> traces;
    bool truncated_by_steps = false;
    bool truncated_by_sum = false;

    bool complete() const { return !truncated_by_steps && !truncated_by_sum; }
    bool contains(const Word& w) const { return traces.count(w) > 0; }
};

/// Observer invoked for every zero-test transition evaluated during
/// exploration, with the counter values at that moment.
using ZeroTestObserver = std::function<void(const Transition&, const std::vector<std::uint64_t>&)>;

/// Breadth-first closure over (state, counters, consumed word): the exact
/// set of words of length <= word_bound accepted by runs whose counter sum
/// never exceeds sum_bound and whose step count stays within step_bound.
/// Deterministic: expansion follows the sorted transition order.
inline BoundedLanguage explore(const CounterMachine& m, std::size_t word_bound,
                               std::size_t sum_bound, std::size_t step_bound,
                               const ZeroTestObserver& on_zero_test = nullptr) {
    m.validate();

    // Interned representation for speed.
    std::map<State, std::uint32_t> state_id;
    for (const State& q : m.states) state_id.emplace(q, static_cast<std::uint32_t>(state_id.size()));
    std::map<Tag, std::uint8_t> tag_id;
    for (const Tag& a : m.alphabet) tag_id.emplace(a, static_cast<std::uint8_t>(tag_id.size()));

    struct CompiledTransition {
        int letter = -1; // -1 = epsilon
        Instr instr;
        std::uint32_t to = 0;
        const Transition* source = nullptr;
    };
    std::vector<std::vector<CompiledTransition>> outgoing(state_id.size());
    for (const Transition& t : m.transitions)
        outgoing[state_id.at(t.from)].push_back(CompiledTransition{
            t.letter ? static_cast<int>(tag_id.at(*t.letter)) : -1, t.instr, state_id.at(t.to), &t});

    struct Node {
        std::uint32_t state;
        std::vector<std::uint32_t> counters;
        std::vector<std::uint8_t> word;
        std::size_t parent; // index into nodes; self for the root
        const Transition* via = nullptr;
    };

    struct KeyHash {
        std::size_t operator()(const std::vector<std::uint32_t>& key) const {
            std::size_t h = 1469598103934665603ull;
            for (std::uint32_t v : key) {
                h ^= v;
                h *= 1099511628211ull;
            }
            return h;
        }
    };
    auto make_key = [](const Node& n) {
        std::vector<std::uint32_t> key;
        key.reserve(2 + n.word.size() + n.counters.size());
        key.push_back(n.state);
        key.push_back(static_cast<std::uint32_t>(n.word.size()));
        for (std::uint8_t c : n.word) key.push_back(c);
        for (std::uint32_t c : n.counters) key.push_back(c);
        return key;
    };

    BoundedLanguage result;
    std::vector<Node> nodes;
    std::unordered_map<std::vector<std::uint32_t>, std::size_t, KeyHash> visited;
    std::map<std::vector<std::uint8_t>, std::size_t> accepted; // word -> node index

    Node root{state_id.at(m.initial), std::vector<std::uint32_t>(m.counter_count, 0), {}, 0, nullptr};
    visited.emplace(make_key(root), 0);
    nodes.push_back(root);

    std::set<std::uint32_t> accepting_ids;
    for (const State& q : m.accepting) accepting_ids.insert(state_id.at(q));
    if (accepting_ids.count(root.state)) accepted.emplace(root.word, 0);

    std::size_t frontier_begin = 0, frontier_end = 1;
    for (std::size_t depth = 0; depth < step_bound && frontier_begin < frontier_end; ++depth) {
        for (std::size_t idx = frontier_begin; idx < frontier_end; ++idx) {
            // nodes may reallocate while expanding; copy what we need.
            const std::uint32_t cur_state = nodes[idx].state;
            const std::vector<std::uint32_t> counters = nodes[idx].counters;
            const std::vector<std::uint8_t> word = nodes[idx].word;
            for (const CompiledTransition& t : outgoing[cur_state]) {
                if (t.letter >= 0 && word.size() >= word_bound) continue;
                std::size_t ci = t.instr.counter - 1;
                if (t.instr.op == Op::IfZero || t.instr.op == Op::IfZeroPrefix) {
                    if (on_zero_test) {
                        std::vector<std::uint64_t> wide(counters.begin(), counters.end());
                        on_zero_test(*t.source, wide);
                    }
                    bool pass = counters[ci] == 0;
                    if (t.instr.op == Op::IfZeroPrefix)
                        for (std::size_t j = 0; j < ci && pass; ++j) pass = counters[j] == 0;
                    if (!pass) continue;
                } else if (t.instr.op == Op::Dec) {
                    if (counters[ci] == 0) continue;
                }

                Node next;
                next.state = t.to;
                next.counters = counters;
                if (t.instr.op == Op::Inc) {
                    std::uint64_t sum = 0;
                    for (std::uint32_t c : next.counters) sum += c;
                    if (sum + 1 > sum_bound) {
                        result.truncated_by_sum = true;
                        continue;
                    }
                    ++next.counters[ci];
                } else if (t.instr.op == Op::Dec) {
                    --next.counters[ci];
                }
                next.word = word;
                if (t.letter >= 0) next.word.push_back(static_cast<std::uint8_t>(t.letter));
                next.parent = idx;
                next.via = t.source;

                auto key = make_key(next);
                if (visited.count(key)) continue;
                visited.emplace(std::move(key), nodes.size());
                if (accepting_ids.count(next.state) && !accepted.count(next.word))
                    accepted.emplace(next.word, nodes.size());
                nodes.push_back(std::move(next));
            }
        }
        frontier_begin = frontier_end;
        frontier_end = nodes.size();
    }
    if (frontier_begin < frontier_end) result.truncated_by_steps = true;

    for (const auto& [packed, node_idx] : accepted) {
        Word w;
        for (std::uint8_t c : packed) w.push_back(m.alphabet[c]);
        std::vector<TraceStep> trace;
        for (std::size_t i = node_idx; nodes[i].via != nullptr; i = nodes[i].parent)
            trace.push_back(TraceStep{nodes[i].via->letter, nodes[i].via->instr, nodes[i].via->to});
        std::reverse(trace.begin(), trace.end());
        result.words.push_back(w);
        result.traces.emplace(std::move(w), std::move(trace));
    }
    std::sort(result.words.begin(), result.words.end(), [&](const Word& a, const Word& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return tag_id.at(a[i]) < tag_id.at(b[i]);
        return false;
    });
    return result;
}

} // namespace pca
