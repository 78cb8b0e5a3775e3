// fsm.hpp -- finite automata over arbitrary ordered letter types: complete
// DFAs, NFAs, letter-to-letter transducers, and the standard constructions
// (determinization with explicit sink, minimization by partition refinement).
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "pca/data_word.hpp"

namespace pca {

using State = std::string;

/// Nondeterministic finite automaton. No epsilon transitions; those exist
/// only in counter machines.
template <typename Letter>
struct Nfa {
    std::vector<Letter> alphabet;
    std::set<State> states;
    std::set<State> initial;
    std::set<State> accepting;
    std::set<std::tuple<State, Letter, State>> transitions;

    void add_transition(const State& from, const Letter& letter, const State& to) {
        states.insert(from);
        states.insert(to);
        transitions.emplace(from, letter, to);
    }
};

/// Deterministic complete automaton: delta is total on states x alphabet.
template <typename Letter>
struct Dfa {
    std::vector<Letter> alphabet;
    std::set<State> states;
    State initial;
    std::set<State> accepting;
    std::map<std::pair<State, Letter>, State> delta;

    const State& step(const State& q, const Letter& l) const {
        auto it = delta.find({q, l});
        if (it == delta.end())
            throw std::invalid_argument("letter outside the automaton's alphabet or missing transition");
        return it->second;
    }

    /// Checks totality of delta; throws std::logic_error on gaps.
    void validate() const {
        if (!states.count(initial)) throw std::logic_error("initial state not in state set");
        for (const State& q : accepting)
            if (!states.count(q)) throw std::logic_error("accepting state not in state set");
        for (const State& q : states)
            for (const Letter& l : alphabet)
                if (!delta.count({q, l}))
                    throw std::logic_error("delta is not total at state '" + q + "'");
        for (const auto& [key, to] : delta)
            if (!states.count(key.first) || !states.count(to))
                throw std::logic_error("transition endpoint outside state set");
    }
};

/// Class conditions are deterministic complete automata over tags x {0,1}.
using ClassDfa = Dfa<MarkedLetter>;

/// Runs the DFA on a word; returns the final state and whether it accepts.
template <typename Letter>
std::pair<State, bool> dfa_run(const Dfa<Letter>& dfa, std::span<const Letter> word) {
    State q = dfa.initial;
    for (const Letter& l : word) q = dfa.step(q, l);
    return {q, dfa.accepting.count(q) > 0};
}

template <typename Letter>
std::pair<State, bool> dfa_run(const Dfa<Letter>& dfa, const std::vector<Letter>& word) {
    return dfa_run(dfa, std::span<const Letter>(word));
}

namespace detail {

inline std::string subset_name(const std::set<State>& qs) {
    return "{" + join(qs, ",") + "}";
}

} // namespace detail

/// Subset construction. The result is complete: the empty subset acts as an
/// explicit sink. Subset states are named by their sorted members, so the
/// output is reproducible.
template <typename Letter>
Dfa<Letter> determinize_complete(const Nfa<Letter>& nfa) {
    Dfa<Letter> out;
    out.alphabet = nfa.alphabet;

    std::map<std::pair<State, Letter>, std::set<State>> succ;
    for (const auto& [from, letter, to] : nfa.transitions) succ[{from, letter}].insert(to);

    std::map<std::set<State>, State> name_of;
    std::vector<std::set<State>> queue;
    auto intern = [&](const std::set<State>& subset) {
        auto it = name_of.find(subset);
        if (it != name_of.end()) return it->second;
        State name = detail::subset_name(subset);
        name_of.emplace(subset, name);
        out.states.insert(name);
        queue.push_back(subset);
        return name;
    };

    out.initial = intern(nfa.initial);
    for (std::size_t i = 0; i < queue.size(); ++i) {
        std::set<State> subset = queue[i];
        State from = name_of.at(subset);
        bool accepts = std::any_of(subset.begin(), subset.end(),
                                   [&](const State& q) { return nfa.accepting.count(q) > 0; });
        if (accepts) out.accepting.insert(from);
        for (const Letter& l : out.alphabet) {
            std::set<State> next;
            for (const State& q : subset) {
                auto it = succ.find({q, l});
                if (it != succ.end()) next.insert(it->second.begin(), it->second.end());
            }
            out.delta[{from, l}] = intern(next);
        }
    }
    return out;
}

/// Minimization by partition refinement (Moore). Keeps the automaton
/// complete, restricted to reachable states; block names are the sorted
/// member lists, so repeated runs agree.
template <typename Letter>
Dfa<Letter> minimize(const Dfa<Letter>& dfa) {
    // Reachable restriction first.
    std::set<State> reachable{dfa.initial};
    std::vector<State> stack{dfa.initial};
    while (!stack.empty()) {
        State q = stack.back();
        stack.pop_back();
        for (const Letter& l : dfa.alphabet) {
            const State& next = dfa.step(q, l);
            if (reachable.insert(next).second) stack.push_back(next);
        }
    }

    std::map<State, int> block_of;
    for (const State& q : reachable) block_of[q] = dfa.accepting.count(q) ? 1 : 0;

    bool changed = true;
    while (changed) {
        changed = false;
        // Signature: own block plus the blocks of all successors.
        std::map<std::vector<int>, int> sig_block;
        std::map<State, std::vector<int>> sigs;
        for (const State& q : reachable) {
            std::vector<int> sig{block_of[q]};
            for (const Letter& l : dfa.alphabet) sig.push_back(block_of[dfa.step(q, l)]);
            sigs[q] = std::move(sig);
        }
        std::map<State, int> next_block;
        for (const State& q : reachable)
            next_block[q] = sig_block.emplace(sigs[q], static_cast<int>(sig_block.size())).first->second;
        if (next_block != block_of) {
            block_of = std::move(next_block);
            changed = true;
        }
    }

    std::map<int, std::set<State>> members;
    for (const State& q : reachable) members[block_of[q]].insert(q);

    Dfa<Letter> out;
    out.alphabet = dfa.alphabet;
    std::map<int, State> name_of;
    for (const auto& [id, qs] : members) {
        State name = detail::subset_name(qs);
        name_of[id] = name;
        out.states.insert(name);
    }
    out.initial = name_of.at(block_of.at(dfa.initial));
    for (const auto& [id, qs] : members) {
        const State& rep = *qs.begin();
        if (dfa.accepting.count(rep)) out.accepting.insert(name_of.at(id));
        for (const Letter& l : out.alphabet)
            out.delta[{name_of.at(id), l}] = name_of.at(block_of.at(dfa.step(rep, l)));
    }
    return out;
}

/// Nondeterministic letter-to-letter transducer: every transition consumes
/// one input letter and emits one output letter.
struct Transducer {
    std::vector<Tag> input_alphabet;
    std::vector<Tag> output_alphabet;
    std::set<State> states;
    State initial;
    std::set<State> accepting;
    std::set<std::tuple<State, Tag, Tag, State>> transitions; // (q, in, out, q')

    void add_transition(const State& from, const Tag& in, const Tag& out, const State& to) {
        states.insert(from);
        states.insert(to);
        transitions.emplace(from, in, out, to);
    }

    void validate() const {
        if (!states.count(initial)) throw std::logic_error("initial state not in state set");
        std::set<Tag> ins(input_alphabet.begin(), input_alphabet.end());
        std::set<Tag> outs(output_alphabet.begin(), output_alphabet.end());
        for (const auto& [from, in, emit, to] : transitions) {
            if (!ins.count(in))
                throw std::logic_error("transducer reads '" + in + "' outside its input alphabet");
            if (!outs.count(emit))
                throw std::logic_error("transducer emits '" + emit + "' outside its output alphabet");
        }
    }
};

/// All (output letter, next state) pairs enabled at q on input sigma.
inline std::set<std::pair<Tag, State>> transducer_step(const Transducer& t, const State& q,
                                                       const Tag& sigma) {
    std::set<std::pair<Tag, State>> out;
    for (const auto& [from, in, emit, to] : t.transitions)
        if (from == q && in == sigma) out.emplace(emit, to);
    return out;
}

/// Identity transducer over one alphabet: copies its input.
inline Transducer identity_transducer(const std::vector<Tag>& sigma) {
    Transducer t;
    t.input_alphabet = sigma;
    t.output_alphabet = sigma;
    t.states = {"t0"};
    t.initial = "t0";
    t.accepting = {"t0"};
    for (const Tag& a : sigma) t.add_transition("t0", a, a, "t0");
    return t;
}

/// Marked alphabet over the given tags: (tag,0) and (tag,1) for each tag.
inline std::vector<MarkedLetter> marked_alphabet(const std::vector<Tag>& gamma) {
    std::vector<MarkedLetter> out;
    out.reserve(gamma.size() * 2);
    for (const Tag& g : gamma) {
        out.push_back(MarkedLetter{g, false});
        out.push_back(MarkedLetter{g, true});
    }
    return out;
}

} // namespace pca
