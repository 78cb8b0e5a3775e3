// class_automata.hpp -- acceptance semantics of data automata, extended data
// automata, class automata, and class automata with partitioned 0-priority
// conditions; the embedding and closure constructions; bounded nonemptiness
// by canonical enumeration.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pca/data_word.hpp"
#include "pca/fsm.hpp"
#include "pca/priority.hpp"

namespace pca {

/// Letter standing for "some other class's position" in extended conditions.
inline const Tag kZeroLetter = "0";

/// Transducer plus a class condition read over the class positions only.
struct DataAutomaton {
    Transducer transducer;
    Nfa<Tag> class_condition; // alphabet Gamma
};

/// Class condition over Gamma + {0}: out-of-class positions collapse to 0.
struct ExtendedDataAutomaton {
    Transducer transducer;
    Nfa<Tag> class_condition; // alphabet Gamma + {0}
};

/// Class condition over Gamma x {0,1}: out-of-class positions keep their tag.
struct ClassAutomaton {
    Transducer transducer;
    ClassDfa class_condition;
};

/// One block of a partitioned condition: its letters, the deterministic
/// complete condition over them, and a letter ordering under which the
/// condition is 0-priority.
struct PcaCondition {
    std::vector<Tag> gamma;
    ClassDfa condition;
    std::vector<Tag> ordering;
};

/// Class automaton whose condition is a disjoint union of 0-priority
/// languages over a partition of the output alphabet.
struct Pca {
    Transducer transducer;
    std::vector<PcaCondition> conditions;
};

/// Checks the partition and per-condition invariants; throws on violation
/// naming the failing condition.
inline void validate_pca(const Pca& pca) {
    pca.transducer.validate();
    std::set<Tag> seen;
    for (std::size_t i = 0; i < pca.conditions.size(); ++i) {
        const PcaCondition& c = pca.conditions[i];
        std::string label = "condition " + std::to_string(i + 1);
        if (c.gamma.empty()) throw std::invalid_argument(label + ": empty letter block");
        for (const Tag& g : c.gamma)
            if (!seen.insert(g).second)
                throw std::invalid_argument(label + ": letter '" + g + "' occurs in two blocks");
        c.condition.validate();
        PriorityAnalysis a = analyze(c.condition);
        if (std::set<Tag>(a.gamma.begin(), a.gamma.end()) !=
            std::set<Tag>(c.gamma.begin(), c.gamma.end()))
            throw std::invalid_argument(label + ": condition alphabet differs from its block");
        if (!ordering_realizes_zero_priority(a, c.ordering))
            throw std::invalid_argument(label + ": stored ordering does not realize 0-priority");
    }
    std::set<Tag> outputs(pca.transducer.output_alphabet.begin(),
                          pca.transducer.output_alphabet.end());
    if (seen != outputs)
        throw std::invalid_argument("partition does not cover the transducer output alphabet");
}

namespace detail {

inline void check_tags(const Transducer& t, const DataWord& dw) {
    std::set<Tag> sigma(t.input_alphabet.begin(), t.input_alphabet.end());
    for (const Tag& tag : dw.tags())
        if (!sigma.count(tag))
            throw std::invalid_argument("tag '" + tag + "' outside the input alphabet");
}

/// Search over transducer nondeterminism with one deterministic condition
/// tracker per class. `member`/`other` advance a tracker on in-class and
/// out-of-class positions. Trackers start at the condition's initial state,
/// so a class's tracker equals the unseen-values state until its first
/// position, which is exactly the run definition.
template <typename MemberStep, typename OtherStep>
bool class_search(const Transducer& t, const State& cond_initial,
                  const std::set<State>& cond_accepting, const DataWord& dw, MemberStep member,
                  OtherStep other, const std::set<Tag>* allowed_outputs) {
    check_tags(t, dw);
    ClassPartition part = classes(dw);
    std::vector<std::size_t> class_of(dw.length());
    for (std::size_t b = 0; b < part.blocks.size(); ++b)
        for (std::size_t p : part.blocks[b].positions) class_of[p - 1] = b;

    std::map<std::pair<State, Tag>, std::vector<std::pair<Tag, State>>> steps;
    for (const auto& [from, in, emit, to] : t.transitions) steps[{from, in}].emplace_back(emit, to);

    using Config = std::pair<State, std::vector<State>>;
    std::set<Config> frontier;
    frontier.insert({t.initial, std::vector<State>(part.blocks.size(), cond_initial)});

    for (std::size_t pos = 0; pos < dw.length(); ++pos) {
        const Tag& tag = dw.tags()[pos];
        std::set<Config> next;
        for (const Config& cfg : frontier) {
            auto it = steps.find({cfg.first, tag});
            if (it == steps.end()) continue;
            for (const auto& [emit, to] : it->second) {
                if (allowed_outputs && !allowed_outputs->count(emit)) continue;
                std::vector<State> trackers = cfg.second;
                for (std::size_t c = 0; c < trackers.size(); ++c)
                    trackers[c] = c == class_of[pos] ? member(trackers[c], emit)
                                                     : other(trackers[c], emit);
                next.insert({to, std::move(trackers)});
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) return false;
    }

    for (const Config& cfg : frontier) {
        if (!t.accepting.count(cfg.first)) continue;
        bool ok = std::all_of(cfg.second.begin(), cfg.second.end(),
                              [&](const State& q) { return cond_accepting.count(q) > 0; });
        if (ok) return true;
    }
    return false;
}

} // namespace detail

inline bool da_accepts(const DataAutomaton& da, const DataWord& dw) {
    Dfa<Tag> cond = determinize_complete(da.class_condition);
    return detail::class_search(
        da.transducer, cond.initial, cond.accepting, dw,
        [&](const State& q, const Tag& g) { return cond.step(q, g); },
        [&](const State& q, const Tag&) { return q; }, nullptr);
}

inline bool eda_accepts(const ExtendedDataAutomaton& eda, const DataWord& dw) {
    for (const Tag& g : eda.transducer.output_alphabet)
        if (g == kZeroLetter)
            throw std::invalid_argument("extended condition: output alphabet may not contain 0");
    Dfa<Tag> cond = determinize_complete(eda.class_condition);
    return detail::class_search(
        eda.transducer, cond.initial, cond.accepting, dw,
        [&](const State& q, const Tag& g) { return cond.step(q, g); },
        [&](const State& q, const Tag&) { return cond.step(q, kZeroLetter); }, nullptr);
}

inline bool ca_accepts(const ClassAutomaton& ca, const DataWord& dw) {
    const ClassDfa& cond = ca.class_condition;
    return detail::class_search(
        ca.transducer, cond.initial, cond.accepting, dw,
        [&](const State& q, const Tag& g) { return cond.step(q, MarkedLetter{g, true}); },
        [&](const State& q, const Tag& g) { return cond.step(q, MarkedLetter{g, false}); },
        nullptr);
}

/// The transducer picks a block index and must emit within that block; every
/// class word must then satisfy the block's condition.
inline bool pca_accepts(const Pca& pca, const DataWord& dw) {
    for (const PcaCondition& c : pca.conditions) {
        std::set<Tag> allowed(c.gamma.begin(), c.gamma.end());
        bool ok = detail::class_search(
            pca.transducer, c.condition.initial, c.condition.accepting, dw,
            [&](const State& q, const Tag& g) { return c.condition.step(q, MarkedLetter{g, true}); },
            [&](const State& q, const Tag& g) { return c.condition.step(q, MarkedLetter{g, false}); },
            &allowed);
        if (ok) return true;
    }
    return false;
}

/// Views a single-block automaton as a plain class automaton.
inline ClassAutomaton pca_as_class_automaton(const Pca& pca) {
    if (pca.conditions.size() != 1)
        throw std::invalid_argument("only single-block automata convert directly");
    return ClassAutomaton{pca.transducer, pca.conditions[0].condition};
}

namespace detail {

inline PcaCondition make_condition(std::vector<Tag> gamma, ClassDfa condition) {
    PriorityVerdict v = decide_zero_priority(condition);
    if (!v.is_zero_priority || !v.ordering)
        throw std::logic_error("constructed condition unexpectedly fails the 0-priority check");
    return PcaCondition{std::move(gamma), std::move(condition), *v.ordering};
}

} // namespace detail

/// Embeds a data automaton: determinize the condition over Gamma, keep its
/// one-transitions, and replace every zero-move by a self-loop (class
/// positions of other values are invisible to data-automaton semantics).
inline Pca da_to_pca(const DataAutomaton& da) {
    std::vector<Tag> gamma = da.transducer.output_alphabet;
    Nfa<Tag> nfa = da.class_condition;
    nfa.alphabet = gamma;
    Dfa<Tag> det = determinize_complete(nfa);

    ClassDfa cond;
    cond.alphabet = marked_alphabet(gamma);
    cond.states = det.states;
    cond.initial = det.initial;
    cond.accepting = det.accepting;
    for (const State& q : det.states)
        for (const Tag& g : gamma) {
            cond.delta[{q, MarkedLetter{g, true}}] = det.step(q, g);
            cond.delta[{q, MarkedLetter{g, false}}] = q;
        }

    Pca out{da.transducer, {detail::make_condition(gamma, std::move(cond))}};
    validate_pca(out);
    return out;
}

/// Embeds an extended data automaton: determinize over Gamma + {0}, keep
/// one-transitions per letter, and expand each 0-move into a (g,0)-move for
/// every letter g. The zero-subgraph then coincides with every per-letter
/// subgraph, so any ordering works.
inline Pca eda_to_pca(const ExtendedDataAutomaton& eda) {
    std::vector<Tag> gamma = eda.transducer.output_alphabet;
    for (const Tag& g : gamma)
        if (g == kZeroLetter)
            throw std::invalid_argument("extended condition: output alphabet may not contain 0");

    Nfa<Tag> nfa = eda.class_condition;
    nfa.alphabet = gamma;
    nfa.alphabet.push_back(kZeroLetter);
    Dfa<Tag> det = determinize_complete(nfa);

    ClassDfa cond;
    cond.alphabet = marked_alphabet(gamma);
    cond.states = det.states;
    cond.initial = det.initial;
    cond.accepting = det.accepting;
    for (const State& q : det.states)
        for (const Tag& g : gamma) {
            cond.delta[{q, MarkedLetter{g, true}}] = det.step(q, g);
            cond.delta[{q, MarkedLetter{g, false}}] = det.step(q, kZeroLetter);
        }

    Pca out{eda.transducer, {detail::make_condition(gamma, std::move(cond))}};
    validate_pca(out);
    return out;
}

namespace detail {

inline Tag side_tag(int side, const Tag& g) { return std::to_string(side) + ":" + g; }
inline State side_state(int side, const State& q) { return std::to_string(side) + ":" + q; }

inline PcaCondition relabel_condition(int side, const PcaCondition& c) {
    PcaCondition out;
    for (const Tag& g : c.gamma) out.gamma.push_back(side_tag(side, g));
    for (const Tag& g : c.ordering) out.ordering.push_back(side_tag(side, g));
    out.condition.alphabet = marked_alphabet(out.gamma);
    out.condition.states = c.condition.states;
    out.condition.initial = c.condition.initial;
    out.condition.accepting = c.condition.accepting;
    for (const auto& [key, to] : c.condition.delta)
        out.condition.delta[{key.first, MarkedLetter{side_tag(side, key.second.tag), key.second.marked}}] = to;
    return out;
}

} // namespace detail

/// Disjoint union: output letters are relabeled per side, the partitions are
/// concatenated, and a fresh initial transducer state enters either side.
inline Pca pca_union(const Pca& p1, const Pca& p2) {
    if (p1.transducer.input_alphabet != p2.transducer.input_alphabet)
        throw std::invalid_argument("union requires identical input alphabets");

    Pca out;
    Transducer& t = out.transducer;
    t.input_alphabet = p1.transducer.input_alphabet;
    const State fresh_initial = "u0";
    t.initial = fresh_initial;
    t.states.insert(fresh_initial);

    const Pca* sides[2] = {&p1, &p2};
    for (int s = 0; s < 2; ++s) {
        const Transducer& src = sides[s]->transducer;
        for (const Tag& g : src.output_alphabet) t.output_alphabet.push_back(detail::side_tag(s + 1, g));
        for (const State& q : src.states) t.states.insert(detail::side_state(s + 1, q));
        for (const State& q : src.accepting) t.accepting.insert(detail::side_state(s + 1, q));
        for (const auto& [from, in, emit, to] : src.transitions) {
            t.transitions.emplace(detail::side_state(s + 1, from), in, detail::side_tag(s + 1, emit),
                                  detail::side_state(s + 1, to));
            if (from == src.initial)
                t.transitions.emplace(fresh_initial, in, detail::side_tag(s + 1, emit),
                                      detail::side_state(s + 1, to));
        }
        if (src.accepting.count(src.initial)) t.accepting.insert(fresh_initial);
        for (const PcaCondition& c : sides[s]->conditions)
            out.conditions.push_back(detail::relabel_condition(s + 1, c));
    }
    validate_pca(out);
    return out;
}

/// Letter projection of the input alphabet. Erasing maps would change word
/// lengths under a letter-to-letter transducer and are rejected.
inline Pca pca_letter_project(const Pca& pca, const Projection& prj) {
    for (const Tag& t : pca.transducer.input_alphabet) {
        auto it = prj.find(t);
        if (it == prj.end())
            throw std::invalid_argument("projection is not defined on tag '" + t + "'");
        if (!it->second)
            throw std::invalid_argument("erasing projections are not supported for letter-to-letter transducers");
    }
    Pca out = pca;
    Transducer& t = out.transducer;
    std::set<Tag> sigma2;
    for (const Tag& a : pca.transducer.input_alphabet) sigma2.insert(*prj.at(a));
    t.input_alphabet.assign(sigma2.begin(), sigma2.end());
    t.transitions.clear();
    for (const auto& [from, in, emit, to] : pca.transducer.transitions)
        t.transitions.emplace(from, *prj.at(in), emit, to);
    validate_pca(out);
    return out;
}

/// First canonical data word of length <= max_len accepted by the automaton,
/// in enumeration order. Acceptance checks are exact, so an empty result
/// means the language holds no word up to the bound.
template <typename Automaton, typename AcceptFn>
std::optional<DataWord> bounded_nonempty_by(const Automaton& m, std::size_t max_len, AcceptFn accepts) {
    DataWordEnumerator en(m.transducer.input_alphabet, max_len);
    while (auto dw = en.next())
        if (accepts(m, *dw)) return dw;
    return std::nullopt;
}

inline std::optional<DataWord> bounded_nonempty(const DataAutomaton& m, std::size_t max_len) {
    return bounded_nonempty_by(m, max_len, [](const DataAutomaton& a, const DataWord& w) { return da_accepts(a, w); });
}
inline std::optional<DataWord> bounded_nonempty(const ExtendedDataAutomaton& m, std::size_t max_len) {
    return bounded_nonempty_by(m, max_len, [](const ExtendedDataAutomaton& a, const DataWord& w) { return eda_accepts(a, w); });
}
inline std::optional<DataWord> bounded_nonempty(const ClassAutomaton& m, std::size_t max_len) {
    return bounded_nonempty_by(m, max_len, [](const ClassAutomaton& a, const DataWord& w) { return ca_accepts(a, w); });
}
inline std::optional<DataWord> bounded_nonempty(const Pca& m, std::size_t max_len) {
    return bounded_nonempty_by(m, max_len, [](const Pca& a, const DataWord& w) { return pca_accepts(a, w); });
}

} // namespace pca
