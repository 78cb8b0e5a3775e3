// fixtures.hpp -- shared test inputs: the separated-duplicates condition and
// automaton, the zero-pinned three-state condition used by the structural
// analysis tests, the counting machine for a^n b^n, and the worked array
// program.
#pragma once

#include <string>

#include "pca/class_automata.hpp"
#include "pca/counter_machine.hpp"
#include "pca/fsm.hpp"

namespace fixtures {

using namespace pca;

/// Condition for "between any two equal-valued a's there is a b with a
/// different value": q0 tracks no pending a, q1 a pending a, q2 a violation.
/// An out-of-class b resolves the pending a; everything else stands still.
inline ClassDfa separated_condition() {
    ClassDfa dfa;
    dfa.alphabet = marked_alphabet({"a", "b"});
    dfa.states = {"q0", "q1", "q2"};
    dfa.initial = "q0";
    dfa.accepting = {"q0", "q1"};
    auto set = [&](const State& q, const Tag& t, bool m, const State& to) {
        dfa.delta[{q, MarkedLetter{t, m}}] = to;
    };
    set("q0", "a", true, "q1");
    set("q0", "b", true, "q0");
    set("q1", "a", true, "q2");
    set("q1", "b", true, "q1"); // same-valued b's do not separate
    set("q2", "a", true, "q2");
    set("q2", "b", true, "q2");
    set("q0", "a", false, "q0");
    set("q0", "b", false, "q0");
    set("q1", "a", false, "q1");
    set("q1", "b", false, "q0"); // the separator
    set("q2", "a", false, "q2");
    set("q2", "b", false, "q2");
    return dfa;
}

/// Identity transducer plus the separated-duplicates condition.
inline Pca separated_pca() {
    ClassDfa cond = separated_condition();
    PriorityVerdict v = decide_zero_priority(cond);
    return Pca{identity_transducer({"a", "b"}), {PcaCondition{{"a", "b"}, cond, *v.ordering}}};
}

/// Three-state condition with the zero moves pinned to
///   q1 -(a,0)-> q1, q1 -(b,0)-> q0, q0 -(b,0)-> q2, q2 -(b,0)-> q0
/// and the remaining zero moves self-loops; one-moves are self-loops. Used
/// by the graph-analysis tests: q1 is 0-cyclic but (b,0)-acyclic, q0 and q2
/// are both.
inline ClassDfa two_cycle_condition() {
    ClassDfa dfa;
    dfa.alphabet = marked_alphabet({"a", "b"});
    dfa.states = {"q0", "q1", "q2"};
    dfa.initial = "q0";
    dfa.accepting = {"q0", "q1"};
    auto set = [&](const State& q, const Tag& t, bool m, const State& to) {
        dfa.delta[{q, MarkedLetter{t, m}}] = to;
    };
    for (const State& q : dfa.states)
        for (const Tag t : {"a", "b"}) set(q, t, true, q);
    set("q0", "a", false, "q0");
    set("q1", "a", false, "q1");
    set("q2", "a", false, "q2");
    set("q1", "b", false, "q0");
    set("q0", "b", false, "q2");
    set("q2", "b", false, "q0");
    return dfa;
}

/// One-counter machine accepting a^n b^n (including the empty word).
inline CounterMachine anbn_machine() {
    CounterMachine m;
    m.alphabet = {"a", "b"};
    m.counter_count = 1;
    m.initial = "s0";
    m.accepting = {"acc"};
    m.add("s0", Tag("a"), Instr{Op::Inc, 1}, "s0");
    m.add("s0", Tag("b"), Instr{Op::Dec, 1}, "s1");
    m.add("s1", Tag("b"), Instr{Op::Dec, 1}, "s1");
    m.add("s0", std::nullopt, Instr{Op::IfZeroPrefix, 1}, "acc");
    m.add("s1", std::nullopt, Instr{Op::IfZeroPrefix, 1}, "acc");
    return m;
}

/// The worked two-loop program: scans for two equal-valued a's with no
/// separating b of a different value, latching b3 on a violation.
inline std::string worked_program_text() {
    return R"(sigma: a b
for i:=1 to length(A) do
{
  if not b3 then
    { b1:=true; b2:=false }
  else
    skip;
  for j:=1 to length(A) do
  {
    if A[i].d = A[j].d then
    {
      if A[j].s = a then
        if b1 and not b2 and not b3 then
          { b1:=false; b2:=true }
        else if not b1 and b2 and not b3 then
          { b2:=false; b3:=true }
        else skip
      else skip
    }
    else
    {
      if not b1 and b2 and not b3 then
        if A[j].s = b then
          { b2:=false; b1:=true }
        else skip
      else skip
    }
  }
}
)";
}

} // namespace fixtures
