// compile.hpp -- counting translations: class automata into multicounter
// machines with plain zero tests, and partitioned 0-priority automata into
// priority machines whose only zero tests cover a prefix of the counter
// order. Cycle renamings live in the finite control; transient 0-acyclic
// states become virtual counters with a hard capacity.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pca/class_automata.hpp"
#include "pca/counter_machine.hpp"
#include "pca/priority.hpp"

namespace pca {

/// Counting abstraction of a run: the transducer state, the state tracking
/// values not met yet, and one counter per condition state holding how many
/// values currently sit there.
struct AbstractConfig {
    State transducer_state;
    State unseen_state;
    std::map<State, std::uint64_t> counts;

    bool operator==(const AbstractConfig&) const = default;
    auto operator<=>(const AbstractConfig&) const = default;
};

/// One resolved nondeterministic choice for an abstract step: the emitted
/// letter, the transducer successor, and either a recycled state (the letter
/// carries a value already counted there) or nothing (a fresh value).
struct AbstractChoice {
    Tag gamma;
    State next_transducer;
    std::optional<State> recycled;
};

inline AbstractConfig abstract_initial(const ClassAutomaton& ca) {
    AbstractConfig cfg;
    cfg.transducer_state = ca.transducer.initial;
    cfg.unseen_state = ca.class_condition.initial;
    for (const State& q : ca.class_condition.states) cfg.counts[q] = 0;
    return cfg;
}

/// All choices enabled at cfg on input sigma.
inline std::vector<AbstractChoice> abstract_choices(const ClassAutomaton& ca,
                                                    const AbstractConfig& cfg, const Tag& sigma) {
    std::vector<AbstractChoice> out;
    for (const auto& [emit, next] : transducer_step(ca.transducer, cfg.transducer_state, sigma)) {
        out.push_back(AbstractChoice{emit, next, std::nullopt});
        for (const auto& [q, n] : cfg.counts)
            if (n > 0) out.push_back(AbstractChoice{emit, next, q});
    }
    return out;
}

/// Applies one abstract step: optionally decrement the recycled state's
/// counter, push every counter along its (gamma,0)-move, then increment the
/// (gamma,1)-successor of the recycled state (or of the unseen tracker for a
/// fresh value).
inline AbstractConfig abstract_step(const ClassAutomaton& ca, const AbstractConfig& cfg,
                                    const AbstractChoice& choice) {
    const ClassDfa& cond = ca.class_condition;
    AbstractConfig next;
    next.transducer_state = choice.next_transducer;
    next.unseen_state = cond.step(cfg.unseen_state, MarkedLetter{choice.gamma, false});

    std::map<State, std::uint64_t> pre = cfg.counts;
    State inserted;
    if (choice.recycled) {
        auto it = pre.find(*choice.recycled);
        if (it == pre.end() || it->second == 0)
            throw std::logic_error("abstract step recycles an empty counter");
        --it->second;
        inserted = cond.step(*choice.recycled, MarkedLetter{choice.gamma, true});
    } else {
        inserted = cond.step(cfg.unseen_state, MarkedLetter{choice.gamma, true});
    }

    for (const State& q : cond.states) next.counts[q] = 0;
    for (const auto& [q, n] : pre)
        next.counts[cond.step(q, MarkedLetter{choice.gamma, false})] += n;
    ++next.counts[inserted];
    return next;
}

inline std::vector<AbstractConfig> abstract_successors(const ClassAutomaton& ca,
                                                       const AbstractConfig& cfg,
                                                       const Tag& sigma) {
    std::vector<AbstractConfig> out;
    for (const AbstractChoice& c : abstract_choices(ca, cfg, sigma))
        out.push_back(abstract_step(ca, cfg, c));
    return out;
}

/// Total count sitting on 0-acyclic states; bounded by the condensation
/// depth of the zero subgraph on every abstract run of a 0-priority
/// condition.
inline std::uint64_t zero_acyclic_sum(const PriorityAnalysis& a,
                                      const std::map<State, std::uint64_t>& counts) {
    std::uint64_t sum = 0;
    for (const auto& [q, n] : counts)
        if (a.is_zero_acyclic(q)) sum += n;
    return sum;
}

/// Step budget for bounded exploration of a generated machine, covering the
/// per-letter drain cost with room to spare.
inline std::size_t drain_step_budget(std::size_t word_bound, std::size_t counters) {
    return 50 * (word_bound + 1) * (counters + 1);
}

/// One real counter of a generated priority machine.
struct CounterSlot {
    std::size_t index = 0;     // 1-based position in the machine
    std::size_t condition = 0; // 0-based block index
    std::size_t stratum = 0;   // 1-based; the last stratum is l+1
    State state;
};

/// The counter order: per condition, the strata Acyc_1, Acyc_2 minus Acyc_1,
/// ..., then the remaining 0-cyclic states; conditions concatenated. States
/// inside a stratum are sorted by name.
struct CounterLayout {
    std::vector<CounterSlot> slots;
    std::map<std::pair<std::size_t, State>, std::size_t> slot_of; // (condition, state) -> index

    std::size_t size() const { return slots.size(); }
};

inline CounterLayout layout(const Pca& pca) {
    validate_pca(pca);
    CounterLayout out;
    for (std::size_t i = 0; i < pca.conditions.size(); ++i) {
        const PcaCondition& c = pca.conditions[i];
        PriorityAnalysis a = analyze(c.condition);
        std::vector<std::set<State>> acyc = acyc_sets(a, c.ordering);
        std::set<State> placed;
        for (std::size_t s = 0; s < acyc.size(); ++s) {
            for (const State& q : acyc[s]) { // std::set: lexicographic
                if (!placed.insert(q).second) continue; // nested sets repeat members
                std::size_t index = out.slots.size() + 1;
                out.slots.push_back(CounterSlot{index, i, s + 1, q});
                out.slot_of[{i, q}] = index;
            }
        }
    }
    return out;
}

namespace detail {

/// Straight-line update plan: single instructions and drain loops that move
/// one counter's whole value into another, exiting on a zero test.
struct PlanOp {
    enum class Kind { Single, Drain } kind = Kind::Single;
    Instr instr;                  // Single
    std::size_t from = 0, to = 0; // Drain source/target slots
    Op test = Op::IfZero;         // Drain exit test (IfZero or IfZeroPrefix)
};

inline PlanOp single(Op op, std::size_t slot) {
    PlanOp p;
    p.kind = PlanOp::Kind::Single;
    p.instr = Instr{op, slot};
    return p;
}

inline PlanOp drain(std::size_t from, std::size_t to, Op test) {
    PlanOp p;
    p.kind = PlanOp::Kind::Drain;
    p.from = from;
    p.to = to;
    p.test = test;
    return p;
}

/// Emits the plan between src and target. The first action consumes
/// `entry_letter`; everything afterwards is epsilon. Drain-exit test
/// transitions are recorded in `drain_meta` with the slot they stand for.
inline void emit_plan(CounterMachine& m, const State& src, const std::optional<Tag>& entry_letter,
                      const std::vector<PlanOp>& plan, const State& target,
                      const std::string& prefix,
                      std::map<Transition, std::size_t>* drain_meta) {
    if (plan.empty()) throw std::logic_error("emit_plan: empty plan");
    State cur = src;
    std::optional<Tag> letter = entry_letter;
    for (std::size_t p = 0; p < plan.size(); ++p) {
        State next = p + 1 == plan.size() ? target : prefix + ".s" + std::to_string(p + 1);
        const PlanOp& op = plan[p];
        if (op.kind == PlanOp::Kind::Single) {
            m.add(cur, letter, op.instr, next);
        } else {
            Instr test{op.test, op.from};
            State a = prefix + ".s" + std::to_string(p) + "a";
            State b = prefix + ".s" + std::to_string(p) + "b";
            m.add(cur, letter, Instr{Op::Dec, op.from}, b);
            m.add(cur, letter, test, next);
            m.add(b, std::nullopt, Instr{Op::Inc, op.to}, a);
            m.add(a, std::nullopt, Instr{Op::Dec, op.from}, b);
            m.add(a, std::nullopt, test, next);
            if (drain_meta) {
                (*drain_meta)[Transition{cur, letter, test, next}] = op.from;
                (*drain_meta)[Transition{a, std::nullopt, test, next}] = op.from;
            }
        }
        cur = next;
        letter = std::nullopt;
    }
}

} // namespace detail

/// Translates a class automaton into a multicounter machine with plain zero
/// tests accepting str(L). One counter per condition state; each input
/// letter triggers the abstract-run update, realized by renaming the
/// (gamma,0)-cycles in the finite control and draining the tree paths
/// backwards; a final phase pops accepting counters and tests for zero.
inline CounterMachine ca_to_mca(const ClassAutomaton& ca) {
    ca.transducer.validate();
    ca.class_condition.validate();
    const ClassDfa& cond = ca.class_condition;
    PriorityAnalysis a = analyze(cond);

    std::vector<State> cond_states(cond.states.begin(), cond.states.end());
    std::map<State, std::size_t> base_slot; // identity layout, sorted names
    for (std::size_t i = 0; i < cond_states.size(); ++i) base_slot[cond_states[i]] = i + 1;

    // A renaming maps each condition state to the physical slot holding its
    // value; interned so machine states stay compact.
    using Rho = std::vector<std::size_t>; // indexed like cond_states
    Rho rho0(cond_states.size());
    for (std::size_t i = 0; i < cond_states.size(); ++i) rho0[i] = i + 1;
    std::map<Rho, std::size_t> rho_ids;
    auto rho_id = [&](const Rho& r) {
        return rho_ids.emplace(r, rho_ids.size()).first->second;
    };
    std::map<State, std::size_t> state_index;
    for (std::size_t i = 0; i < cond_states.size(); ++i) state_index[cond_states[i]] = i;

    CounterMachine m;
    m.alphabet = ca.transducer.input_alphabet;
    m.counter_count = cond_states.size();

    struct Cfg {
        State qg, qc;
        Rho rho;
        auto operator<=>(const Cfg&) const = default;
    };
    std::map<Cfg, State> names;
    std::vector<Cfg> queue;
    auto intern = [&](const Cfg& cfg) {
        auto it = names.find(cfg);
        if (it != names.end()) return it->second;
        State name = "g=" + cfg.qg + "|u=" + cfg.qc + "|r" + std::to_string(rho_id(cfg.rho));
        names.emplace(cfg, name);
        m.states.insert(name);
        queue.push_back(cfg);
        return name;
    };

    // Per-letter drain schedule: tree edges of the (gamma,0) graph by
    // distance from the cycle, nearest first.
    std::map<Tag, std::vector<std::pair<State, State>>> tree_edges;
    std::set<Tag> gamma_set;
    for (const Tag& g : ca.transducer.output_alphabet) gamma_set.insert(g);
    for (const Tag& g : gamma_set) {
        tree_edges[g];
        const auto& f = a.letter_succ.at(g);
        const auto& cyclic = a.gamma_cyclic.at(g);
        std::map<State, std::size_t> dist;
        for (const State& q : cond.states) {
            if (cyclic.count(q)) continue;
            std::size_t d = 0;
            State cur = q;
            while (!cyclic.count(cur)) {
                cur = f.at(cur);
                ++d;
            }
            dist[q] = d;
        }
        std::vector<std::pair<std::size_t, State>> order;
        for (const auto& [q, d] : dist) order.emplace_back(d, q);
        std::sort(order.begin(), order.end());
        for (const auto& [d, q] : order) tree_edges[g].emplace_back(q, f.at(q));
    }

    const State q_acc = "acc";
    m.states.insert(q_acc);
    m.accepting = {q_acc};

    m.initial = intern(Cfg{ca.transducer.initial, cond.initial, rho0});

    std::map<std::pair<State, Tag>, std::vector<std::pair<Tag, State>>> tsteps;
    for (const auto& [from, in, emit, to] : ca.transducer.transitions)
        tsteps[{from, in}].emplace_back(emit, to);

    std::set<std::size_t> qs_emitted;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        Cfg cfg = queue[qi];
        State src = names.at(cfg);

        auto phys = [&](const Rho& r, const State& q) { return r[state_index.at(q)]; };

        for (const Tag& sigma : m.alphabet) {
            auto it = tsteps.find({cfg.qg, sigma});
            if (it == tsteps.end()) continue;
            for (const auto& [gamma, qg_next] : it->second) {
                // Renaming: value of q moves to the slot of its cycle successor.
                Rho rho_next = cfg.rho;
                for (const State& q : a.gamma_cyclic.at(gamma))
                    rho_next[state_index.at(a.letter_succ.at(gamma).at(q))] =
                        cfg.rho[state_index.at(q)];

                std::vector<detail::PlanOp> drains;
                for (const auto& [u, v] : tree_edges.at(gamma))
                    drains.push_back(detail::drain(phys(cfg.rho, u), phys(rho_next, v), Op::IfZero));

                State qc_next = cond.step(cfg.qc, MarkedLetter{gamma, false});
                State target = intern(Cfg{qg_next, qc_next, rho_next});

                // Fresh-value branch.
                {
                    std::vector<detail::PlanOp> plan = drains;
                    State pc1 = cond.step(cfg.qc, MarkedLetter{gamma, true});
                    plan.push_back(detail::single(Op::Inc, phys(rho_next, pc1)));
                    detail::emit_plan(m, src, sigma, plan, target,
                                      src + "/" + sigma + "/" + gamma + "/new", nullptr);
                }
                // Recycled-value branches, one per condition state.
                for (const State& qp : cond_states) {
                    std::vector<detail::PlanOp> plan;
                    plan.push_back(detail::single(Op::Dec, phys(cfg.rho, qp)));
                    plan.insert(plan.end(), drains.begin(), drains.end());
                    State pc1 = cond.step(qp, MarkedLetter{gamma, true});
                    plan.push_back(detail::single(Op::Inc, phys(rho_next, pc1)));
                    detail::emit_plan(m, src, sigma, plan, target,
                                      src + "/" + sigma + "/" + gamma + "/old=" + qp, nullptr);
                }
            }
        }

        // Acceptance phase: pop accepting counters, then test all zero.
        if (ca.transducer.accepting.count(cfg.qg)) {
            std::size_t rid = rho_id(cfg.rho);
            State qs = "fin|r" + std::to_string(rid);
            for (const State& q : cond.accepting)
                m.add(src, std::nullopt, Instr{Op::Dec, phys(cfg.rho, q)}, qs);
            if (qs_emitted.insert(rid).second) {
                for (const State& q : cond.accepting)
                    m.add(qs, std::nullopt, Instr{Op::Dec, phys(cfg.rho, q)}, qs);
                State cur = qs;
                for (std::size_t c = 1; c <= m.counter_count; ++c) {
                    State next = c == m.counter_count ? q_acc : qs + "|z" + std::to_string(c);
                    m.add(cur, std::nullopt, Instr{Op::IfZero, c}, next);
                    cur = next;
                }
            }
        }
    }

    m.validate();
    return m;
}

/// A generated priority machine plus the layout and the intended single-test
/// slot behind each prefix test emitted during a drain.
struct PmaBuild {
    Pma pma;
    CounterLayout counter_layout;
    std::map<Transition, std::size_t> drain_test_slot;
    std::vector<std::size_t> scc_depths; // per condition
};

/// Translates a partitioned 0-priority automaton into a priority machine
/// accepting str(L). Real counters are the 0-cyclic condition states in
/// stratum order, so every zero test taken during a staged drain may test
/// the whole prefix: everything earlier is already zero. The 0-acyclic
/// states live as virtual counters in the finite control, capacity bounded
/// by the condensation depth of the zero subgraph; only the chosen block's
/// counters are ever touched.
inline PmaBuild pca_to_pma(const Pca& pca) {
    validate_pca(pca);
    PmaBuild build;
    build.counter_layout = layout(pca);
    const CounterLayout& lay = build.counter_layout;
    const std::size_t total = lay.size();

    struct CondInfo {
        PriorityAnalysis analysis;
        std::vector<Tag> ordering;
        std::map<Tag, std::size_t> letter_index; // 1-based position in ordering
        std::vector<State> reals;                // sorted 0-cyclic states
        std::map<State, std::size_t> real_index;
        std::vector<State> virtuals; // sorted 0-acyclic states
        std::map<State, std::size_t> virtual_index;
        std::map<State, std::size_t> stratum_of; // reals only
        std::size_t first_slot = 0;
    };
    std::vector<CondInfo> infos(pca.conditions.size());
    for (std::size_t i = 0; i < pca.conditions.size(); ++i) {
        CondInfo& info = infos[i];
        const PcaCondition& c = pca.conditions[i];
        info.analysis = analyze(c.condition);
        info.ordering = c.ordering;
        for (std::size_t j = 0; j < c.ordering.size(); ++j) info.letter_index[c.ordering[j]] = j + 1;
        for (const State& q : info.analysis.zero_cyclic) {
            info.real_index[q] = info.reals.size();
            info.reals.push_back(q);
        }
        for (const State& q : c.condition.states)
            if (info.analysis.is_zero_acyclic(q)) {
                info.virtual_index[q] = info.virtuals.size();
                info.virtuals.push_back(q);
            }
        for (const CounterSlot& slot : lay.slots)
            if (slot.condition == i) {
                info.stratum_of[slot.state] = slot.stratum;
                if (info.first_slot == 0) info.first_slot = slot.index;
            }
        build.scc_depths.push_back(info.analysis.scc_depth);
    }

    CounterMachine m;
    m.alphabet = pca.transducer.input_alphabet;
    m.counter_count = total;

    // A renaming maps each real state of the active condition to its slot.
    using Rho = std::vector<std::size_t>;
    using Valuation = std::vector<std::uint64_t>;
    std::map<Rho, std::size_t> rho_ids;
    std::map<Valuation, std::size_t> val_ids;
    auto rho_id = [&](const Rho& r) { return rho_ids.emplace(r, rho_ids.size()).first->second; };
    auto val_id = [&](const Valuation& v) { return val_ids.emplace(v, val_ids.size()).first->second; };

    struct Cfg {
        std::size_t mode;
        State qg, qc;
        Valuation virtuals;
        Rho rho;
        auto operator<=>(const Cfg&) const = default;
    };
    std::map<Cfg, State> names;
    std::vector<Cfg> queue;
    auto intern = [&](const Cfg& cfg) {
        auto it = names.find(cfg);
        if (it != names.end()) return it->second;
        State name = "m" + std::to_string(cfg.mode + 1) + "|g=" + cfg.qg + "|u=" + cfg.qc + "|r" +
                     std::to_string(rho_id(cfg.rho)) + "|v" + std::to_string(val_id(cfg.virtuals));
        names.emplace(cfg, name);
        m.states.insert(name);
        queue.push_back(cfg);
        return name;
    };

    const State q_acc = "acc";
    m.states.insert(q_acc);
    m.accepting = {q_acc};

    // Initial mode choice: a balanced inc/dec pair of the chosen block's
    // first counter stands in for an instruction-free branch.
    std::vector<Cfg> initial_cfgs;
    for (std::size_t i = 0; i < pca.conditions.size(); ++i) {
        Rho rho0(infos[i].reals.size());
        for (std::size_t r = 0; r < rho0.size(); ++r)
            rho0[r] = lay.slot_of.at({i, infos[i].reals[r]});
        initial_cfgs.push_back(Cfg{i, pca.transducer.initial, pca.conditions[i].condition.initial,
                                   Valuation(infos[i].virtuals.size(), 0), rho0});
    }
    if (pca.conditions.size() == 1) {
        m.initial = intern(initial_cfgs[0]);
    } else {
        m.initial = "init";
        m.states.insert(m.initial);
        for (std::size_t i = 0; i < pca.conditions.size(); ++i) {
            State mid = "init|m" + std::to_string(i + 1);
            m.add(m.initial, std::nullopt, Instr{Op::Inc, infos[i].first_slot}, mid);
            m.add(mid, std::nullopt, Instr{Op::Dec, infos[i].first_slot}, intern(initial_cfgs[i]));
        }
    }

    std::map<std::pair<State, Tag>, std::vector<std::pair<Tag, State>>> tsteps;
    for (const auto& [from, in, emit, to] : pca.transducer.transitions)
        tsteps[{from, in}].emplace_back(emit, to);

    std::set<std::pair<std::size_t, std::size_t>> qs_emitted; // (mode, rho id)
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        Cfg cfg = queue[qi];
        State src = names.at(cfg);
        const CondInfo& info = infos[cfg.mode];
        const ClassDfa& cond = pca.conditions[cfg.mode].condition;
        std::set<Tag> block(pca.conditions[cfg.mode].gamma.begin(),
                            pca.conditions[cfg.mode].gamma.end());

        auto phys = [&](const Rho& r, const State& q) { return r[info.real_index.at(q)]; };
        auto is_virtual = [&](const State& q) { return info.virtual_index.count(q) > 0; };

        for (const Tag& sigma : m.alphabet) {
            auto it = tsteps.find({cfg.qg, sigma});
            if (it == tsteps.end()) continue;
            for (const auto& [gamma, qg_next] : it->second) {
                if (!block.count(gamma)) continue; // the chosen block fixes the output letters
                std::size_t j = info.letter_index.at(gamma);

                Rho rho_next = cfg.rho;
                for (const State& q : info.analysis.gamma_cyclic.at(gamma))
                    rho_next[info.real_index.at(info.analysis.letter_succ.at(gamma).at(q))] =
                        cfg.rho[info.real_index.at(q)];

                // Staged drains: strata up to the letter's index, in current
                // slot order. Their (gamma,0)-successors are cyclic states in
                // later strata, so the prefix up to the drained slot is zero
                // once its own value runs out.
                std::vector<detail::PlanOp> drains;
                {
                    std::vector<std::pair<std::size_t, State>> order;
                    for (const State& q : info.reals)
                        if (info.stratum_of.at(q) <= j) order.emplace_back(phys(cfg.rho, q), q);
                    std::sort(order.begin(), order.end());
                    for (const auto& [slot, q] : order) {
                        const State& succ = info.analysis.letter_succ.at(gamma).at(q);
                        drains.push_back(detail::drain(slot, phys(rho_next, succ), Op::IfZeroPrefix));
                    }
                }

                State qc_next = cond.step(cfg.qc, MarkedLetter{gamma, false});

                struct Branch {
                    std::string label;
                    std::optional<State> recycled;
                };
                std::vector<Branch> branches;
                branches.push_back(Branch{"new", std::nullopt});
                for (const State& q : info.reals) branches.push_back(Branch{"old=" + q, q});
                for (const State& v : info.virtuals)
                    if (cfg.virtuals[info.virtual_index.at(v)] > 0)
                        branches.push_back(Branch{"old=" + v, v});

                for (const Branch& br : branches) {
                    Valuation v1 = cfg.virtuals;
                    std::vector<detail::PlanOp> plan;
                    State pc1;
                    if (!br.recycled) {
                        pc1 = cond.step(cfg.qc, MarkedLetter{gamma, true});
                    } else if (is_virtual(*br.recycled)) {
                        --v1[info.virtual_index.at(*br.recycled)];
                        pc1 = cond.step(*br.recycled, MarkedLetter{gamma, true});
                    } else {
                        plan.push_back(detail::single(Op::Dec, phys(cfg.rho, *br.recycled)));
                        pc1 = cond.step(*br.recycled, MarkedLetter{gamma, true});
                    }

                    plan.insert(plan.end(), drains.begin(), drains.end());

                    // Virtual image along the zero moves, spilling into real
                    // counters where a 0-acyclic state's successor is real.
                    Valuation v2(info.virtuals.size(), 0);
                    for (std::size_t vi = 0; vi < info.virtuals.size(); ++vi) {
                        std::uint64_t n = v1[vi];
                        if (n == 0) continue;
                        const State& succ = info.analysis.letter_succ.at(gamma).at(info.virtuals[vi]);
                        if (is_virtual(succ)) {
                            v2[info.virtual_index.at(succ)] += n;
                        } else {
                            for (std::uint64_t t = 0; t < n; ++t)
                                plan.push_back(detail::single(Op::Inc, phys(rho_next, succ)));
                        }
                    }

                    if (is_virtual(pc1)) {
                        ++v2[info.virtual_index.at(pc1)];
                    } else {
                        plan.push_back(detail::single(Op::Inc, phys(rho_next, pc1)));
                    }

                    std::uint64_t vsum = 0;
                    for (std::uint64_t n : v2) vsum += n;
                    if (vsum > info.analysis.scc_depth)
                        throw std::logic_error(
                            "virtual counter capacity exceeded; the transient bound was violated");

                    if (plan.empty()) { // balanced no-op; transitions need an instruction
                        plan.push_back(detail::single(Op::Inc, info.first_slot));
                        plan.push_back(detail::single(Op::Dec, info.first_slot));
                    }

                    State target = intern(Cfg{cfg.mode, qg_next, qc_next, v2, rho_next});
                    detail::emit_plan(m, src, sigma, plan, target,
                                      src + "/" + sigma + "/" + gamma + "/" + br.label,
                                      &build.drain_test_slot);
                }
            }
        }

        // Acceptance: only from configurations whose virtual values all sit
        // on accepting states; those are dropped in the finite control, the
        // real accepting counters are popped, and one prefix test over the
        // whole counter order closes the run.
        if (pca.transducer.accepting.count(cfg.qg)) {
            bool virtuals_ok = true;
            std::uint64_t vsum = 0;
            for (std::size_t vi = 0; vi < info.virtuals.size(); ++vi) {
                vsum += cfg.virtuals[vi];
                if (cfg.virtuals[vi] > 0 && !cond.accepting.count(info.virtuals[vi]))
                    virtuals_ok = false;
            }
            if (virtuals_ok) {
                std::size_t rid = rho_id(cfg.rho);
                State qs = "fin|m" + std::to_string(cfg.mode + 1) + "|r" + std::to_string(rid);
                bool has_real_pop = false;
                for (const State& q : info.reals)
                    if (cond.accepting.count(q)) {
                        m.add(src, std::nullopt, Instr{Op::Dec, phys(cfg.rho, q)}, qs);
                        has_real_pop = true;
                    }
                if (vsum > 0)
                    m.add(src, std::nullopt, Instr{Op::IfZeroPrefix, total}, q_acc);
                if (has_real_pop && qs_emitted.insert({cfg.mode, rid}).second) {
                    for (const State& q : info.reals)
                        if (cond.accepting.count(q))
                            m.add(qs, std::nullopt, Instr{Op::Dec, phys(cfg.rho, q)}, qs);
                    m.add(qs, std::nullopt, Instr{Op::IfZeroPrefix, total}, q_acc);
                }
            }
        }
    }

    m.validate();
    build.pma = Pma::adopt(std::move(m));
    return build;
}

} // namespace pca
