// cli.hpp -- the command-line front door: check-priority, member, compile,
// explore, and program subcommands over the documented file formats.
//
// Exit codes: 0 positive verdict, 1 negative verdict, 2 input error,
// 3 unknown (a bound truncated the search).
#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pca/array_program.hpp"
#include "pca/class_automata.hpp"
#include "pca/compile.hpp"
#include "pca/counter_machine.hpp"
#include "pca/io.hpp"
#include "pca/priority.hpp"

namespace pca::cli {

inline constexpr int kExitPositive = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitUnknown = 3;

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file '" + path + "'");
    out << content;
}

inline std::string format_word(const Word& w) { return join(w, " "); }

inline std::string format_marked(const MarkedWord& w) {
    std::vector<std::string> parts;
    for (const MarkedLetter& l : w) parts.push_back(to_string(l));
    return join(parts, "");
}

inline std::string format_boolean_state(const BooleanState& st) {
    std::vector<std::string> parts;
    for (const auto& [var, val] : st) parts.push_back(var + "=" + (val ? "true" : "false"));
    return join(parts, " ");
}

} // namespace detail

inline int cmd_check_priority(const std::string& file, bool structured, std::ostream& out) {
    ClassDfa dfa = parse_class_dfa(detail::read_file(file));
    PriorityAnalysis analysis = analyze(dfa);
    PriorityVerdict verdict = decide_zero_priority(analysis);

    nlohmann::json j;
    j["verdict"] = verdict.is_zero_priority ? "0-priority" : "not-0-priority";
    j["scc_depth"] = analysis.scc_depth;
    j["zero_cyclic"] = analysis.zero_cyclic;
    for (const auto& [g, qs] : analysis.gamma_cyclic) j["cyclic"][g] = qs;
    for (const auto& [pair, w] : verdict.pattern_relation)
        j["patterns"].push_back({{"first", pair.first},
                                 {"second", pair.second},
                                 {"witness", {w.q1, w.q2, w.q3, w.q4}}});
    if (verdict.ordering) {
        j["ordering"] = *verdict.ordering;
        std::vector<std::set<State>> acyc = acyc_sets(analysis, *verdict.ordering);
        for (const auto& stratum : acyc) j["acyc"].push_back(stratum);
    }

    if (structured) {
        out << j.dump(2) << "\n";
    } else {
        out << "verdict: " << j["verdict"].get<std::string>() << "\n";
        if (verdict.ordering) out << "ordering: " << join(*verdict.ordering, " ") << "\n";
        out << "zero-cyclic: " << join(analysis.zero_cyclic, " ") << "\n";
        for (const auto& [g, qs] : analysis.gamma_cyclic)
            out << "cyclic[" << g << "]: " << join(qs, " ") << "\n";
        out << "scc-depth: " << analysis.scc_depth << "\n";
        if (verdict.pattern_relation.empty()) {
            out << "patterns: none\n";
        } else {
            out << "patterns:\n";
            for (const auto& [pair, w] : verdict.pattern_relation)
                out << "  (" << pair.first << "," << pair.second << "): " << w.q1 << " " << w.q2
                    << " " << w.q3 << " " << w.q4 << "\n";
        }
        if (verdict.ordering) {
            std::vector<std::set<State>> acyc = acyc_sets(analysis, *verdict.ordering);
            out << "acyc:";
            for (std::size_t i = 0; i < acyc.size(); ++i)
                out << " [" << (i < verdict.ordering->size() ? (*verdict.ordering)[i] : Tag("rest"))
                    << "] {" << join(acyc[i], ",") << "}";
            out << "\n";
        }
    }
    return verdict.is_zero_priority ? kExitPositive : kExitNegative;
}

inline int cmd_member(const std::string& automaton_file, const std::string& words_file,
                      bool structured, std::ostream& out) {
    CompositeAutomaton automaton = parse_composite(detail::read_file(automaton_file));
    std::vector<DataWord> words = parse_data_word_file(detail::read_file(words_file));

    std::set<Tag> sigma(automaton.transducer().input_alphabet.begin(),
                        automaton.transducer().input_alphabet.end());
    for (const DataWord& w : words)
        for (const Tag& t : w.tags())
            if (!sigma.count(t))
                throw ParseError("word uses tag '" + t + "' outside the automaton's input alphabet");

    nlohmann::json j = nlohmann::json::array();
    bool all = true;
    for (const DataWord& w : words) {
        bool ok = automaton.accepts(w);
        all = all && ok;
        if (structured)
            j.push_back({{"word", format_data_word(w)}, {"accepted", ok}});
        else
            out << (ok ? "accept" : "reject") << "  " << format_data_word(w) << "\n";
    }
    if (structured) out << j.dump(2) << "\n";
    return all ? kExitPositive : kExitNegative;
}

inline int cmd_compile(const std::string& pca_file, const std::string& machine_out,
                       const std::string& layout_out, bool structured, std::ostream& out) {
    CompositeAutomaton automaton = parse_composite(detail::read_file(pca_file));
    Pca pca;
    switch (automaton.kind) {
        case CompositeKind::Pca: pca = *automaton.pca; break;
        case CompositeKind::Da: pca = da_to_pca(*automaton.da); break;
        case CompositeKind::Eda: pca = eda_to_pca(*automaton.eda); break;
        case CompositeKind::Ca:
            throw ParseError("plain class automata have no 0-priority partition; compile takes pca, da or eda files");
    }

    PmaBuild build = pca_to_pma(pca);
    detail::write_file(machine_out, serialize_counter_machine(build.pma.machine));

    std::ostringstream layout_text;
    for (const CounterSlot& slot : build.counter_layout.slots)
        layout_text << "counter " << slot.index << ": condition " << slot.condition + 1
                    << " stratum " << slot.stratum << " state " << slot.state << "\n";
    if (!layout_out.empty()) detail::write_file(layout_out, layout_text.str());

    std::size_t prefix_tests = build.drain_test_slot.size();
    if (structured) {
        nlohmann::json j;
        j["counters"] = build.pma.machine.counter_count;
        j["states"] = build.pma.machine.states.size();
        j["transitions"] = build.pma.machine.transitions.size();
        j["priority_restriction"] = validate_priority(build.pma.machine);
        j["drain_prefix_tests"] = prefix_tests;
        j["machine_file"] = machine_out;
        out << j.dump(2) << "\n";
    } else {
        out << "counters: " << build.pma.machine.counter_count << "\n";
        out << "states: " << build.pma.machine.states.size() << "\n";
        out << "transitions: " << build.pma.machine.transitions.size() << "\n";
        out << "priority-restriction: " << (validate_priority(build.pma.machine) ? "ok" : "violated")
            << "\n";
        out << "drain-prefix-tests: " << prefix_tests << "\n";
        out << layout_text.str();
    }
    return kExitPositive;
}

inline int cmd_explore(const std::string& file, std::size_t max_len,
                       std::optional<std::size_t> sum_bound, std::optional<std::size_t> steps,
                       bool structured, std::ostream& out) {
    std::string text = detail::read_file(file);
    bool is_machine = false;
    for (const auto& line : io_detail::significant_lines(text)) {
        std::string key, rest;
        if (io_detail::key_line(line, key, rest) && key == "counters") is_machine = true;
        if (io_detail::key_line(line, key, rest) && key == "type") break;
    }

    nlohmann::json j;
    if (is_machine) {
        CounterMachine m = parse_counter_machine(text);
        std::size_t sums = sum_bound.value_or(max_len + m.counter_count + 1);
        std::size_t cap = steps.value_or(drain_step_budget(max_len, m.counter_count));
        BoundedLanguage lang = explore(m, max_len, sums, cap);
        j["words"] = nlohmann::json::array();
        for (const Word& w : lang.words) j["words"].push_back(detail::format_word(w));
        j["complete"] = lang.complete();
        if (!structured) {
            for (const Word& w : lang.words)
                out << "word: " << (w.empty() ? "(empty)" : detail::format_word(w)) << "\n";
        }
        int code;
        if (!lang.words.empty()) {
            code = kExitPositive;
        } else if (lang.complete()) {
            if (!structured) out << "empty up to bound\n";
            j["verdict"] = "empty up to bound";
            code = kExitNegative;
        } else {
            if (!structured) out << "unknown: bound truncated the search\n";
            j["verdict"] = "unknown";
            code = kExitUnknown;
        }
        if (structured) out << j.dump(2) << "\n";
        return code;
    }

    CompositeAutomaton automaton = parse_composite(text);
    std::optional<DataWord> witness = automaton.bounded_witness(max_len);
    if (witness) {
        if (structured) {
            j["witness"] = format_data_word(*witness);
            out << j.dump(2) << "\n";
        } else {
            out << "witness: " << format_data_word(*witness) << "\n";
        }
        return kExitPositive;
    }
    if (structured) {
        j["verdict"] = "empty up to bound";
        out << j.dump(2) << "\n";
    } else {
        out << "empty up to bound\n";
    }
    return kExitNegative;
}

inline std::vector<BooleanState> parse_targets(const Program& prog, const std::string& spec) {
    BooleanState partial;
    for (const std::string& token : split_ws(spec)) {
        auto eq = token.find('=');
        if (eq == std::string::npos)
            throw ParseError("target entries look like b1=true");
        std::string var = token.substr(0, eq);
        std::string val = token.substr(eq + 1);
        if (!prog.bool_vars.count(var))
            throw ParseError("unknown Boolean variable '" + var + "' in target");
        if (val != "true" && val != "false")
            throw ParseError("target value for '" + var + "' must be true or false");
        partial[var] = val == "true";
    }
    // Expand a partial target to every completion.
    std::vector<std::string> free_vars;
    for (const std::string& b : prog.bool_vars)
        if (!partial.count(b)) free_vars.push_back(b);
    std::vector<BooleanState> targets;
    for (std::size_t mask = 0; mask < (std::size_t{1} << free_vars.size()); ++mask) {
        BooleanState t = partial;
        for (std::size_t i = 0; i < free_vars.size(); ++i) t[free_vars[i]] = (mask >> i) & 1u;
        targets.push_back(std::move(t));
    }
    return targets;
}

inline int cmd_program(const std::string& file, const std::string& target_spec, std::size_t max_len,
                       bool structured, std::ostream& out) {
    Program prog = parse_program(detail::read_file(file));
    std::vector<BooleanState> targets = parse_targets(prog, target_spec);

    Nd2Shape shape = is_restricted_nd2(prog);
    if (!shape.ok) {
        std::string diagnosis = join(shape.violations, "; ");
        throw ParseError("program is not in the two-loop shape: " + diagnosis);
    }
    ReachResult result = reachable(prog, targets, max_len);

    nlohmann::json j;
    j["classification"] = result.zero_priority_syntax ? "0-priority two-loop" : "two-loop";
    j["condition_zero_priority"] = result.condition_zero_priority;
    j["target"] = target_spec;
    j["max_len"] = max_len;
    j["path"] = result.path;
    if (result.witness) j["witness"] = format_data_word(*result.witness);
    j["verdict"] = result.witness ? "reachable" : "not reached up to bound";

    if (structured) {
        out << j.dump(2) << "\n";
    } else {
        out << "classification: " << j["classification"].get<std::string>() << "\n";
        out << "condition-0-priority: " << (result.condition_zero_priority ? "yes" : "no") << "\n";
        out << "target: " << target_spec << "\n";
        out << "path: " << result.path << "\n";
        if (result.witness)
            out << "witness: " << format_data_word(*result.witness) << "\n";
        else
            out << "not reached up to length " << max_len << "\n";
    }
    return result.witness ? kExitPositive : kExitUnknown;
}

/// Entry point shared by the binary and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"toolkit for data-word automata with 0-priority class conditions"};
    app.require_subcommand(1);

    std::string format = "text";
    app.add_option("--format", format, "output format: text or structured")
        ->check(CLI::IsMember({"text", "structured"}));

    std::string automaton_file, words_file, out_file, layout_file, program_file, target;
    std::size_t max_len = 4;
    std::optional<std::size_t> sum_bound, steps;

    CLI::App* check = app.add_subcommand("check-priority", "decide the 0-priority property");
    check->add_option("automaton", automaton_file, "condition automaton file")->required();

    CLI::App* member = app.add_subcommand("member", "test data words for membership");
    member->add_option("automaton", automaton_file, "composite automaton file")->required();
    member->add_option("words", words_file, "data-word file, one word per line")->required();

    CLI::App* compile = app.add_subcommand("compile", "compile into a priority counter machine");
    compile->add_option("automaton", automaton_file, "pca, da or eda file")->required();
    compile->add_option("-o,--output", out_file, "machine output file")->required();
    compile->add_option("--layout", layout_file, "counter layout report file");

    CLI::App* explore_cmd = app.add_subcommand("explore", "bounded language exploration");
    explore_cmd->add_option("file", automaton_file, "machine or composite automaton file")->required();
    explore_cmd->add_option("--max-len", max_len, "word length bound")->required();
    std::size_t sum_opt = 0, step_opt = 0;
    CLI::Option* sum_flag = explore_cmd->add_option("--sum-bound", sum_opt, "counter sum bound");
    CLI::Option* step_flag = explore_cmd->add_option("--steps", step_opt, "step budget");

    CLI::App* program = app.add_subcommand("program", "Boolean-state reachability for array programs");
    program->add_option("file", program_file, "program file")->required();
    program->add_option("--target", target, "target Boolean state, e.g. \"b1=true b2=false\"")
        ->required();
    program->add_option("--max-len", max_len, "array length bound");

    std::vector<const char*> argv;
    argv.push_back("pca");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPositive;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    bool structured = format == "structured";
    try {
        if (check->parsed()) return cmd_check_priority(automaton_file, structured, out);
        if (member->parsed()) return cmd_member(automaton_file, words_file, structured, out);
        if (compile->parsed())
            return cmd_compile(automaton_file, out_file, layout_file, structured, out);
        if (explore_cmd->parsed()) {
            if (*sum_flag) sum_bound = sum_opt;
            if (*step_flag) steps = step_opt;
            return cmd_explore(automaton_file, max_len, sum_bound, steps, structured, out);
        }
        if (program->parsed()) return cmd_program(program_file, target, max_len, structured, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return compile->parsed() ? kExitNegative : kExitInputError;
    } catch (const std::logic_error& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInputError;
    }
    err << "error: no subcommand\n";
    return kExitInputError;
}

} // namespace pca::cli
