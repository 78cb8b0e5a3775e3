#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pca/cli.hpp"
#include "pca/io.hpp"

using namespace pca;

namespace {

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "pca_cli_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = temp_dir() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

struct CliRun {
    int code;
    std::string out, err;
};

CliRun run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = pca::cli::run(args, out, err);
    return CliRun{code, out.str(), err.str()};
}

std::string separated_condition_file() {
    return write_temp("sep_condition.txt", serialize_class_dfa(fixtures::separated_condition()));
}

std::string separated_pca_file() {
    return write_temp("sep_pca.txt", serialize_pca(fixtures::separated_pca()));
}

} // namespace

TEST_CASE("text formats round-trip") {
    SUBCASE("marked automata") {
        ClassDfa dfa = fixtures::separated_condition();
        ClassDfa back = parse_class_dfa(serialize_class_dfa(dfa));
        CHECK(back.states == dfa.states);
        CHECK(back.initial == dfa.initial);
        CHECK(back.accepting == dfa.accepting);
        CHECK(back.delta == dfa.delta);
    }

    SUBCASE("partitioned automata keep their language") {
        oracle::Rng rng(4);
        for (int round = 0; round < 6; ++round) {
            Pca pca = oracle::random_pca(rng, 3, {"a", "b"}, 1 + round % 2);
            Pca back = *parse_composite(serialize_pca(pca)).pca;
            for (const DataWord& w : all_canonical_words({"a", "b"}, 3))
                CHECK(pca_accepts(back, w) == pca_accepts(pca, w));
        }
    }

    SUBCASE("counter machines and traces") {
        CounterMachine m = fixtures::anbn_machine();
        CounterMachine back = parse_counter_machine(serialize_counter_machine(m));
        CHECK(back.counter_count == m.counter_count);
        CHECK(back.initial == m.initial);
        CHECK(back.accepting == m.accepting);
        CHECK(back.transitions == m.transitions);

        BoundedLanguage lang = explore(m, 4, 4, 64);
        for (const Word& w : lang.words) {
            auto trace = parse_trace(serialize_trace(lang.traces.at(w)));
            CHECK(run_check(m, w, trace));
        }
    }

    SUBCASE("parse errors carry line numbers") {
        try {
            parse_class_dfa("alphabet: a\nstates: q0\ninitial: q0\ntrans: q0 a 2 q0\n");
            CHECK(false);
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
        }
        CHECK_THROWS_AS(parse_counter_machine("alphabet: a\ninitial: q\n"), ParseError);
        CHECK_THROWS_AS(parse_composite("type: nonsense\n"), ParseError);
    }
}

TEST_CASE("check-priority reports verdict, ordering, and strata") {
    CliRun positive = run_cli({"check-priority", separated_condition_file()});
    CHECK(positive.code == 0);
    CHECK(positive.out.find("verdict: 0-priority") != std::string::npos);
    CHECK(positive.out.find("ordering: a b") != std::string::npos);

    // x,y cycle through (a,0) and escape into the (a,0)-acyclic z via b.
    std::string blocked = write_temp("blocked.txt", R"(alphabet: a b
states: x y z
initial: x
accepting: x
trans: x a 0 y
trans: y a 0 x
trans: x b 0 z
trans: y b 0 z
trans: z a 0 x
trans: z b 0 z
trans: x a 1 x
trans: x b 1 x
trans: y a 1 y
trans: y b 1 y
trans: z a 1 z
trans: z b 1 z
)");
    CliRun negative = run_cli({"check-priority", blocked});
    CHECK(negative.code == 1);
    CHECK(negative.out.find("not-0-priority") != std::string::npos);
    CHECK(negative.out.find("(a,a):") != std::string::npos);

    CliRun structured = run_cli({"--format", "structured", "check-priority", blocked});
    CHECK(structured.code == 1);
    CHECK(structured.out.find("\"verdict\"") != std::string::npos);

    CliRun missing = run_cli({"check-priority", "/nonexistent/file"});
    CHECK(missing.code == 2);
}

TEST_CASE("member prints one verdict per word") {
    std::string words = write_temp("words.txt", "a:1 b:2 a:1\na:1 a:1\na:1 b:1 a:1\n");
    CliRun mixed = run_cli({"member", separated_pca_file(), words});
    CHECK(mixed.code == 1);
    std::istringstream lines(mixed.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("accept", 0) == 0);
    std::getline(lines, line);
    CHECK(line.rfind("reject", 0) == 0);
    std::getline(lines, line);
    CHECK(line.rfind("reject", 0) == 0);

    std::string good = write_temp("good_words.txt", "a:1\na:1 b:2 a:1\n");
    CHECK(run_cli({"member", separated_pca_file(), good}).code == 0);

    std::string bad = write_temp("bad_words.txt", "a:1\nb:oops\n");
    CHECK(run_cli({"member", separated_pca_file(), bad}).code == 2);

    std::string foreign = write_temp("foreign_words.txt", "z:1\n");
    CHECK(run_cli({"member", separated_pca_file(), foreign}).code == 2);
}

TEST_CASE("compile writes the machine and the layout") {
    auto machine_out = (temp_dir() / "sep.pma").string();
    auto layout_out = (temp_dir() / "sep.layout").string();
    CliRun ok = run_cli({"compile", separated_pca_file(), "-o", machine_out, "--layout", layout_out});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("priority-restriction: ok") != std::string::npos);
    CHECK(ok.out.find("counters: 3") != std::string::npos);

    std::ifstream machine_in(machine_out);
    std::stringstream buf;
    buf << machine_in.rdbuf();
    CounterMachine m = parse_counter_machine(buf.str());
    CHECK(validate_priority(m));

    std::ifstream layout_in(layout_out);
    std::string first_line;
    std::getline(layout_in, first_line);
    CHECK(first_line == "counter 1: condition 1 stratum 2 state q1");

    // A data automaton embeds first and needs no drain tests at all.
    Nfa<Tag> all;
    all.alphabet = {"a"};
    all.states = {"n"};
    all.initial = {"n"};
    all.accepting = {"n"};
    all.add_transition("n", "a", "n");
    std::string da_file = write_temp("da.txt", "type: da\n\n[transducer]\n" +
                                                   serialize_transducer(identity_transducer({"a"})) +
                                                   "\n[condition]\nalphabet: a\nstates: n\n"
                                                   "initial: n\naccepting: n\ntrans: n a n\n");
    auto da_out = (temp_dir() / "da.pma").string();
    CliRun da_run = run_cli({"compile", da_file, "-o", da_out});
    CHECK(da_run.code == 0);
    CHECK(da_run.out.find("drain-prefix-tests: 0") != std::string::npos);

    // A condition that is not 0-priority is a negative verdict, not a parse
    // error.
    std::string blocked_pca = write_temp("blocked_pca.txt", R"(type: pca

[transducer]
input: a b
output: a b
states: t0
initial: t0
accepting: t0
trans: t0 a -> a t0
trans: t0 b -> b t0

[partition]
G1: a b

[condition G1]
alphabet: a b
states: x y z
initial: x
accepting: x
trans: x a 0 y
trans: y a 0 x
trans: x b 0 z
trans: y b 0 z
trans: z a 0 x
trans: z b 0 z
trans: x a 1 x
trans: x b 1 x
trans: y a 1 y
trans: y b 1 y
trans: z a 1 z
trans: z b 1 z
)");
    auto blocked_out = (temp_dir() / "blocked.pma").string();
    CliRun blocked = run_cli({"compile", blocked_pca, "-o", blocked_out});
    CHECK(blocked.code == 1);
    CHECK(blocked.err.find("G1") != std::string::npos);
}

TEST_CASE("explore distinguishes emptiness from bound exhaustion") {
    std::string machine = write_temp("anbn.cm", serialize_counter_machine(fixtures::anbn_machine()));
    CliRun found = run_cli({"explore", machine, "--max-len", "4", "--sum-bound", "4"});
    CHECK(found.code == 0);
    CHECK(found.out.find("word: a b") != std::string::npos);
    CHECK(found.out.find("word: a a b b") != std::string::npos);

    CounterMachine dead = fixtures::anbn_machine();
    dead.accepting.clear();
    dead.accepting.insert("island"); // unreachable
    dead.states.insert("island");
    std::string dead_file = write_temp("dead.cm", serialize_counter_machine(dead));
    CliRun empty = run_cli({"explore", dead_file, "--max-len", "3", "--sum-bound", "8"});
    CHECK(empty.code == 1);
    CHECK(empty.out.find("empty up to bound") != std::string::npos);

    // A silent counter pump exhausts the sum bound: unknown, not negative.
    CounterMachine pump;
    pump.alphabet = {"a"};
    pump.counter_count = 1;
    pump.initial = "q";
    pump.accepting = {"island"};
    pump.states.insert("island");
    pump.add("q", std::nullopt, Instr{Op::Inc, 1}, "q");
    std::string pump_file = write_temp("pump.cm", serialize_counter_machine(pump));
    CliRun unknown = run_cli({"explore", pump_file, "--max-len", "2", "--sum-bound", "4"});
    CHECK(unknown.code == 3);

    CliRun witness = run_cli({"explore", separated_pca_file(), "--max-len", "3"});
    CHECK(witness.code == 0);
    CHECK(witness.out.find("witness: a:1") != std::string::npos);

    Pca empty_pca = fixtures::separated_pca();
    empty_pca.transducer.accepting.clear();
    std::string empty_pca_file = write_temp("empty_pca.txt", serialize_pca(empty_pca));
    CliRun no_witness = run_cli({"explore", empty_pca_file, "--max-len", "3"});
    CHECK(no_witness.code == 1);
    CHECK(no_witness.out.find("empty up to bound") != std::string::npos);
}

TEST_CASE("structured output is valid JSON for every subcommand") {
    std::string words = write_temp("json_words.txt", "a:1\n");
    std::string machine = write_temp("json_anbn.cm",
                                     serialize_counter_machine(fixtures::anbn_machine()));
    std::string program = write_temp("json_worked.prog", fixtures::worked_program_text());
    auto out_pma = (temp_dir() / "json_sep.pma").string();

    std::vector<std::vector<std::string>> invocations{
        {"--format", "structured", "check-priority", separated_condition_file()},
        {"--format", "structured", "member", separated_pca_file(), words},
        {"--format", "structured", "compile", separated_pca_file(), "-o", out_pma},
        {"--format", "structured", "explore", machine, "--max-len", "3", "--sum-bound", "4"},
        {"--format", "structured", "explore", separated_pca_file(), "--max-len", "2"},
        {"--format", "structured", "program", program, "--target", "b3=true", "--max-len", "3"},
    };
    for (const auto& args : invocations) {
        CliRun run = run_cli(args);
        INFO("args: " << pca::join(args, " "));
        CHECK_NOTHROW(nlohmann::json::parse(run.out));
    }
}

TEST_CASE("program reports classification, path, and witness") {
    std::string program = write_temp("worked.prog", fixtures::worked_program_text());

    CliRun start = run_cli({"program", program, "--target", "b1=true b2=false b3=false",
                            "--max-len", "3"});
    CHECK(start.code == 0);
    CHECK(start.out.find("classification: 0-priority two-loop") != std::string::npos);
    CHECK(start.out.find("witness: b:1") != std::string::npos);

    CliRun failure = run_cli({"program", program, "--target", "b3=true", "--max-len", "3"});
    CHECK(failure.code == 0);
    CHECK(failure.out.find("witness: a:1 a:1") != std::string::npos);

    CliRun partial = run_cli({"program", program, "--target", "b2=true", "--max-len", "3"});
    CHECK(partial.code == 0);
    CHECK(partial.out.find("witness: a:1") != std::string::npos);

    CliRun unreachable = run_cli({"program", program, "--target", "b1=true b2=true b3=true",
                                  "--max-len", "3"});
    CHECK(unreachable.code == 3);
    CHECK(unreachable.out.find("not reached") != std::string::npos);

    std::string flat = write_temp("flat.prog", "sigma: a\nb1 := true");
    CliRun rejected = run_cli({"program", flat, "--target", "b1=true", "--max-len", "2"});
    CHECK(rejected.code == 2);
    CHECK(rejected.err.find("two-loop shape") != std::string::npos);

    CliRun bad_target = run_cli({"program", program, "--target", "b9=true", "--max-len", "2"});
    CHECK(bad_target.code == 2);
}
