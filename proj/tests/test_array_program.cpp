#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pca/array_program.hpp"

using namespace pca;

namespace {

Program worked_program() { return parse_program(fixtures::worked_program_text()); }

// b1 latches when any position's class contains an a (i.e. the word has an a).
const char* kLatchProgram = R"(sigma: a b
for i:=1 to length(A) do
{
  for j:=1 to length(A) do
  {
    if A[i].d = A[j].d then
    {
      if A[j].s = a then b1:=true else skip
    }
    else
      skip
  }
}
)";

// b1 latches when some class holds an a-position i and a b-position j; the
// inner fragments read the owning position's tag.
const char* kPairProgram = R"(sigma: a b
for i:=1 to length(A) do
{
  for j:=1 to length(A) do
  {
    if A[i].d = A[j].d then
    {
      if A[i].s = a then
        { if A[j].s = b then b1:=true else skip }
      else skip
    }
    else
      skip
  }
}
)";

// The else-branch applies a non-idempotent update, so the generated
// condition is not 0-priority and reachability falls back to the interpreter.
const char* kStagedProgram = R"(sigma: a b
for i:=1 to length(A) do
{
  for j:=1 to length(A) do
  {
    if A[i].d = A[j].d then
      skip
    else
    {
      if A[j].s = a then
        { if b1 then b2:=true else b1:=true }
      else skip
    }
  }
}
)";

BooleanState state_of(std::map<std::string, bool> m) { return m; }

} // namespace

TEST_CASE("parser handles the concrete syntax") {
    SUBCASE("skip program") {
        Program p = parse_program("sigma: a\nskip");
        CHECK(p.body->kind == Stmt::Kind::Skip);
    }

    SUBCASE("the worked program parses into the expected shape") {
        Program p = worked_program();
        CHECK(p.bool_vars == std::set<std::string>{"b1", "b2", "b3"});
        CHECK(p.loop_vars == std::set<std::string>{"i", "j"});
        REQUIRE(p.body->kind == Stmt::Kind::For);
        CHECK(p.body->var == "i");
        Nd2Shape shape = is_restricted_nd2(p);
        CHECK(shape.ok);
        CHECK(shape.outer_var == "i");
        CHECK(shape.inner_var == "j");
    }

    SUBCASE("assignment from a tag comparison") {
        Program p = parse_program("sigma: a\nb := A[i].s = a");
        REQUIRE(p.body->kind == Stmt::Kind::BoolAssign);
        CHECK(p.body->bexpr->kind == BoolExpr::Kind::TagEq);
    }

    SUBCASE("errors carry line numbers and category diagnoses") {
        CHECK_THROWS_AS(parse_program("skip"), ParseError);
        CHECK_THROWS_AS(parse_program("sigma: a\nfor p:=1 to length(A) do skip"), ParseError);
        CHECK_THROWS_AS(parse_program("sigma: a\nv1 := i"), ParseError);
        CHECK_THROWS_AS(parse_program("sigma: a\nb1 := A[i].d"), ParseError);
        CHECK_THROWS_AS(parse_program("sigma: a\nxyz := true"), ParseError);
        try {
            parse_program("sigma: a\nskip;\nb1 := tru");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
}

TEST_CASE("interpreter runs the worked program") {
    Program p = worked_program();

    SUBCASE("skip leaves the initial state") {
        Program s = parse_program("sigma: a\nskip");
        ProgramState st = interpret(s, DataWord({"a"}, {5}));
        CHECK(st.booleans.empty());
    }

    SUBCASE("a separated duplicate keeps the scan state") {
        BooleanState fin = final_booleans(p, DataWord({"a", "b", "a"}, {1, 2, 1}));
        CHECK(fin == state_of({{"b1", false}, {"b2", true}, {"b3", false}}));
        CHECK(oracle::separated_duplicates(DataWord({"a", "b", "a"}, {1, 2, 1})));
    }

    SUBCASE("an unseparated duplicate latches the failure flag") {
        BooleanState fin = final_booleans(p, DataWord({"a", "a"}, {1, 1}));
        CHECK(fin == state_of({{"b1", false}, {"b2", false}, {"b3", true}}));
        CHECK(!oracle::separated_duplicates(DataWord({"a", "a"}, {1, 1})));
    }

    SUBCASE("the failure flag agrees with the property on every short array") {
        for (const DataWord& arr : all_canonical_words({"a", "b"}, 4)) {
            BooleanState fin = final_booleans(p, arr);
            bool holds = !fin.at("b3");
            CHECK(holds == oracle::separated_duplicates(arr));
        }
    }

    SUBCASE("results are invariant under data renamings") {
        oracle::Rng rng(23);
        for (int round = 0; round < 80; ++round) {
            DataWord arr = oracle::random_data_word(rng, {"a", "b"}, 4);
            std::map<std::uint64_t, std::uint64_t> bij;
            for (std::uint64_t v : arr.data()) bij.emplace(v, 100 + 13 * bij.size());
            std::vector<std::uint64_t> renamed;
            for (std::uint64_t v : arr.data()) renamed.push_back(bij.at(v));
            CHECK(final_booleans(p, arr) == final_booleans(p, DataWord(arr.tags(), renamed)));
        }
    }
}

TEST_CASE("interpreter handles index and data variables and order tests") {
    Program p = parse_program(R"(sigma: a
for i:=1 to length(A) do
{
  p1 := i;
  v1 := A[p1].d;
  if v1 = A[i].d then b1 := true else skip;
  if i < p1 then b2 := true else skip;
  if v1 < 1 then b3 := true else skip
}
)");
    CHECK(p.index_vars == std::set<std::string>{"p1"});
    CHECK(p.data_vars == std::set<std::string>{"v1"});
    for (const DataWord& arr : all_canonical_words({"a"}, 3)) {
        ProgramState st = interpret(p, arr);
        CHECK(st.booleans.at("b1"));  // v1 always equals A[i].d
        CHECK(!st.booleans.at("b2")); // i < p1 never holds, they are equal
        CHECK(!st.booleans.at("b3")); // canonical values start at 1
        CHECK(st.indexes.at("p1") == arr.length());
        CHECK(st.loops.at("i") == arr.length());
    }
}

TEST_CASE("shape checks accept the worked program and report violations") {
    CHECK(is_restricted_nd2(worked_program()).ok);
    CHECK(is_restricted_nd2(parse_program(kLatchProgram)).ok);
    CHECK(is_restricted_nd2(parse_program(kPairProgram)).ok);

    SUBCASE("data variables are rejected") {
        Program p = parse_program(R"(sigma: a
for i:=1 to length(A) do
{
  for j:=1 to length(A) do
  {
    if A[i].d = A[j].d then
      v1 := A[i].d
    else
      skip
  }
}
)");
        Nd2Shape shape = is_restricted_nd2(p);
        CHECK(!shape.ok);
        REQUIRE(!shape.violations.empty());
        CHECK(shape.violations.front().find("index or data variables") != std::string::npos);
    }

    SUBCASE("order comparisons are rejected") {
        Program p = parse_program(R"(sigma: a
for i:=1 to length(A) do
{
  for j:=1 to length(A) do
  {
    if A[i].d = A[j].d then
      skip
    else
      skip
  };
  b1 := i < j
}
)");
        Nd2Shape shape = is_restricted_nd2(p);
        CHECK(!shape.ok);
        bool mentions_order = false;
        for (const std::string& v : shape.violations)
            if (v.find("order on indices") != std::string::npos) mentions_order = true;
        CHECK(mentions_order);
    }

    SUBCASE("the guard may be written in either direction") {
        Program p = parse_program(R"(sigma: a
for i:=1 to length(A) do
{
  for j:=1 to length(A) do
  {
    if A[j].d = A[i].d then
      b1 := true
    else
      skip
  }
}
)");
        CHECK(is_restricted_nd2(p).ok);
    }

    SUBCASE("the leading fragment may not read the inner position") {
        Program p = parse_program(R"(sigma: a
for i:=1 to length(A) do
{
  b1 := A[j].s = a;
  for j:=1 to length(A) do
  {
    if A[i].d = A[j].d then
      skip
    else
      skip
  }
}
)");
        Nd2Shape shape = is_restricted_nd2(p);
        CHECK(!shape.ok);
        bool mentions = false;
        for (const std::string& v : shape.violations)
            if (v.find("outside the inner loop") != std::string::npos) mentions = true;
        CHECK(mentions);
    }

    SUBCASE("nested loops are rejected") {
        Program p = parse_program(R"(sigma: a
for i:=1 to length(A) do
{
  for j:=1 to length(A) do
  {
    if A[i].d = A[j].d then
      { for j1:=1 to length(A) do skip }
    else
      skip
  }
}
)");
        CHECK(!is_restricted_nd2(p).ok);
    }
}

TEST_CASE("the 0-priority shape check inspects the else-branch") {
    CHECK(is_zero_priority_nd2(worked_program()).ok);
    CHECK(is_zero_priority_nd2(parse_program(kLatchProgram)).ok);  // P3 = skip
    CHECK(is_zero_priority_nd2(parse_program(kPairProgram)).ok);

    SUBCASE("an arm that never flips its guard is rejected") {
        Program p = parse_program(R"(sigma: a b
for i:=1 to length(A) do
{
  for j:=1 to length(A) do
  {
    if A[i].d = A[j].d then
      skip
    else
    {
      if b1 then
        { if A[j].s = a then b2:=true else skip }
      else skip
    }
  }
}
)");
        CHECK(is_restricted_nd2(p).ok);
        ZeroPriorityShape z = is_zero_priority_nd2(p);
        CHECK(!z.ok);
        CHECK(z.reason.find("flips") != std::string::npos);
    }

    SUBCASE("the cascade tag test may put the constant on the left") {
        Program p = parse_program(R"(sigma: a b
for i:=1 to length(A) do
{
  for j:=1 to length(A) do
  {
    if A[i].d = A[j].d then
      skip
    else
    {
      if b1 then
        { if a = A[j].s then b1:=false else skip }
      else skip
    }
  }
}
)");
        CHECK(is_restricted_nd2(p).ok);
        CHECK(is_zero_priority_nd2(p).ok);
    }

    SUBCASE("a guard that is not a literal conjunction is rejected") {
        Program p = parse_program(R"(sigma: a b
for i:=1 to length(A) do
{
  for j:=1 to length(A) do
  {
    if A[i].d = A[j].d then
      skip
    else
    {
      if not (b1 and b2) then
        { if A[j].s = a then b1:=true else skip }
      else skip
    }
  }
}
)");
        CHECK(is_restricted_nd2(p).ok);
        CHECK(!is_zero_priority_nd2(p).ok);
    }
}

TEST_CASE("the generated class automaton matches the interpreter") {
    const std::string worked = fixtures::worked_program_text();
    for (const char* text : {worked.c_str(), kLatchProgram, kPairProgram, kStagedProgram}) {
        Program p = parse_program(text);
        detail::BoolSpace space(p.bool_vars);
        for (std::size_t mask = 0; mask < space.size(); ++mask) {
            BooleanState target = space.to_state(static_cast<std::uint32_t>(mask));
            ClassAutomaton ca = nd2_to_class_automaton(p, target);
            for (const DataWord& arr : all_canonical_words(p.sigma, 3)) {
                bool by_interp = final_booleans(p, arr) == target;
                CHECK(ca_accepts(ca, arr) == by_interp);
            }
        }
    }
}

TEST_CASE("a shaped program with a skip body accepts everything at the initial target") {
    Program p = parse_program(R"(sigma: a b
for i:=1 to length(A) do
{
  for j:=1 to length(A) do
  {
    if A[i].d = A[j].d then
      skip
    else
      skip
  }
}
)");
    ClassAutomaton ca = nd2_to_class_automaton(p, BooleanState{});
    for (const DataWord& arr : all_canonical_words({"a", "b"}, 3)) CHECK(ca_accepts(ca, arr));
}

TEST_CASE("syntactically 0-priority programs yield 0-priority conditions") {
    const std::string worked = fixtures::worked_program_text();
    for (const char* text : {worked.c_str(), kLatchProgram, kPairProgram}) {
        Program p = parse_program(text);
        REQUIRE(is_zero_priority_nd2(p).ok);
        ClassAutomaton ca = nd2_to_class_automaton(p, BooleanState(final_booleans(
                                                      p, DataWord({"a"}, {1}))));
        CHECK(decide_zero_priority(ca.class_condition).is_zero_priority);
    }
}

TEST_CASE("programs ignoring the inner tag produce tag-independent zero moves") {
    Program p = worked_program(); // its P3 reads A[j].s, so it does not apply
    Program latch = parse_program(kLatchProgram);
    ClassAutomaton ca = nd2_to_class_automaton(latch, BooleanState{{"b1", true}});
    const ClassDfa& cond = ca.class_condition;
    std::vector<Tag> gamma;
    std::set<Tag> seen;
    for (const MarkedLetter& l : cond.alphabet)
        if (seen.insert(l.tag).second) gamma.push_back(l.tag);
    for (const State& q : cond.states) {
        std::set<State> targets;
        for (const Tag& g : gamma) targets.insert(cond.step(q, MarkedLetter{g, false}));
        CHECK(targets.size() == 1);
    }
    (void)p;
}

TEST_CASE("bounded reachability matches interpreter enumeration") {
    SUBCASE("worked program, scan-start target") {
        ReachResult r = reachable(worked_program(),
                                  state_of({{"b1", true}, {"b2", false}, {"b3", false}}), 3);
        CHECK(r.restricted);
        CHECK(r.zero_priority_syntax);
        CHECK(r.condition_zero_priority);
        REQUIRE(r.witness);
        CHECK(*r.witness == DataWord({"b"}, {1})); // a single a already moves past the start
    }

    SUBCASE("worked program, failure target") {
        ReachResult r =
            reachable(worked_program(), state_of({{"b1", false}, {"b2", false}, {"b3", true}}), 3);
        REQUIRE(r.witness);
        CHECK(*r.witness == DataWord({"a", "a"}, {1, 1}));
    }

    SUBCASE("latch program goes through the counter machine") {
        Program p = parse_program(kLatchProgram);
        ReachResult r = reachable(p, state_of({{"b1", true}}), 3);
        CHECK(r.path == "pma-explore");
        REQUIRE(r.witness);
        CHECK(*r.witness == DataWord({"a"}, {1}));

        ReachResult miss = reachable(p, state_of({{"b1", false}}), 3);
        REQUIRE(miss.witness);
        CHECK(*miss.witness == DataWord({"b"}, {1}));
    }

    SUBCASE("non-0-priority conditions fall back to the interpreter") {
        Program p = parse_program(kStagedProgram);
        ReachResult r = reachable(p, state_of({{"b1", true}, {"b2", false}}), 3);
        if (!r.condition_zero_priority) CHECK(r.path == "interpreter");
        REQUIRE(r.witness);
        CHECK(final_booleans(p, *r.witness) == state_of({{"b1", true}, {"b2", false}}));
    }

    SUBCASE("every witness replays, every verdict matches plain enumeration") {
        const std::string worked = fixtures::worked_program_text();
        for (const char* text : {worked.c_str(), kLatchProgram, kPairProgram, kStagedProgram}) {
            Program p = parse_program(text);
            detail::BoolSpace space(p.bool_vars);
            for (std::size_t mask = 0; mask < space.size(); ++mask) {
                BooleanState target = space.to_state(static_cast<std::uint32_t>(mask));
                ReachResult r = reachable(p, target, 3);

                std::optional<DataWord> expected;
                for (const DataWord& arr : all_canonical_words(p.sigma, 3))
                    if (final_booleans(p, arr) == target) {
                        expected = arr;
                        break;
                    }
                CHECK(bool(r.witness) == bool(expected));
                if (r.witness && expected) {
                    CHECK(*r.witness == *expected);
                    CHECK(final_booleans(p, *r.witness) == target);
                }
            }
        }
    }

    SUBCASE("non-shaped programs are rejected with a diagnosis") {
        Program p = parse_program("sigma: a\nskip");
        CHECK_THROWS_AS(reachable(p, BooleanState{}, 2), std::invalid_argument);
    }
}
