#include <doctest.h>

#include <map>
#include <set>

#include "oracles.hpp"
#include "pca/data_word.hpp"

using namespace pca;

TEST_CASE("classes group positions by data value in first-occurrence order") {
    DataWord dw({"a", "b", "c"}, {0, 1, 0});
    ClassPartition part = classes(dw);
    REQUIRE(part.blocks.size() == 2);
    CHECK(part.blocks[0].value == 0);
    CHECK(part.blocks[0].positions == std::vector<std::size_t>{1, 3});
    CHECK(part.blocks[1].positions == std::vector<std::size_t>{2});

    CHECK(classes(DataWord({"a"}, {7})).blocks.size() == 1);

    ClassPartition constant = classes(DataWord({"a", "a", "a"}, {1, 1, 1}));
    REQUIRE(constant.blocks.size() == 1);
    CHECK(constant.blocks[0].positions == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("data words reject malformed construction") {
    CHECK_THROWS_AS(DataWord({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(DataWord({"a"}, {1, 2}), std::invalid_argument);
}

TEST_CASE("mark pairs tags with class membership bits") {
    Word w{"a", "b", "c"};
    MarkedWord marked = mark(w, {1, 3});
    REQUIRE(marked.size() == 3);
    CHECK(marked[0] == MarkedLetter{"a", true});
    CHECK(marked[1] == MarkedLetter{"b", false});
    CHECK(marked[2] == MarkedLetter{"c", true});

    CHECK(mark(w, {}) == MarkedWord{{"a", false}, {"b", false}, {"c", false}});
    CHECK(mark({"a", "b"}, {1, 2}) == MarkedWord{{"a", true}, {"b", true}});
    CHECK_THROWS_AS(mark(w, {4}), std::invalid_argument);
}

TEST_CASE("restrict_word keeps the selected positions in order") {
    Word w{"a", "b", "c"};
    CHECK(restrict_word(w, {1, 3}) == Word{"a", "c"});
    CHECK(restrict_word(w, {1, 2, 3}) == w);
    CHECK(restrict_word(w, {}) == Word{});
    CHECK_THROWS_AS(restrict_word(w, {0}), std::invalid_argument);
}

TEST_CASE("project maps tags and drops erased letters") {
    DataWord dw({"a", "b"}, {1, 2});
    Projection id{{"a", Tag("a")}, {"b", Tag("b")}};
    CHECK(project(dw, id) == Word{"a", "b"});

    Projection erase_a{{"a", std::nullopt}, {"b", Tag("b")}};
    CHECK(project(dw, erase_a) == Word{"b"});

    DataWord dw2({"a", "a", "b"}, {1, 3, 1});
    Projection constant{{"a", Tag("c")}, {"b", Tag("c")}};
    CHECK(project(dw2, constant) == Word{"c", "c", "c"});

    CHECK_THROWS_AS(project(dw, Projection{{"a", Tag("a")}}), std::invalid_argument);
}

namespace {

// Bell numbers by the triangle recurrence; independent of the enumerator.
std::vector<std::uint64_t> bell_numbers(std::size_t n) {
    std::vector<std::uint64_t> bell{1};
    std::vector<std::uint64_t> row{1};
    for (std::size_t i = 1; i <= n; ++i) {
        std::vector<std::uint64_t> next{row.back()};
        for (std::uint64_t v : row) next.push_back(next.back() + v);
        row = std::move(next);
        bell.push_back(row.front());
    }
    return bell;
}

std::uint64_t expected_word_count(std::size_t sigma, std::size_t max_len) {
    auto bell = bell_numbers(max_len);
    std::uint64_t total = 0, power = 1;
    for (std::size_t n = 1; n <= max_len; ++n) {
        power *= sigma;
        total += power * bell[n];
    }
    return total;
}

} // namespace

TEST_CASE("canonical enumeration order and counts") {
    DataWordEnumerator en({"a"}, 2);
    auto w1 = en.next();
    REQUIRE(w1);
    CHECK(*w1 == DataWord({"a"}, {1}));
    auto w2 = en.next();
    REQUIRE(w2);
    CHECK(*w2 == DataWord({"a", "a"}, {1, 1}));
    auto w3 = en.next();
    REQUIRE(w3);
    CHECK(*w3 == DataWord({"a", "a"}, {1, 2}));
    CHECK(!en.next());

    CHECK(all_canonical_words({"a"}, 1).size() == 1);
    CHECK(all_canonical_words({"a", "b"}, 2).size() == expected_word_count(2, 2));
    CHECK(all_canonical_words({"a", "b"}, 4).size() == expected_word_count(2, 4));
    CHECK(all_canonical_words({"a", "b", "c"}, 3).size() == expected_word_count(3, 3));
}

TEST_CASE("enumeration yields distinct (tags, partition) pairs covering blocks") {
    auto words = all_canonical_words({"a", "b"}, 3);
    std::set<std::pair<Word, std::vector<std::vector<std::size_t>>>> seen;
    for (const DataWord& dw : words) {
        ClassPartition part = classes(dw);
        // Blocks are disjoint and cover all positions.
        std::set<std::size_t> covered;
        std::vector<std::vector<std::size_t>> shape;
        for (const ClassBlock& b : part.blocks) {
            CHECK(!b.positions.empty());
            for (std::size_t p : b.positions) CHECK(covered.insert(p).second);
            shape.push_back(b.positions);
        }
        CHECK(covered.size() == dw.length());
        CHECK(seen.insert({dw.tags(), shape}).second); // no duplicates
    }
}

TEST_CASE("class partitions are invariant under data renaming") {
    oracle::Rng rng(20240811);
    for (int round = 0; round < 200; ++round) {
        DataWord dw = oracle::random_data_word(rng, {"a", "b"}, 5);
        std::map<std::uint64_t, std::uint64_t> bijection;
        for (std::uint64_t v : dw.data())
            bijection.emplace(v, 1000 + 7 * bijection.size());
        std::vector<std::uint64_t> renamed;
        for (std::uint64_t v : dw.data()) renamed.push_back(bijection.at(v));
        DataWord dw2(dw.tags(), renamed);

        ClassPartition p1 = classes(dw);
        ClassPartition p2 = classes(dw2);
        REQUIRE(p1.blocks.size() == p2.blocks.size());
        for (std::size_t i = 0; i < p1.blocks.size(); ++i)
            CHECK(p1.blocks[i].positions == p2.blocks[i].positions);
    }
}

TEST_CASE("mark recovers the word and the marked set") {
    oracle::Rng rng(7);
    for (int round = 0; round < 100; ++round) {
        DataWord dw = oracle::random_data_word(rng, {"a", "b", "c"}, 5);
        PositionSet xs;
        for (std::size_t p = 1; p <= dw.length(); ++p)
            if (oracle::coin(rng)) xs.insert(p);
        MarkedWord mw = mark(dw.tags(), xs);
        PositionSet recovered;
        for (std::size_t i = 0; i < mw.size(); ++i) {
            CHECK(mw[i].tag == dw.tags()[i]);
            if (mw[i].marked) recovered.insert(i + 1);
        }
        CHECK(recovered == xs);
    }
}

TEST_CASE("data-word text format round-trips and reports bad tokens") {
    DataWord dw = parse_data_word("a:1 b:2 c:1");
    CHECK(dw == DataWord({"a", "b", "c"}, {1, 2, 1}));
    CHECK(parse_data_word(format_data_word(dw)) == dw);

    CHECK_THROWS_AS(parse_data_word("a:1 b", 3), ParseError);
    CHECK_THROWS_AS(parse_data_word("a:x", 1), ParseError);
    CHECK_THROWS_AS(parse_data_word(":1", 1), ParseError);
    CHECK_THROWS_AS(parse_data_word("", 1), ParseError);
    try {
        parse_data_word("a:1 :2", 5);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
    }
}
