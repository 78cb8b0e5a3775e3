// data_word.hpp -- data words over a finite tag alphabet, their classes, and
// the marking/restriction operations every automaton semantics consumes.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pca/strings.hpp"

namespace pca {

using Tag = std::string;
using Word = std::vector<Tag>;

/// Positions are 1-based throughout, matching the usual convention for words
/// as functions [n] -> alphabet.
using PositionSet = std::set<std::size_t>;

/// One letter of a marked class word: a tag paired with a 0/1 class mark.
struct MarkedLetter {
    Tag tag;
    bool marked = false;

    auto operator<=>(const MarkedLetter&) const = default;
};

using MarkedWord = std::vector<MarkedLetter>;

inline std::string to_string(const MarkedLetter& l) {
    return "(" + l.tag + "," + (l.marked ? "1" : "0") + ")";
}

/// A nonempty finite word whose positions carry a tag and a data value.
/// Immutable after construction; empty words are rejected because automata
/// semantics are only defined for length >= 1.
class DataWord {
public:
    DataWord(Word tags, std::vector<std::uint64_t> data)
        : tags_(std::move(tags)), data_(std::move(data)) {
        if (tags_.empty())
            throw std::invalid_argument("data word must be nonempty");
        if (tags_.size() != data_.size())
            throw std::invalid_argument("data word: tag and data sequences differ in length");
    }

    std::size_t length() const noexcept { return tags_.size(); }
    const Word& tags() const noexcept { return tags_; }
    const std::vector<std::uint64_t>& data() const noexcept { return data_; }

    /// 1-based position access.
    const Tag& tag_at(std::size_t pos) const { return tags_.at(pos - 1); }
    std::uint64_t datum_at(std::size_t pos) const { return data_.at(pos - 1); }

    bool operator==(const DataWord& other) const = default;

private:
    Word tags_;
    std::vector<std::uint64_t> data_;
};

/// One class of a data word: the positions sharing a data value.
struct ClassBlock {
    std::uint64_t value = 0;
    std::vector<std::size_t> positions; // ascending, 1-based
};

/// Partition of {1..n} into classes, ordered by first occurrence.
struct ClassPartition {
    std::vector<ClassBlock> blocks;

    /// Index (into blocks) of the class containing `pos`, 1-based position.
    std::size_t block_of(std::size_t pos) const {
        for (std::size_t b = 0; b < blocks.size(); ++b)
            for (std::size_t p : blocks[b].positions)
                if (p == pos) return b;
        throw std::out_of_range("position not covered by partition");
    }

    const ClassBlock* block_for_value(std::uint64_t value) const {
        for (const auto& b : blocks)
            if (b.value == value) return &b;
        return nullptr;
    }
};

/// Groups positions by data value; blocks appear in order of first occurrence.
inline ClassPartition classes(const DataWord& dw) {
    ClassPartition part;
    std::map<std::uint64_t, std::size_t> index_of_value;
    for (std::size_t pos = 1; pos <= dw.length(); ++pos) {
        std::uint64_t v = dw.datum_at(pos);
        auto it = index_of_value.find(v);
        if (it == index_of_value.end()) {
            index_of_value.emplace(v, part.blocks.size());
            part.blocks.push_back(ClassBlock{v, {pos}});
        } else {
            part.blocks[it->second].positions.push_back(pos);
        }
    }
    return part;
}

inline void check_positions(const Word& w, const PositionSet& xs) {
    for (std::size_t p : xs)
        if (p == 0 || p > w.size())
            throw std::invalid_argument("position " + std::to_string(p) + " out of range 1.." +
                                        std::to_string(w.size()));
}

/// w (x) X: marks position i with 1 iff i is in X, keeping tags.
inline MarkedWord mark(const Word& w, const PositionSet& xs) {
    check_positions(w, xs);
    MarkedWord out;
    out.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        out.push_back(MarkedLetter{w[i], xs.count(i + 1) > 0});
    return out;
}

/// w | X: the subword of w at the positions in X, in ascending order.
inline Word restrict_word(const Word& w, const PositionSet& xs) {
    check_positions(w, xs);
    Word out;
    out.reserve(xs.size());
    for (std::size_t p : xs) out.push_back(w[p - 1]);
    return out;
}

/// Letter-to-letter-or-erasing projection map; absent value means erase.
using Projection = std::map<Tag, std::optional<Tag>>;

/// Applies prj to the tags of dw, dropping erased letters and the data.
inline Word project(const DataWord& dw, const Projection& prj) {
    Word out;
    for (const Tag& t : dw.tags()) {
        auto it = prj.find(t);
        if (it == prj.end())
            throw std::invalid_argument("projection is not defined on tag '" + t + "'");
        if (it->second) out.push_back(*it->second);
    }
    return out;
}

/// Enumerates one canonical representative per (tag word, class partition)
/// pair for every length in 1..max_len. Data values are assigned by first
/// occurrence: the k-th distinct class of a word gets value k, so partitions
/// range over restricted-growth strings. Order: length ascending, then tag
/// word lexicographic in the given alphabet order, then partition
/// lexicographic.
class DataWordEnumerator {
public:
    DataWordEnumerator(std::vector<Tag> sigma, std::size_t max_len)
        : sigma_(std::move(sigma)), max_len_(max_len) {
        if (sigma_.empty()) throw std::invalid_argument("alphabet must be nonempty");
        if (max_len_ < 1) throw std::invalid_argument("max_len must be at least 1");
    }

    std::optional<DataWord> next() {
        if (done_) return std::nullopt;
        if (len_ == 0) {
            len_ = 1;
            start_length();
        }
        DataWord result = current();
        advance();
        return result;
    }

private:
    void start_length() {
        tag_idx_.assign(len_, 0);
        rgs_.assign(len_, 1); // first-occurrence numbering starts at 1
    }

    DataWord current() const {
        Word tags;
        tags.reserve(len_);
        for (std::size_t i : tag_idx_) tags.push_back(sigma_[i]);
        return DataWord(tags, rgs_);
    }

    // Restricted-growth successor: rgs_[i] may rise to max(prefix) + 1.
    bool advance_rgs() {
        for (std::size_t i = len_; i-- > 1;) {
            std::uint64_t prefix_max = 0;
            for (std::size_t j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs_[j]);
            if (rgs_[i] <= prefix_max) {
                ++rgs_[i];
                for (std::size_t j = i + 1; j < len_; ++j) rgs_[j] = 1;
                return true;
            }
        }
        return false;
    }

    bool advance_tags() {
        for (std::size_t i = len_; i-- > 0;) {
            if (tag_idx_[i] + 1 < sigma_.size()) {
                ++tag_idx_[i];
                for (std::size_t j = i + 1; j < len_; ++j) tag_idx_[j] = 0;
                return true;
            }
        }
        return false;
    }

    void advance() {
        if (advance_rgs()) return;
        rgs_.assign(len_, 1);
        if (advance_tags()) return;
        if (len_ < max_len_) {
            ++len_;
            start_length();
        } else {
            done_ = true;
        }
    }

    std::vector<Tag> sigma_;
    std::size_t max_len_;
    std::size_t len_ = 0;
    std::vector<std::size_t> tag_idx_;
    std::vector<std::uint64_t> rgs_;
    bool done_ = false;
};

/// Eager form of the canonical enumeration, for tests and bounded search.
inline std::vector<DataWord> all_canonical_words(const std::vector<Tag>& sigma, std::size_t max_len) {
    std::vector<DataWord> out;
    DataWordEnumerator en(sigma, max_len);
    while (auto dw = en.next()) out.push_back(std::move(*dw));
    return out;
}

// --- text format -----------------------------------------------------------
//
// One word per line, letters as `tag:value` separated by spaces:
//   a:1 b:2 c:1

inline DataWord parse_data_word(const std::string& line, std::size_t line_no = 0) {
    Word tags;
    std::vector<std::uint64_t> data;
    for (const std::string& token : split_ws(line)) {
        auto colon = token.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
            throw ParseError("malformed letter '" + token + "', expected tag:value", line_no);
        tags.push_back(token.substr(0, colon));
        data.push_back(parse_nat(token.substr(colon + 1), line_no));
    }
    if (tags.empty()) throw ParseError("empty data word", line_no);
    return DataWord(std::move(tags), std::move(data));
}

inline std::string format_data_word(const DataWord& dw) {
    std::vector<std::string> letters;
    letters.reserve(dw.length());
    for (std::size_t i = 0; i < dw.length(); ++i)
        letters.push_back(dw.tags()[i] + ":" + std::to_string(dw.data()[i]));
    return join(letters, " ");
}

} // namespace pca
