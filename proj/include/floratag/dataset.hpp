// SPDX-License-Identifier: Apache-2.0
#pragma once

// Datasets of IOB-labeled sentences: balancing, seeded splitting and
// the CoNLL-style TSV serialization (one "token<TAB>tag" per line,
// blank line between sentences). The file holds tokens and tags only;
// language and split label travel as reader arguments.

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "floratag/errors.hpp"
#include "floratag/iob.hpp"
#include "floratag/lexicon.hpp"
#include "floratag/rng.hpp"

namespace floratag {

struct Dataset {
    std::vector<LabeledSentence> sentences;
    std::string language = "en";
    std::optional<std::string> split_label; // "train" | "test"

    bool operator==(const Dataset& other) const = default;
};

inline bool has_name(const LabeledSentence& s) {
    return std::any_of(s.tags.begin(), s.tags.end(), [](Tag t) { return t == Tag::B; });
}

// Keeps every sentence containing a B tag; removes all-O sentences by
// seeded sampling until count(all-O) <= ratio * count(with-B).
// Survivor order is preserved.
inline Dataset balance(const Dataset& d, double max_all_o_ratio, std::uint64_t seed = 42) {
    if (max_all_o_ratio < 0.0) throw UsageError("balance: max_all_o_ratio must be >= 0");
    std::vector<std::size_t> all_o_positions;
    std::size_t with_b = 0;
    for (std::size_t i = 0; i < d.sentences.size(); ++i) {
        if (has_name(d.sentences[i])) ++with_b;
        else all_o_positions.push_back(i);
    }
    const double budget = max_all_o_ratio * static_cast<double>(with_b);
    std::size_t keep = all_o_positions.size();
    if (static_cast<double>(keep) > budget) {
        keep = static_cast<std::size_t>(std::floor(budget + 1e-9));
    }
    if (keep >= all_o_positions.size()) return d;

    Rng rng(seed);
    const auto chosen = rng.sample_indices(all_o_positions.size(), keep);
    std::vector<bool> keep_all_o(d.sentences.size(), false);
    for (auto idx : chosen) keep_all_o[all_o_positions[idx]] = true;

    Dataset out;
    out.language = d.language;
    out.split_label = d.split_label;
    for (std::size_t i = 0; i < d.sentences.size(); ++i) {
        if (has_name(d.sentences[i]) || keep_all_o[i]) out.sentences.push_back(d.sentences[i]);
    }
    return out;
}

// Seeded shuffle then exact-size partition into (train, test).
inline std::pair<Dataset, Dataset> shuffle_split(const Dataset& d, std::size_t train_n,
                                                 std::size_t test_n, std::uint64_t seed) {
    if (train_n + test_n != d.sentences.size()) {
        throw UsageError("shuffle_split: train_n + test_n = " + std::to_string(train_n + test_n) +
                         " but dataset has " + std::to_string(d.sentences.size()) + " sentences");
    }
    std::vector<std::size_t> order(d.sentences.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    Dataset train;
    train.language = d.language;
    train.split_label = "train";
    Dataset test;
    test.language = d.language;
    test.split_label = "test";
    for (std::size_t i = 0; i < train_n; ++i) train.sentences.push_back(d.sentences[order[i]]);
    for (std::size_t i = train_n; i < order.size(); ++i) test.sentences.push_back(d.sentences[order[i]]);
    return {std::move(train), std::move(test)};
}

inline void write_conll(const Dataset& d, std::ostream& out) {
    bool first = true;
    for (const auto& s : d.sentences) {
        if (s.tokens.empty() || s.tokens.size() != s.tags.size()) {
            throw DataError("write_conll: sentence with " + std::to_string(s.tokens.size()) +
                            " tokens and " + std::to_string(s.tags.size()) + " tags");
        }
        if (!first) out << '\n';
        first = false;
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            const auto& tok = s.tokens[i];
            if (tok.empty() || tok.find_first_of("\t\n\r") != std::string::npos) {
                throw DataError("write_conll: token not writable: \"" + tok + "\"");
            }
            out << tok << '\t' << tag_char(s.tags[i]) << '\n';
        }
    }
}

inline Dataset read_conll(std::istream& in, std::string language = "en",
                          std::optional<std::string> split_label = std::nullopt) {
    Dataset d;
    d.language = std::move(language);
    d.split_label = std::move(split_label);
    LabeledSentence current;
    std::string line;
    std::size_t lineno = 0;
    auto flush = [&] {
        if (!current.tokens.empty()) {
            d.sentences.push_back(std::move(current));
            current = {};
        }
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError("line " + std::to_string(lineno) + ": missing tab separator");
        }
        const std::string token = line.substr(0, tab);
        const std::string tag_str = line.substr(tab + 1);
        if (token.empty()) {
            throw DataError("line " + std::to_string(lineno) + ": empty token");
        }
        Tag tag;
        if (!parse_tag(tag_str, tag)) {
            throw DataError("line " + std::to_string(lineno) + ": unknown tag \"" + tag_str + "\"");
        }
        current.tokens.push_back(token);
        current.tags.push_back(tag);
    }
    flush();
    return d;
}

} // namespace floratag
