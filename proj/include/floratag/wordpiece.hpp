// SPDX-License-Identifier: Apache-2.0
#pragma once

// Subword vocabulary and greedy longest-match-first tokenizer with
// "##" continuation pieces. The vocabulary is built from a corpus:
// special tokens, every seen character (so any word can be segmented),
// then the most frequent whole words up to the size budget.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "floratag/errors.hpp"
#include "floratag/text.hpp"

namespace floratag {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kClsId = 2;
inline constexpr int kSepId = 3;
inline constexpr int kMaskId = 4;

class Vocab {
public:
    Vocab() = default;

    explicit Vocab(std::vector<std::string> pieces) : pieces_(std::move(pieces)) {
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            if (pieces_[i].empty()) throw DataError("vocab piece " + std::to_string(i) + " is empty");
            if (!ids_.emplace(pieces_[i], static_cast<int>(i)).second) {
                throw DataError("duplicate vocab piece \"" + pieces_[i] + "\"");
            }
        }
        static const char* kSpecials[] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
        for (int i = 0; i < 5; ++i) {
            if (static_cast<std::size_t>(i) >= pieces_.size() || pieces_[i] != kSpecials[i]) {
                throw DataError("vocab must start with [PAD] [UNK] [CLS] [SEP] [MASK]");
            }
        }
    }

    std::size_t size() const { return pieces_.size(); }
    const std::string& piece(int id) const { return pieces_.at(static_cast<std::size_t>(id)); }

    int id_of(std::string_view piece) const {
        const auto it = ids_.find(std::string(piece));
        return it == ids_.end() ? -1 : it->second;
    }

    const std::vector<std::string>& pieces() const { return pieces_; }

private:
    std::vector<std::string> pieces_;
    std::unordered_map<std::string, int> ids_;
};

inline Vocab build_vocab(const std::vector<std::string>& texts, std::size_t max_size,
                         bool lowercase) {
    std::map<std::string, std::size_t> word_counts;
    std::map<std::string, std::size_t> char_counts; // codepoint -> count
    for (const auto& text : texts) {
        for (const auto& raw : split_whitespace(text)) {
            const std::string word = lowercase ? casefold(raw) : raw;
            ++word_counts[word];
            for (const auto& cp : utf8::codepoints(word)) ++char_counts[cp];
        }
    }
    std::vector<std::string> pieces = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
    // every seen character, as word-initial and continuation piece
    for (const auto& [cp, n] : char_counts) {
        (void)n;
        pieces.push_back(cp);
        pieces.push_back("##" + cp);
    }
    // frequent whole words fill the rest of the budget
    std::vector<std::pair<std::string, std::size_t>> by_freq(word_counts.begin(), word_counts.end());
    std::sort(by_freq.begin(), by_freq.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::unordered_map<std::string, bool> have;
    for (const auto& p : pieces) have[p] = true;
    for (const auto& [word, n] : by_freq) {
        (void)n;
        if (pieces.size() >= max_size) break;
        if (utf8::codepoints(word).size() < 2) continue; // single chars already present
        if (!have.emplace(word, true).second) continue;
        pieces.push_back(word);
    }
    return Vocab(std::move(pieces));
}

inline Vocab read_vocab(std::istream& in) {
    std::vector<std::string> pieces;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) pieces.push_back(line);
    }
    return Vocab(std::move(pieces));
}

inline void write_vocab(const Vocab& vocab, std::ostream& out) {
    for (const auto& p : vocab.pieces()) out << p << '\n';
}

// Greedy longest-match segmentation of one word. Words with an
// unknown character become a single [UNK].
inline std::vector<int> wordpiece_tokenize(const Vocab& vocab, std::string_view word,
                                           std::size_t max_chars = 100) {
    const auto cps = utf8::codepoints(word);
    if (cps.empty() || cps.size() > max_chars) return {kUnkId};
    std::vector<int> ids;
    std::size_t start = 0;
    while (start < cps.size()) {
        std::size_t end = cps.size();
        int found = -1;
        while (end > start) {
            std::string candidate = start > 0 ? "##" : "";
            for (std::size_t i = start; i < end; ++i) candidate += cps[i];
            found = vocab.id_of(candidate);
            if (found >= 0) break;
            --end;
        }
        if (found < 0) return {kUnkId};
        ids.push_back(found);
        start = end;
    }
    return ids;
}

struct EncodedSentence {
    std::vector<int> ids;                         // [CLS] pieces... [SEP]
    std::vector<std::size_t> subword_counts;      // per word, truncated words excluded
    std::size_t n_words_encoded = 0;              // words that fit before truncation
    bool truncated = false;
};

// Encodes words into [CLS] subwords [SEP], dropping whole words that
// would overflow max_len.
inline EncodedSentence encode_words(const Vocab& vocab, const std::vector<std::string>& words,
                                    std::size_t max_len, bool lowercase) {
    EncodedSentence enc;
    enc.ids.push_back(kClsId);
    for (const auto& raw : words) {
        const std::string word = lowercase ? casefold(raw) : raw;
        const auto piece_ids = wordpiece_tokenize(vocab, word);
        if (enc.ids.size() + piece_ids.size() + 1 > max_len) {
            enc.truncated = true;
            break;
        }
        enc.subword_counts.push_back(piece_ids.size());
        enc.ids.insert(enc.ids.end(), piece_ids.begin(), piece_ids.end());
        ++enc.n_words_encoded;
    }
    enc.ids.push_back(kSepId);
    return enc;
}

} // namespace floratag
