// SPDX-License-Identifier: Apache-2.0
#pragma once

// Prompt construction and normalization of free-text LLM answers into
// name lists. The model is asked yes/no plus the names; answers are
// parsed with layered rules (quoted segments, then is/are clauses,
// then the list after "yes") and every candidate must actually occur
// in the sentence or it is dropped and counted.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "floratag/errors.hpp"
#include "floratag/text.hpp"

namespace floratag {

inline constexpr std::string_view kPromptTemplate =
    "Is there a metaphoric flower name or metaphoric plant name included in the "
    "following sentence, say yes or no, if yes what is the metaphoric flower or "
    "metaphoric plant names in the sentence separately";

struct PromptRequest {
    std::string sentence;
    std::string model_name = "gpt-3.5-turbo";
    double temperature = 0.0;
    std::size_t max_retries = 3; // total attempts per sentence

    void validate() const {
        if (trim(sentence).empty()) throw UsageError("PromptRequest: sentence is empty");
        if (temperature < 0.0) throw UsageError("PromptRequest: temperature must be >= 0");
    }
};

inline std::string build_prompt(const std::string& sentence) {
    if (trim(sentence).empty()) throw UsageError("build_prompt: sentence is empty");
    return std::string(kPromptTemplate) + " : " + sentence;
}

struct ExtractionResult {
    bool has_metaphor = false;
    std::vector<std::string> names;         // deduplicated, first-appearance order
    std::string raw_response;
    std::vector<std::string> dropped_names; // candidates not occurring in the sentence
};

// Raised when a response matches neither the "no" nor the "yes" shape.
struct ParseFailure : DataError {
    explicit ParseFailure(std::string raw)
        : DataError("unparseable LLM response: \"" + raw + "\""), raw_response(std::move(raw)) {}
    std::string raw_response;
};

namespace llm_detail {

inline bool is_alpha_byte(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0 ||
           static_cast<unsigned char>(c) >= 0x80;
}

inline std::string first_word(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && !is_alpha_byte(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && is_alpha_byte(s[j])) ++j;
    return std::string(s.substr(i, j - i));
}

inline bool contains_word(std::string_view folded, std::string_view word) {
    std::size_t pos = 0;
    while ((pos = folded.find(word, pos)) != std::string_view::npos) {
        const bool left_ok = pos == 0 || !is_alpha_byte(folded[pos - 1]);
        const std::size_t end = pos + word.size();
        const bool right_ok = end == folded.size() || !is_alpha_byte(folded[end]);
        if (left_ok && right_ok) return true;
        pos += 1;
    }
    return false;
}

inline std::size_t find_word(std::string_view folded, std::string_view word, std::size_t from = 0) {
    std::size_t pos = from;
    while ((pos = folded.find(word, pos)) != std::string_view::npos) {
        const bool left_ok = pos == 0 || !is_alpha_byte(folded[pos - 1]);
        const std::size_t end = pos + word.size();
        const bool right_ok = end == folded.size() || !is_alpha_byte(folded[end]);
        if (left_ok && right_ok) return pos;
        pos += 1;
    }
    return std::string::npos;
}

// Segments between quote pairs. Straight quotes and U+2018/U+2019 only
// delimit at word boundaries so apostrophes ("lion's") stay intact.
inline std::vector<std::string> quoted_segments(std::string_view s) {
    std::vector<std::string> out;
    struct Delim {
        std::string_view open, close;
        bool boundary_sensitive;
    };
    static const Delim kDelims[] = {
        {"\"", "\"", false},
        {"“", "”", false},
        {"'", "'", true},
        {"‘", "’", true},
    };
    for (const auto& d : kDelims) {
        std::size_t pos = 0;
        while (pos < s.size()) {
            std::size_t open = s.find(d.open, pos);
            bool found_open = false;
            while (open != std::string_view::npos) {
                const bool left_ok = open == 0 || !is_alpha_byte(s[open - 1]);
                if (!d.boundary_sensitive || left_ok) {
                    found_open = true;
                    break;
                }
                open = s.find(d.open, open + 1);
            }
            if (!found_open) break;
            std::size_t close = open + d.open.size();
            bool found_close = false;
            while (close != std::string_view::npos) {
                close = s.find(d.close, close);
                if (close == std::string_view::npos) break;
                const std::size_t after = close + d.close.size();
                const bool right_ok = after >= s.size() || !is_alpha_byte(s[after]);
                if (!d.boundary_sensitive || right_ok) {
                    found_close = true;
                    break;
                }
                ++close;
            }
            if (!found_close) break;
            const auto seg = s.substr(open + d.open.size(), close - open - d.open.size());
            if (!trim(seg).empty()) out.emplace_back(trim(seg));
            pos = close + d.close.size();
        }
    }
    return out;
}

inline std::vector<std::string> split_list(std::string_view s, std::string_view folded) {
    // splits on commas, semicolons and the words "and"/"y"
    std::vector<std::string> parts;
    std::size_t start = 0;
    auto flush = [&](std::size_t end) {
        if (end > start) parts.emplace_back(trim(s.substr(start, end - start)));
    };
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == ',' || s[i] == ';') {
            flush(i);
            start = i + 1;
            ++i;
            continue;
        }
        if (is_alpha_byte(folded[i]) && (i == 0 || !is_alpha_byte(folded[i - 1]))) {
            for (std::string_view conj : {std::string_view("and"), std::string_view("y")}) {
                if (folded.compare(i, conj.size(), conj) == 0 &&
                    (i + conj.size() == folded.size() || !is_alpha_byte(folded[i + conj.size()]))) {
                    flush(i);
                    start = i + conj.size();
                    i += conj.size();
                    break;
                }
            }
        }
        ++i;
    }
    flush(s.size());
    std::vector<std::string> cleaned;
    for (auto& p : parts) {
        if (!p.empty()) cleaned.push_back(std::move(p));
    }
    return cleaned;
}

inline std::string clean_candidate(std::string_view s) {
    std::vector<std::string> kept;
    for (const auto& t : split_whitespace(s)) {
        auto stripped = strip_punct(t);
        if (!stripped.empty()) kept.push_back(std::move(stripped));
    }
    return join_tokens(kept);
}

inline std::optional<std::string> without_leading_article(const std::string& candidate) {
    static const char* kArticles[] = {"the", "a", "an", "el", "la", "los", "las", "un", "una"};
    const auto toks = split_whitespace(candidate);
    if (toks.size() < 2) return std::nullopt;
    const std::string head = casefold(toks.front());
    for (const char* art : kArticles) {
        if (head == art) {
            return join_tokens({toks.begin() + 1, toks.end()});
        }
    }
    return std::nullopt;
}

// Contiguous occurrence of the candidate's normalized tokens within
// the sentence's normalized tokens.
inline bool occurs_in(const std::vector<std::string>& norm_sentence, const std::string& candidate) {
    std::vector<std::string> pieces;
    for (const auto& t : split_whitespace(candidate)) {
        const auto n = normalize_token(t);
        if (n.empty()) return false;
        pieces.push_back(n);
    }
    if (pieces.empty() || pieces.size() > norm_sentence.size()) return false;
    for (std::size_t start = 0; start + pieces.size() <= norm_sentence.size(); ++start) {
        bool hit = true;
        for (std::size_t k = 0; k < pieces.size() && hit; ++k) {
            hit = norm_sentence[start + k] == pieces[k];
        }
        if (hit) return true;
    }
    return false;
}

} // namespace llm_detail

// Normalizes a free-text answer. Leading "no" (punctuation allowed)
// means no metaphor; a "yes" anywhere triggers name extraction; any
// other shape is a ParseFailure the caller may retry.
inline ExtractionResult parse_response(const std::string& raw, const std::string& sentence) {
    using namespace llm_detail;
    ExtractionResult result;
    result.raw_response = raw;

    const std::string trimmed = trim(raw);
    const std::string folded = casefold(trimmed);
    const std::string lead = casefold(first_word(trimmed));
    if (lead == "no") {
        result.has_metaphor = false;
        return result;
    }
    if (!contains_word(folded, "yes")) throw ParseFailure(raw);
    result.has_metaphor = true;

    // Tier 1: quoted names. Tier 2: is/are clauses. Tier 3: the list
    // following "yes". Later tiers apply only when earlier ones are empty.
    std::vector<std::string> candidates = quoted_segments(trimmed);
    if (candidates.empty()) {
        for (std::string_view verb : {std::string_view("is"), std::string_view("are"),
                                      std::string_view("es"), std::string_view("son")}) {
            std::size_t pos = 0;
            while ((pos = find_word(folded, verb, pos)) != std::string::npos) {
                std::size_t start = pos + verb.size();
                std::size_t end = trimmed.find_first_of(".?!;:\n", start);
                if (end == std::string::npos) end = trimmed.size();
                const auto clause = std::string_view(trimmed).substr(start, end - start);
                for (auto& part : split_list(clause, std::string_view(folded).substr(start, end - start))) {
                    candidates.push_back(part);
                }
                pos = end;
            }
        }
    }
    if (candidates.empty()) {
        const std::size_t yes_pos = find_word(folded, "yes");
        std::size_t start = yes_pos + 3;
        while (start < trimmed.size() && !is_alpha_byte(trimmed[start])) ++start;
        std::size_t end = trimmed.find_first_of(".?!;\n", start);
        if (end == std::string::npos) end = trimmed.size();
        if (start < end) {
            const auto rest = std::string_view(trimmed).substr(start, end - start);
            for (auto& part : split_list(rest, std::string_view(folded).substr(start, end - start))) {
                candidates.push_back(part);
            }
        }
    }

    std::vector<std::string> norm_sentence;
    for (const auto& t : split_whitespace(sentence)) norm_sentence.push_back(normalize_token(t));

    std::vector<std::string> seen_keys;
    auto already_listed = [&](const std::string& key) {
        for (const auto& k : seen_keys) {
            if (k == key) return true;
        }
        return false;
    };
    for (const auto& rough : candidates) {
        std::string name = clean_candidate(rough);
        if (name.empty()) continue;
        if (!occurs_in(norm_sentence, name)) {
            // second chance without a leading article ("the Red powder puff")
            const auto stripped = without_leading_article(name);
            if (stripped && occurs_in(norm_sentence, *stripped)) {
                name = *stripped;
            } else {
                const std::string key = casefold(name);
                if (!already_listed(key)) {
                    seen_keys.push_back(key);
                    result.dropped_names.push_back(name);
                }
                continue;
            }
        }
        const std::string key = casefold(name);
        if (already_listed(key)) continue;
        seen_keys.push_back(key);
        result.names.push_back(name);
    }
    return result;
}

} // namespace floratag
