// SPDX-License-Identifier: Apache-2.0
#pragma once

// IOB tag scheme over word tokens: B marks the first token of a
// metaphoric name, I its continuation, O everything else.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "floratag/errors.hpp"
#include "floratag/text.hpp"

namespace floratag {

// Numeric values double as classifier label ids; they must stay fixed
// across training and prediction.
enum class Tag : std::uint8_t { O = 0, B = 1, I = 2 };

inline constexpr std::size_t kNumTags = 3;

inline char tag_char(Tag t) {
    switch (t) {
        case Tag::O: return 'O';
        case Tag::B: return 'B';
        case Tag::I: return 'I';
    }
    return '?';
}

inline bool parse_tag(std::string_view s, Tag& out) {
    if (s == "O") { out = Tag::O; return true; }
    if (s == "B") { out = Tag::B; return true; }
    if (s == "I") { out = Tag::I; return true; }
    return false;
}

struct LabeledSentence {
    std::vector<std::string> tokens;
    std::vector<Tag> tags;

    bool operator==(const LabeledSentence& other) const = default;
};

// Indices where an I starts a sentence or follows an O. Empty result
// means the sequence is IOB-valid.
inline std::vector<std::size_t> validate_iob(const std::vector<Tag>& tags) {
    std::vector<std::size_t> violations;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (tags[i] != Tag::I) continue;
        if (i == 0 || tags[i - 1] == Tag::O) violations.push_back(i);
    }
    return violations;
}

inline std::vector<std::size_t> validate_iob(const LabeledSentence& s) {
    if (s.tokens.size() != s.tags.size()) {
        throw DataError("validate_iob: " + std::to_string(s.tokens.size()) +
                        " tokens vs " + std::to_string(s.tags.size()) + " tags");
    }
    return validate_iob(s.tags);
}

// Turns every violating I into a B; idempotent, valid input unchanged.
inline std::vector<Tag> repair_iob(std::vector<Tag> tags) {
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (tags[i] != Tag::I) continue;
        if (i == 0 || tags[i - 1] == Tag::O) tags[i] = Tag::B;
    }
    return tags;
}

inline LabeledSentence repair_iob(LabeledSentence s) {
    if (s.tokens.size() != s.tags.size()) {
        throw DataError("repair_iob: " + std::to_string(s.tokens.size()) +
                        " tokens vs " + std::to_string(s.tags.size()) + " tags");
    }
    s.tags = repair_iob(std::move(s.tags));
    return s;
}

struct Span {
    std::size_t begin = 0;  // first token index
    std::size_t end = 0;    // last token index (inclusive)
    std::string surface;    // tokens joined by single spaces

    bool operator==(const Span& other) const = default;
};

// One span per maximal B I* run, sorted by start position.
// Input must be IOB-valid.
inline std::vector<Span> extract_spans(const LabeledSentence& s) {
    if (!validate_iob(s).empty()) {
        throw DataError("extract_spans: sequence is not IOB-valid");
    }
    std::vector<Span> spans;
    for (std::size_t i = 0; i < s.tags.size(); ++i) {
        if (s.tags[i] != Tag::B) continue;
        std::size_t j = i;
        while (j + 1 < s.tags.size() && s.tags[j + 1] == Tag::I) ++j;
        Span span;
        span.begin = i;
        span.end = j;
        span.surface = join_tokens({s.tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                    s.tokens.begin() + static_cast<std::ptrdiff_t>(j) + 1});
        spans.push_back(std::move(span));
        i = j;
    }
    return spans;
}

} // namespace floratag
