// SPDX-License-Identifier: Apache-2.0
#pragma once

// Token-sequence matching against normalized patterns, shared between
// lexicon label projection and LLM span regeneration. Comparison is
// case-insensitive with token edges stripped of punctuation, so
// "(Red" matches the pattern token "red". Overlaps are resolved
// longest-match-first, then leftmost-first.

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "floratag/errors.hpp"
#include "floratag/iob.hpp"
#include "floratag/lexicon.hpp"
#include "floratag/text.hpp"

namespace floratag {

struct TokenMatch {
    std::size_t begin = 0;      // token index
    std::size_t length = 0;     // span length in tokens
    std::size_t pattern_id = 0; // which pattern matched
};

namespace detail {

inline std::vector<std::string> normalize_tokens(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(normalize_token(t));
    return out;
}

// All occurrences of every pattern, then a greedy non-overlapping
// selection ordered by descending length and ascending start.
inline std::vector<TokenMatch> resolve_matches(
    const std::vector<std::string>& norm_tokens,
    const std::vector<std::vector<std::string>>& patterns) {
    std::vector<TokenMatch> candidates;
    for (std::size_t pid = 0; pid < patterns.size(); ++pid) {
        const auto& pat = patterns[pid];
        if (pat.empty() || pat.size() > norm_tokens.size()) continue;
        bool degenerate = false;
        for (const auto& p : pat) degenerate = degenerate || p.empty();
        if (degenerate) continue;
        for (std::size_t start = 0; start + pat.size() <= norm_tokens.size(); ++start) {
            bool hit = true;
            for (std::size_t k = 0; k < pat.size() && hit; ++k) {
                hit = norm_tokens[start + k] == pat[k];
            }
            if (hit) candidates.push_back({start, pat.size(), pid});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const TokenMatch& a, const TokenMatch& b) {
        if (a.length != b.length) return a.length > b.length;
        if (a.begin != b.begin) return a.begin < b.begin;
        return a.pattern_id < b.pattern_id;
    });
    std::vector<bool> taken(norm_tokens.size(), false);
    std::vector<TokenMatch> chosen;
    for (const auto& m : candidates) {
        bool free = true;
        for (std::size_t i = m.begin; i < m.begin + m.length && free; ++i) free = !taken[i];
        if (!free) continue;
        for (std::size_t i = m.begin; i < m.begin + m.length; ++i) taken[i] = true;
        chosen.push_back(m);
    }
    std::sort(chosen.begin(), chosen.end(),
              [](const TokenMatch& a, const TokenMatch& b) { return a.begin < b.begin; });
    return chosen;
}

inline std::vector<Tag> tags_from_matches(std::size_t n, const std::vector<TokenMatch>& matches) {
    std::vector<Tag> tags(n, Tag::O);
    for (const auto& m : matches) {
        tags[m.begin] = Tag::B;
        for (std::size_t i = m.begin + 1; i < m.begin + m.length; ++i) tags[i] = Tag::I;
    }
    return tags;
}

} // namespace detail

// Labels every maximal non-overlapping match of a metaphoric lexicon
// entry with B I...I; everything else (including non-metaphoric
// names) stays O.
inline LabeledSentence project_labels(const std::vector<std::string>& tokens,
                                      const NameLexicon& lexicon) {
    if (tokens.empty()) throw UsageError("project_labels: sentence is empty");
    if (lexicon.empty()) throw UsageError("project_labels: lexicon is empty");
    std::vector<std::vector<std::string>> patterns;
    for (std::size_t id = 0; id < lexicon.size(); ++id) {
        if (lexicon.entry(id).is_metaphoric) patterns.push_back(lexicon.pattern(id));
    }
    const auto norm = detail::normalize_tokens(tokens);
    const auto matches = detail::resolve_matches(norm, patterns);
    return {tokens, detail::tags_from_matches(tokens.size(), matches)};
}

struct SpansToIobResult {
    LabeledSentence sentence;
    std::vector<std::string> dropped_names; // names with no occurrence in the tokens
};

// Regenerates IOB tags from a list of name surfaces (e.g. parsed from
// an LLM response). Names that never occur are reported, not an error.
inline SpansToIobResult spans_to_iob(const std::vector<std::string>& tokens,
                                     const std::vector<std::string>& names) {
    if (tokens.empty()) throw UsageError("spans_to_iob: sentence is empty");
    std::vector<std::vector<std::string>> patterns;
    patterns.reserve(names.size());
    for (const auto& name : names) {
        std::vector<std::string> pieces;
        for (const auto& tok : split_whitespace(name)) pieces.push_back(normalize_token(tok));
        bool usable = !pieces.empty();
        for (const auto& p : pieces) usable = usable && !p.empty();
        if (!usable) pieces.clear();
        patterns.push_back(std::move(pieces));
    }
    const auto norm = detail::normalize_tokens(tokens);
    const auto matches = detail::resolve_matches(norm, patterns);
    std::vector<bool> matched(names.size(), false);
    for (const auto& m : matches) matched[m.pattern_id] = true;
    SpansToIobResult result;
    result.sentence = {tokens, detail::tags_from_matches(tokens.size(), matches)};
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!matched[i]) result.dropped_names.push_back(names[i]);
    }
    return result;
}

} // namespace floratag
