// SPDX-License-Identifier: Apache-2.0
#pragma once

// Whitespace tokenization, sentence segmentation and the token
// normalization used for lexicon matching. All functions operate on
// UTF-8 byte strings; case folding covers ASCII plus the Latin-1
// supplement letters (enough for English and Spanish botanical text).

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace floratag {

using Sentence = std::vector<std::string>;

namespace utf8 {

// Length in bytes of the UTF-8 sequence starting at `s[i]`.
// Malformed lead bytes are treated as single-byte units.
inline std::size_t seq_len(std::string_view s, std::size_t i) {
    const auto b = static_cast<unsigned char>(s[i]);
    std::size_t n = 1;
    if ((b & 0xE0) == 0xC0) n = 2;
    else if ((b & 0xF0) == 0xE0) n = 3;
    else if ((b & 0xF8) == 0xF0) n = 4;
    if (i + n > s.size()) n = 1;
    return n;
}

// Split into codepoint-sized chunks (each chunk is a complete UTF-8
// sequence as a byte string).
inline std::vector<std::string> codepoints(std::string_view s) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < s.size();) {
        const std::size_t n = seq_len(s, i);
        out.emplace_back(s.substr(i, n));
        i += n;
    }
    return out;
}

} // namespace utf8

inline bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Lowercases ASCII A-Z and the two-byte Latin-1 supplement letters
// (C3 80..9E -> C3 A0..BE, skipping the multiplication sign C3 97).
inline std::string casefold(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        const auto b = static_cast<unsigned char>(s[i]);
        if (b < 0x80) {
            out.push_back(static_cast<char>(std::tolower(b)));
            ++i;
            continue;
        }
        if (b == 0xC3 && i + 1 < s.size()) {
            const auto b2 = static_cast<unsigned char>(s[i + 1]);
            if (b2 >= 0x80 && b2 <= 0x9E && b2 != 0x97) {
                out.push_back(static_cast<char>(0xC3));
                out.push_back(static_cast<char>(b2 + 0x20));
                i += 2;
                continue;
            }
        }
        const std::size_t n = utf8::seq_len(s, i);
        out.append(s.substr(i, n));
        i += n;
    }
    return out;
}

// Punctuation set used when stripping token edges: ASCII punctuation
// plus the marks common in Spanish and typographic text.
inline bool is_strippable_punct(std::string_view cp) {
    if (cp.size() == 1) {
        return std::ispunct(static_cast<unsigned char>(cp[0])) != 0;
    }
    static const char* kMarks[] = {
        "¡", "¿",            // inverted exclamation / question
        "«", "»",            // guillemets
        "‘", "’", "“", "”", // curly quotes
        "–", "—", "…",  // dashes, ellipsis
    };
    for (const char* m : kMarks) {
        if (cp == m) return true;
    }
    return false;
}

// Removes leading and trailing punctuation codepoints; interior
// punctuation (hyphens, apostrophes) is preserved.
inline std::string strip_punct(std::string_view token) {
    const auto cps = utf8::codepoints(token);
    std::size_t lo = 0;
    std::size_t hi = cps.size();
    while (lo < hi && is_strippable_punct(cps[lo])) ++lo;
    while (hi > lo && is_strippable_punct(cps[hi - 1])) --hi;
    std::string out;
    for (std::size_t i = lo; i < hi; ++i) out += cps[i];
    return out;
}

// Canonical form used for matching: punctuation-stripped and case-folded.
inline std::string normalize_token(std::string_view token) {
    return casefold(strip_punct(token));
}

inline std::string trim(std::string_view s) {
    std::size_t lo = 0;
    std::size_t hi = s.size();
    while (lo < hi && is_ascii_space(static_cast<unsigned char>(s[lo]))) ++lo;
    while (hi > lo && is_ascii_space(static_cast<unsigned char>(s[hi - 1]))) --hi;
    return std::string(s.substr(lo, hi - lo));
}

// Splits on whitespace only; punctuation stays attached to tokens.
inline std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_ascii_space(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_ascii_space(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

// Tokenizes raw text into sentences of whitespace-delimited tokens.
// A sentence ends after a token whose last character is '.', '!' or
// '?' (i.e. the terminator is followed by whitespace or end of input).
// Empty input yields an empty list; no empty tokens or sentences.
inline std::vector<Sentence> tokenize(std::string_view text) {
    std::vector<Sentence> sentences;
    Sentence current;
    for (auto& token : split_whitespace(text)) {
        const char last = token.back();
        current.push_back(std::move(token));
        if (last == '.' || last == '!' || last == '?') {
            sentences.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) sentences.push_back(std::move(current));
    return sentences;
}

inline std::string join_tokens(const Sentence& tokens, std::string_view sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += sep;
        out += tokens[i];
    }
    return out;
}

} // namespace floratag
