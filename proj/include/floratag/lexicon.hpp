// SPDX-License-Identifier: Apache-2.0
#pragma once

// Lexicon of flower and plant names with their metaphoric flag and
// language. Entries are indexed by normalized token sequence for the
// span matcher. File format: UTF-8 CSV with header
// "surface,is_metaphoric,language".

#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "floratag/errors.hpp"
#include "floratag/text.hpp"

namespace floratag {

inline bool is_supported_language(std::string_view lang) {
    return lang == "en" || lang == "es";
}

struct NameEntry {
    std::string surface;      // original casing
    bool is_metaphoric = false;
    std::string language;     // "en" | "es"

    bool operator==(const NameEntry& other) const = default;
};

inline void validate_entry(const NameEntry& e) {
    const std::string t = trim(e.surface);
    if (t.empty()) throw DataError("lexicon entry has empty surface");
    if (t.find('\t') != std::string::npos || t.find('\n') != std::string::npos ||
        t.find('\r') != std::string::npos) {
        throw DataError("lexicon surface contains tab or newline: \"" + e.surface + "\"");
    }
    if (!is_supported_language(e.language)) {
        throw DataError("unsupported language code \"" + e.language + "\" for \"" + e.surface + "\"");
    }
}

class NameLexicon {
public:
    NameLexicon() = default;

    explicit NameLexicon(std::vector<NameEntry> entries) {
        for (auto& e : entries) add(std::move(e));
    }

    void add(NameEntry entry) {
        entry.surface = trim(entry.surface);
        validate_entry(entry);
        const std::string key = dedupe_key(entry.surface, entry.language);
        if (!seen_.insert(key).second) {
            throw DataError("duplicate lexicon entry: \"" + entry.surface + "\" (" + entry.language + ")");
        }
        std::vector<std::string> pieces;
        for (auto& tok : split_whitespace(entry.surface)) {
            pieces.push_back(normalize_token(tok));
        }
        const std::size_t id = entries_.size();
        entries_.push_back(std::move(entry));
        // Entries whose tokens vanish under normalization can never
        // match a token sequence; keep them out of the index.
        bool usable = !pieces.empty();
        for (const auto& p : pieces) usable = usable && !p.empty();
        if (usable) {
            index_[pieces.front()].push_back(id);
            patterns_.push_back(std::move(pieces));
        } else {
            patterns_.emplace_back();
        }
    }

    const std::vector<NameEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    const NameEntry& entry(std::size_t id) const { return entries_.at(id); }

    // Normalized token sequence of an entry (empty if unmatchable).
    const std::vector<std::string>& pattern(std::size_t id) const { return patterns_.at(id); }

    // Entry ids whose pattern starts with the given normalized token.
    const std::vector<std::size_t>* candidates(const std::string& first_norm_token) const {
        const auto it = index_.find(first_norm_token);
        return it == index_.end() ? nullptr : &it->second;
    }

    // Exact surface lookup (case-folded), restricted to one language.
    const NameEntry* lookup(std::string_view surface, std::string_view language) const {
        const std::string key = dedupe_key(trim(surface), std::string(language));
        for (const auto& e : entries_) {
            if (dedupe_key(e.surface, e.language) == key) return &e;
        }
        return nullptr;
    }

private:
    static std::string dedupe_key(std::string_view surface, const std::string& language) {
        return casefold(surface) + "\x1f" + language;
    }

    std::vector<NameEntry> entries_;
    std::vector<std::vector<std::string>> patterns_;
    std::unordered_map<std::string, std::vector<std::size_t>> index_;
    std::set<std::string> seen_;
};

namespace detail {

// Minimal RFC 4180 CSV row parser (quoted fields, doubled quotes).
inline std::vector<std::string> parse_csv_row(const std::string& line, std::size_t lineno) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (quoted) throw DataError("line " + std::to_string(lineno) + ": unterminated quote");
    fields.push_back(std::move(field));
    return fields;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace detail

inline NameLexicon read_lexicon_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    NameLexicon lexicon;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = detail::parse_csv_row(line, lineno);
        if (!saw_header) {
            if (fields.size() != 3 || trim(fields[0]) != "surface" ||
                trim(fields[1]) != "is_metaphoric" || trim(fields[2]) != "language") {
                throw DataError("line 1: expected header \"surface,is_metaphoric,language\"");
            }
            saw_header = true;
            continue;
        }
        if (fields.size() != 3) {
            throw DataError("line " + std::to_string(lineno) + ": expected 3 fields, got " +
                            std::to_string(fields.size()));
        }
        NameEntry e;
        e.surface = fields[0];
        const std::string flag = casefold(trim(fields[1]));
        if (flag == "true") e.is_metaphoric = true;
        else if (flag == "false") e.is_metaphoric = false;
        else throw DataError("line " + std::to_string(lineno) + ": is_metaphoric must be true or false, got \"" +
                             fields[1] + "\"");
        e.language = trim(fields[2]);
        try {
            lexicon.add(std::move(e));
        } catch (const DataError& err) {
            throw DataError("line " + std::to_string(lineno) + ": " + err.what());
        }
    }
    if (!saw_header) throw DataError("empty lexicon file: missing header");
    return lexicon;
}

inline void write_lexicon_csv(const NameLexicon& lexicon, std::ostream& out) {
    out << "surface,is_metaphoric,language\n";
    for (const auto& e : lexicon.entries()) {
        out << detail::csv_escape(e.surface) << ',' << (e.is_metaphoric ? "true" : "false")
            << ',' << e.language << '\n';
    }
}

} // namespace floratag
