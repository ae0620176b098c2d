// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "floratag/match.hpp"
#include "testutil.hpp"

using namespace floratag;

namespace {

const std::vector<std::string> kTable1Tokens = {
    "calliandra", "haematocephala", "(Red", "powder", "puff)",
    "is",         "an",             "evergreen,", "spreading", "shrub"};

const std::vector<Tag> kTable1Tags = {Tag::O, Tag::O, Tag::B, Tag::I, Tag::I,
                                      Tag::O, Tag::O, Tag::O, Tag::O, Tag::O};

NameLexicon make_lexicon(std::vector<NameEntry> entries) { return NameLexicon(std::move(entries)); }

// Independent oracle: enumerate every candidate match of every pattern
// by direct normalized comparison, order by (length desc, start asc),
// keep the non-overlapping prefix-greedy set, emit tags.
std::vector<Tag> oracle_project(const std::vector<std::string>& tokens,
                                const std::vector<std::vector<std::string>>& surfaces) {
    struct Cand {
        std::size_t start, len, pid;
    };
    std::vector<std::string> norm;
    for (const auto& t : tokens) norm.push_back(normalize_token(t));
    std::vector<Cand> cands;
    for (std::size_t pid = 0; pid < surfaces.size(); ++pid) {
        const auto& pat = surfaces[pid];
        if (pat.empty()) continue;
        bool bad = false;
        for (const auto& p : pat) bad = bad || p.empty();
        if (bad) continue;
        for (std::size_t s = 0; s + pat.size() <= tokens.size(); ++s) {
            bool ok = true;
            for (std::size_t k = 0; k < pat.size(); ++k) ok = ok && norm[s + k] == pat[k];
            if (ok) cands.push_back({s, pat.size(), pid});
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.len != b.len) return a.len > b.len;
        if (a.start != b.start) return a.start < b.start;
        return a.pid < b.pid;
    });
    std::vector<Tag> tags(tokens.size(), Tag::O);
    std::vector<bool> used(tokens.size(), false);
    for (const auto& c : cands) {
        bool free = true;
        for (std::size_t i = c.start; i < c.start + c.len; ++i) free = free && !used[i];
        if (!free) continue;
        for (std::size_t i = c.start; i < c.start + c.len; ++i) used[i] = true;
        tags[c.start] = Tag::B;
        for (std::size_t i = c.start + 1; i < c.start + c.len; ++i) tags[i] = Tag::I;
    }
    return tags;
}

} // namespace

TEST_CASE("project_labels reproduces the annotation example") {
    const auto lex = make_lexicon({{"Red powder puff", true, "en"}});
    const auto labeled = project_labels(kTable1Tokens, lex);
    CHECK(labeled.tokens == kTable1Tokens);
    CHECK(labeled.tags == kTable1Tags);
    CHECK(validate_iob(labeled).empty());
}

TEST_CASE("project_labels without a matching entry is all O") {
    const auto lex = make_lexicon({{"snapdragon", true, "en"}});
    const auto labeled = project_labels(kTable1Tokens, lex);
    for (auto t : labeled.tags) CHECK(t == Tag::O);
}

TEST_CASE("longest match wins over its own prefix") {
    const auto lex = make_lexicon({{"lion's foot", true, "en"}, {"lion's", true, "en"}});
    const auto labeled = project_labels({"the", "lion's", "foot", "fern"}, lex);
    CHECK(labeled.tags == std::vector<Tag>{Tag::O, Tag::B, Tag::I, Tag::O});
}

TEST_CASE("non-metaphoric entries never produce B or I") {
    const auto lex =
        make_lexicon({{"calliandra haematocephala", false, "en"}, {"Red powder puff", true, "en"}});
    const auto labeled = project_labels(kTable1Tokens, lex);
    CHECK(labeled.tags == kTable1Tags);
}

TEST_CASE("matching is case-insensitive and keeps original casing") {
    const auto lex = make_lexicon({{"MOONLIGHT", true, "en"}});
    const auto labeled = project_labels({"The", "Moonlight", "rose."}, lex);
    CHECK(labeled.tags == std::vector<Tag>{Tag::O, Tag::B, Tag::O});
    CHECK(labeled.tokens[1] == "Moonlight");
}

TEST_CASE("accented Spanish names match case-insensitively") {
    const auto lex = make_lexicon({{"diente de león", true, "es"}});
    const auto labeled = project_labels({"El", "Diente", "de", "LeÓn", "crece."}, lex);
    CHECK(labeled.tags ==
          std::vector<Tag>{Tag::O, Tag::B, Tag::I, Tag::I, Tag::O});
}

TEST_CASE("project_labels preconditions") {
    const auto lex = make_lexicon({{"x", true, "en"}});
    CHECK_THROWS_AS(project_labels({}, lex), UsageError);
    CHECK_THROWS_AS(project_labels({"a"}, NameLexicon{}), UsageError);
}

TEST_CASE("overlapping matches resolve longest-first then leftmost", "[property]") {
    testutil::Rng rng(404);
    static const std::vector<std::string> vocab = {"red",  "powder", "puff", "lion's", "foot",
                                                   "fern", "moon",   "light", "the",   "a"};
    for (int iter = 0; iter < 1000; ++iter) {
        const std::size_t n = 1 + rng.below(12);
        std::vector<std::string> tokens;
        for (std::size_t i = 0; i < n; ++i) tokens.push_back(vocab[rng.below(vocab.size())]);
        // random lexicon of 1..5 metaphoric entries over the same vocabulary
        std::vector<NameEntry> entries;
        std::vector<std::vector<std::string>> surfaces;
        std::set<std::string> seen;
        const std::size_t m = 1 + rng.below(5);
        for (std::size_t e = 0; e < m; ++e) {
            const std::size_t len = 1 + rng.below(3);
            std::vector<std::string> pieces;
            for (std::size_t k = 0; k < len; ++k) pieces.push_back(vocab[rng.below(vocab.size())]);
            std::string surface;
            for (std::size_t k = 0; k < pieces.size(); ++k) {
                if (k > 0) surface += ' ';
                surface += pieces[k];
            }
            if (!seen.insert(surface).second) continue;
            entries.push_back({surface, true, "en"});
            surfaces.push_back(pieces);
        }
        const auto lex = make_lexicon(entries);
        const auto got = project_labels(tokens, lex);
        const auto expected = oracle_project(tokens, surfaces);
        REQUIRE(got.tags == expected);
        REQUIRE(validate_iob(got).empty());
    }
}

TEST_CASE("spans_to_iob regenerates the annotation example") {
    const auto result = spans_to_iob(kTable1Tokens, {"Red powder puff"});
    CHECK(result.sentence.tags == kTable1Tags);
    CHECK(result.dropped_names.empty());
}

TEST_CASE("spans_to_iob with no names is all O") {
    const auto result = spans_to_iob(kTable1Tokens, {});
    for (auto t : result.sentence.tags) CHECK(t == Tag::O);
    CHECK(result.dropped_names.empty());
}

TEST_CASE("spans_to_iob reports names absent from the sentence") {
    const auto result = spans_to_iob(kTable1Tokens, {"dragon lily"});
    for (auto t : result.sentence.tags) CHECK(t == Tag::O);
    REQUIRE(result.dropped_names == std::vector<std::string>{"dragon lily"});
}

TEST_CASE("spans_to_iob then extract_spans recovers the matched spans", "[property]") {
    testutil::Rng rng(991);
    for (int iter = 0; iter < 1000; ++iter) {
        // distinct tokens so every span surface occurs exactly once
        const std::size_t n = 1 + rng.below(20);
        std::vector<std::string> tokens;
        for (std::size_t i = 0; i < n; ++i)
            tokens.push_back(testutil::random_word(rng, 2, 6) + std::to_string(i));
        const auto tags = repair_iob(testutil::random_tags(rng, n));
        const LabeledSentence gold{tokens, tags};
        const auto spans = extract_spans(gold);
        std::vector<std::string> names;
        for (const auto& sp : spans) names.push_back(sp.surface);
        const auto regen = spans_to_iob(tokens, names);
        REQUIRE(regen.dropped_names.empty());
        REQUIRE(regen.sentence.tags == tags);
        const auto recovered = extract_spans(regen.sentence);
        REQUIRE(recovered.size() == spans.size());
        for (std::size_t i = 0; i < spans.size(); ++i) {
            REQUIRE(recovered[i].begin == spans[i].begin);
            REQUIRE(recovered[i].end == spans[i].end);
        }
    }
}

TEST_CASE("projected spans normalize back to lexicon surfaces", "[property]") {
    testutil::Rng rng(5150);
    static const std::vector<std::string> vocab = {"rojo", "flor", "luna", "sol", "monte", "de"};
    for (int iter = 0; iter < 300; ++iter) {
        std::vector<NameEntry> entries;
        std::set<std::string> seen;
        for (std::size_t e = 0; e < 3; ++e) {
            const std::size_t len = 1 + rng.below(2);
            std::string surface;
            for (std::size_t k = 0; k < len; ++k) {
                if (k > 0) surface += ' ';
                surface += vocab[rng.below(vocab.size())];
            }
            if (seen.insert(surface).second) entries.push_back({surface, true, "es"});
        }
        const auto lex = make_lexicon(entries);
        std::vector<std::string> tokens;
        const std::size_t n = 1 + rng.below(10);
        for (std::size_t i = 0; i < n; ++i) tokens.push_back(vocab[rng.below(vocab.size())]);
        const auto labeled = project_labels(tokens, lex);
        for (const auto& span : extract_spans(labeled)) {
            std::string norm;
            for (std::size_t i = span.begin; i <= span.end; ++i) {
                if (!norm.empty()) norm += ' ';
                norm += normalize_token(tokens[i]);
            }
            bool found = false;
            for (const auto& e : entries) found = found || casefold(e.surface) == norm;
            REQUIRE(found);
        }
    }
}
