// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "floratag/dataset.hpp"
#include "testutil.hpp"

using namespace floratag;

namespace {

LabeledSentence all_o_sentence(const std::string& word, std::size_t n = 3) {
    LabeledSentence s;
    for (std::size_t i = 0; i < n; ++i) {
        s.tokens.push_back(word + std::to_string(i));
        s.tags.push_back(Tag::O);
    }
    return s;
}

LabeledSentence with_b_sentence(const std::string& word) {
    return {{word, "grows"}, {Tag::B, Tag::O}};
}

std::multiset<std::vector<std::string>> token_multiset(const Dataset& d) {
    std::multiset<std::vector<std::string>> out;
    for (const auto& s : d.sentences) out.insert(s.tokens);
    return out;
}

} // namespace

TEST_CASE("balance removes all-O sentences down to the ratio") {
    Dataset d;
    for (int i = 0; i < 10; ++i) d.sentences.push_back(all_o_sentence("plain" + std::to_string(i)));
    for (int i = 0; i < 5; ++i) d.sentences.push_back(with_b_sentence("name" + std::to_string(i)));
    const auto balanced = balance(d, 1.0, 42);
    std::size_t with_b = 0;
    std::size_t all_o = 0;
    for (const auto& s : balanced.sentences) (has_name(s) ? with_b : all_o)++;
    CHECK(with_b == 5);
    CHECK(all_o == 5);
}

TEST_CASE("balance keeps a dataset without all-O sentences unchanged") {
    Dataset d;
    for (int i = 0; i < 4; ++i) d.sentences.push_back(with_b_sentence("n" + std::to_string(i)));
    CHECK(balance(d, 1.0) == d);
}

TEST_CASE("balance is a no-op when the constraint already holds") {
    Dataset d;
    for (int i = 0; i < 10; ++i) d.sentences.push_back(all_o_sentence("p" + std::to_string(i)));
    for (int i = 0; i < 5; ++i) d.sentences.push_back(with_b_sentence("n" + std::to_string(i)));
    CHECK(balance(d, 10.0) == d);
}

TEST_CASE("balance rejects negative ratio") {
    CHECK_THROWS_AS(balance(Dataset{}, -0.5), UsageError);
}

TEST_CASE("balance keeps every with-B sentence and preserves order", "[property]") {
    testutil::Rng rng(611);
    for (int iter = 0; iter < 1000; ++iter) {
        const auto d = testutil::random_dataset(rng, 16);
        const double ratio = static_cast<double>(rng.below(30)) / 10.0;
        const auto balanced = balance(d, ratio, 1 + iter);
        // survivor multiset is a subset; every with-B sentence survives
        std::size_t with_b_in = 0;
        std::size_t with_b_out = 0;
        std::size_t all_o_out = 0;
        for (const auto& s : d.sentences) with_b_in += has_name(s) ? 1 : 0;
        for (const auto& s : balanced.sentences) {
            if (has_name(s)) ++with_b_out;
            else ++all_o_out;
        }
        REQUIRE(with_b_out == with_b_in);
        REQUIRE(static_cast<double>(all_o_out) <=
                ratio * static_cast<double>(with_b_in) + 1e-9);
        // order preserved: balanced is a subsequence of the input
        std::size_t cursor = 0;
        for (const auto& s : balanced.sentences) {
            while (cursor < d.sentences.size() && !(d.sentences[cursor] == s)) ++cursor;
            REQUIRE(cursor < d.sentences.size());
            ++cursor;
        }
    }
}

TEST_CASE("shuffle_split produces exact disjoint partitions") {
    Dataset d;
    d.language = "en";
    for (int i = 0; i < 2020; ++i) {
        d.sentences.push_back(i % 2 == 0 ? with_b_sentence("name" + std::to_string(i))
                                         : all_o_sentence("plain" + std::to_string(i)));
    }
    const auto [train, test] = shuffle_split(d, 1500, 520, 42);
    CHECK(train.sentences.size() == 1500);
    CHECK(test.sentences.size() == 520);
    CHECK(train.split_label == "train");
    CHECK(test.split_label == "test");
    CHECK(train.language == "en");

    auto combined = token_multiset(train);
    for (const auto& s : test.sentences) combined.insert(s.tokens);
    CHECK(combined == token_multiset(d));

    const auto [train2, test2] = shuffle_split(d, 1500, 520, 42);
    CHECK(train2 == train);
    CHECK(test2 == test);

    const auto [train3, test3] = shuffle_split(d, 1500, 520, 43);
    CHECK_FALSE(train3 == train);
}

TEST_CASE("shuffle_split with train_n=0 copies everything to test") {
    testutil::Rng rng(12);
    auto d = testutil::random_dataset(rng, 8);
    d.split_label.reset();
    const auto [train, test] = shuffle_split(d, 0, d.sentences.size(), 7);
    CHECK(train.sentences.empty());
    CHECK(token_multiset(test) == token_multiset(d));
}

TEST_CASE("shuffle_split rejects size mismatch naming both counts") {
    Dataset d;
    d.sentences.push_back(with_b_sentence("x"));
    CHECK_THROWS_WITH(shuffle_split(d, 3, 4, 1),
                      Catch::Matchers::ContainsSubstring("7") &&
                          Catch::Matchers::ContainsSubstring("1"));
}

TEST_CASE("shuffle_split partitions for all seeds", "[property]") {
    testutil::Rng rng(8088);
    for (int iter = 0; iter < 1000; ++iter) {
        const auto d = testutil::random_dataset(rng, 12);
        const std::size_t train_n = rng.below(d.sentences.size() + 1);
        const auto [train, test] = shuffle_split(d, train_n, d.sentences.size() - train_n, iter);
        REQUIRE(train.sentences.size() == train_n);
        REQUIRE(test.sentences.size() == d.sentences.size() - train_n);
        auto combined = token_multiset(train);
        for (const auto& s : test.sentences) combined.insert(s.tokens);
        REQUIRE(combined == token_multiset(d));
    }
}

TEST_CASE("write_conll emits token TAB tag lines") {
    Dataset d;
    d.sentences.push_back(
        {{"calliandra", "haematocephala", "(Red", "powder", "puff)", "is", "an", "evergreen,",
          "spreading", "shrub"},
         {Tag::O, Tag::O, Tag::B, Tag::I, Tag::I, Tag::O, Tag::O, Tag::O, Tag::O, Tag::O}});
    std::ostringstream out;
    write_conll(d, out);
    std::istringstream lines(out.str());
    std::vector<std::string> all;
    std::string line;
    while (std::getline(lines, line)) all.push_back(line);
    REQUIRE(all.size() == 10);
    CHECK(all[2] == "(Red\tB");
    CHECK(all[0] == "calliandra\tO");
    CHECK(all[9] == "shrub\tO");
}

TEST_CASE("empty dataset round trips through an empty file") {
    std::ostringstream out;
    write_conll(Dataset{}, out);
    CHECK(out.str().empty());
    std::istringstream in("");
    CHECK(read_conll(in).sentences.empty());
}

TEST_CASE("read_conll rejects bad input with line numbers") {
    const std::string good = "a\tO\nb\tB\n";
    std::istringstream bad_tag(good + "\nc\tO\nd\tO\ne\tO\nf\tX\n");
    CHECK_THROWS_WITH(read_conll(bad_tag), Catch::Matchers::ContainsSubstring("line 7") &&
                                               Catch::Matchers::ContainsSubstring("X"));
    std::istringstream no_tab("a\tO\nbare\n");
    CHECK_THROWS_WITH(read_conll(no_tab), Catch::Matchers::ContainsSubstring("line 2"));
    std::istringstream trailing("a\tO\tI\n");
    CHECK_THROWS_WITH(read_conll(trailing), Catch::Matchers::ContainsSubstring("line 1"));
    std::istringstream empty_token("\tO\n");
    CHECK_THROWS_WITH(read_conll(empty_token), Catch::Matchers::ContainsSubstring("line 1"));
}

TEST_CASE("write_conll validates sentences") {
    Dataset d;
    d.sentences.push_back({{"a"}, {Tag::O, Tag::B}});
    std::ostringstream out;
    CHECK_THROWS_AS(write_conll(d, out), DataError);
    Dataset tab;
    tab.sentences.push_back({{"a\tb"}, {Tag::O}});
    CHECK_THROWS_AS(write_conll(tab, out), DataError);
}

TEST_CASE("CoNLL round trip identity", "[property]") {
    testutil::Rng rng(20108);
    for (int iter = 0; iter < 1000; ++iter) {
        auto d = testutil::random_dataset(rng, 10);
        std::ostringstream out;
        write_conll(d, out);
        std::istringstream in(out.str());
        const auto back = read_conll(in, d.language, d.split_label);
        REQUIRE(back == d);
    }
}
