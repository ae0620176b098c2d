// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "floratag/align.hpp"
#include "testutil.hpp"

using namespace floratag;

TEST_CASE("align_labels puts the tag on the first subword") {
    const auto batch = align_labels({"w1", "w2"}, {Tag::B, Tag::I}, {2, 1});
    CHECK(batch.subword_labels == std::vector<int>{static_cast<int>(Tag::B), kIgnore,
                                                   static_cast<int>(Tag::I)});
    CHECK(batch.word_first_subword == std::vector<std::size_t>{0, 2});
}

TEST_CASE("align_labels with single subwords is the identity") {
    const auto batch = align_labels({"a", "b", "c"}, {Tag::O, Tag::B, Tag::I}, {1, 1, 1});
    CHECK(batch.subword_labels ==
          std::vector<int>{static_cast<int>(Tag::O), static_cast<int>(Tag::B),
                           static_cast<int>(Tag::I)});
}

TEST_CASE("align_labels rejects empty sentences and zero counts") {
    CHECK_THROWS_AS(align_labels({}, {}, {}), UsageError);
    CHECK_THROWS_WITH(align_labels({"ab", "cd"}, {Tag::O, Tag::O}, {1, 0}),
                      Catch::Matchers::ContainsSubstring("cd"));
    CHECK_THROWS_AS(align_labels({"a"}, {Tag::O, Tag::B}, {1}), UsageError);
}

TEST_CASE("decode_word_labels reads first subwords and repairs") {
    const auto batch = align_labels({"w1", "w2"}, {Tag::B, Tag::O}, {2, 1});
    // continuation predictions are irrelevant
    CHECK(decode_word_labels({Tag::B, Tag::I, Tag::O}, batch) ==
          std::vector<Tag>{Tag::B, Tag::O});
    // raw word tags [O, I] get repaired to [O, B]
    const auto batch2 = align_labels({"a", "b"}, {Tag::O, Tag::O}, {1, 1});
    CHECK(decode_word_labels({Tag::O, Tag::I}, batch2) == std::vector<Tag>{Tag::O, Tag::B});
}

TEST_CASE("decode_word_labels rejects missing predictions") {
    const auto batch = align_labels({"w1", "w2"}, {Tag::B, Tag::O}, {2, 2});
    CHECK_THROWS_AS(decode_word_labels({Tag::B, Tag::O}, batch), DataError);
}

TEST_CASE("align/decode round trip", "[property]") {
    testutil::Rng rng(31415);
    for (int iter = 0; iter < 1000; ++iter) {
        const std::size_t n = 1 + rng.below(30);
        const auto words = testutil::random_tokens(rng, n);
        const auto tags = repair_iob(testutil::random_tags(rng, n));
        std::vector<std::size_t> counts;
        for (std::size_t i = 0; i < n; ++i) counts.push_back(1 + rng.below(4));
        const auto batch = align_labels(words, tags, counts);
        std::size_t total = 0;
        for (auto c : counts) total += c;
        REQUIRE(batch.subword_labels.size() == total);
        // exactly one labeled subword per word
        std::size_t labeled = 0;
        for (int v : batch.subword_labels) labeled += v == kIgnore ? 0 : 1;
        REQUIRE(labeled == n);
        // feed the aligned labels back as predictions (ignores become O)
        std::vector<Tag> preds;
        for (int v : batch.subword_labels) preds.push_back(v == kIgnore ? Tag::O : static_cast<Tag>(v));
        REQUIRE(decode_word_labels(preds, batch) == tags);
    }
}
