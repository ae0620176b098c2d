// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded generators shared by the property tests.

#include <string>
#include <vector>

#include "floratag/dataset.hpp"
#include "floratag/iob.hpp"
#include "floratag/rng.hpp"

namespace testutil {

using floratag::Dataset;
using floratag::LabeledSentence;
using floratag::Rng;
using floratag::Tag;

inline std::string random_word(Rng& rng, std::size_t min_len = 1, std::size_t max_len = 8) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
    const std::size_t len = min_len + rng.below(max_len - min_len + 1);
    std::string w;
    for (std::size_t i = 0; i < len; ++i) w.push_back(alphabet[rng.below(alphabet.size())]);
    return w;
}

inline std::vector<std::string> random_tokens(Rng& rng, std::size_t n) {
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < n; ++i) tokens.push_back(random_word(rng));
    return tokens;
}

// Random tag sequence, not necessarily IOB-valid.
inline std::vector<Tag> random_tags(Rng& rng, std::size_t n) {
    std::vector<Tag> tags;
    for (std::size_t i = 0; i < n; ++i) tags.push_back(static_cast<Tag>(rng.below(3)));
    return tags;
}

inline LabeledSentence random_sentence(Rng& rng, std::size_t min_len = 1, std::size_t max_len = 30) {
    const std::size_t n = min_len + rng.below(max_len - min_len + 1);
    LabeledSentence s;
    s.tokens = random_tokens(rng, n);
    s.tags = floratag::repair_iob(random_tags(rng, n));
    return s;
}

inline Dataset random_dataset(Rng& rng, std::size_t max_sentences = 12) {
    Dataset d;
    d.language = rng.below(2) == 0 ? "en" : "es";
    if (rng.below(3) == 0) d.split_label = rng.below(2) == 0 ? "train" : "test";
    const std::size_t n = rng.below(max_sentences + 1);
    for (std::size_t i = 0; i < n; ++i) d.sentences.push_back(random_sentence(rng));
    return d;
}

} // namespace testutil
