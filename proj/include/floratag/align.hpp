// SPDX-License-Identifier: Apache-2.0
#pragma once

// Word-level tags <-> subword-level labels. The first subword of each
// word carries the word's tag; continuation subwords carry kIgnore and
// are excluded from loss and metrics.

#include <cstddef>
#include <string>
#include <vector>

#include "floratag/errors.hpp"
#include "floratag/iob.hpp"

namespace floratag {

inline constexpr int kIgnore = -1;

struct AlignedBatch {
    std::vector<int> subword_labels;           // tag value or kIgnore, one per subword
    std::vector<std::size_t> word_first_subword; // offset of each word's first subword
    std::vector<std::size_t> subword_counts;     // subwords per word
};

inline AlignedBatch align_labels(const std::vector<std::string>& words,
                                 const std::vector<Tag>& tags,
                                 const std::vector<std::size_t>& subword_counts) {
    if (words.empty()) throw UsageError("align_labels: empty sentence");
    if (words.size() != tags.size() || words.size() != subword_counts.size()) {
        throw UsageError("align_labels: got " + std::to_string(words.size()) + " words, " +
                         std::to_string(tags.size()) + " tags, " +
                         std::to_string(subword_counts.size()) + " subword counts");
    }
    AlignedBatch batch;
    for (std::size_t w = 0; w < words.size(); ++w) {
        if (subword_counts[w] == 0) {
            throw DataError("align_labels: word \"" + words[w] + "\" produced zero subwords");
        }
        batch.word_first_subword.push_back(batch.subword_labels.size());
        batch.subword_labels.push_back(static_cast<int>(tags[w]));
        for (std::size_t k = 1; k < subword_counts[w]; ++k) batch.subword_labels.push_back(kIgnore);
    }
    batch.subword_counts = subword_counts;
    return batch;
}

// Word tag = prediction at the word's first subword, then IOB repair.
inline std::vector<Tag> decode_word_labels(const std::vector<Tag>& subword_predictions,
                                           const AlignedBatch& batch) {
    std::vector<Tag> tags;
    tags.reserve(batch.word_first_subword.size());
    for (auto offset : batch.word_first_subword) {
        if (offset >= subword_predictions.size()) {
            throw DataError("decode_word_labels: predictions cover " +
                            std::to_string(subword_predictions.size()) +
                            " subwords but a word starts at offset " + std::to_string(offset));
        }
        tags.push_back(subword_predictions[offset]);
    }
    return repair_iob(std::move(tags));
}

} // namespace floratag
