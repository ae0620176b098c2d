// SPDX-License-Identifier: Apache-2.0
#pragma once

// Batch extraction driver over an LLM client. Live clients answer
// prompts over HTTP; the replay client serves recorded responses so
// evaluation runs are reproducible. Raw responses are always kept for
// persistence and replay.

#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "floratag/errors.hpp"
#include "floratag/iob.hpp"
#include "floratag/llm.hpp"
#include "floratag/match.hpp"

namespace floratag {

class LlmClient {
public:
    virtual ~LlmClient() = default;

    // Returns the assistant's raw text answer for one prompt.
    virtual std::string complete(const std::string& prompt, const PromptRequest& request) = 0;

    // Deterministic clients are driven sequentially so duplicate
    // sentences consume recordings in input order.
    virtual bool deterministic() const { return false; }
};

struct RecordedResponse {
    std::string sentence;
    std::string raw_response;
};

inline std::vector<RecordedResponse> read_responses_jsonl(std::istream& in) {
    std::vector<RecordedResponse> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("responses line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.contains("sentence") || !j.contains("raw_response")) {
            throw DataError("responses line " + std::to_string(lineno) +
                            ": expected keys sentence and raw_response");
        }
        out.push_back({j["sentence"].get<std::string>(), j["raw_response"].get<std::string>()});
    }
    return out;
}

inline void write_responses_jsonl(const std::vector<RecordedResponse>& responses, std::ostream& out) {
    for (const auto& r : responses) {
        nlohmann::json j = {{"sentence", r.sentence}, {"raw_response", r.raw_response}};
        out << j.dump() << '\n';
    }
}

// Serves recorded responses keyed by sentence text. Repeated requests
// for the same sentence walk through its recordings in order and stick
// at the last one.
class ReplayClient : public LlmClient {
public:
    explicit ReplayClient(const std::vector<RecordedResponse>& recordings) {
        for (const auto& r : recordings) recordings_[r.sentence].push_back(r.raw_response);
    }

    std::string complete(const std::string& /*prompt*/, const PromptRequest& request) override {
        const auto it = recordings_.find(request.sentence);
        if (it == recordings_.end() || it->second.empty()) {
            throw DataError("replay: no recorded response for sentence \"" + request.sentence + "\"");
        }
        auto& cursor = cursors_[request.sentence];
        const std::string& raw = it->second[cursor < it->second.size() ? cursor : it->second.size() - 1];
        ++cursor;
        return raw;
    }

    bool deterministic() const override { return true; }

private:
    std::map<std::string, std::vector<std::string>> recordings_;
    std::map<std::string, std::size_t> cursors_;
};

struct RunStats {
    std::size_t n_sentences = 0;
    std::size_t n_requests = 0;
    std::size_t retries = 0;          // attempts beyond the first, summed
    std::size_t parse_failures = 0;   // attempts whose response was unparseable
    std::size_t failed_sentences = 0; // all attempts unparseable -> emitted all-O
    std::size_t dropped_names = 0;    // candidates absent from their sentence
    std::size_t disagreements = 0;    // same sentence answered differently within the run
    std::vector<RecordedResponse> responses; // every request, in input order

    nlohmann::json to_json() const {
        return {
            {"n_sentences", n_sentences}, {"n_requests", n_requests},
            {"retries", retries},         {"parse_failures", parse_failures},
            {"failed_sentences", failed_sentences}, {"dropped_names", dropped_names},
            {"disagreements", disagreements},
        };
    }
};

struct ExtractOutput {
    std::vector<LabeledSentence> sentences;
    RunStats stats;
};

// One LabeledSentence per input sentence. Unparseable sentences come
// back all-O; names that do not occur in their sentence are dropped
// and counted, never guessed.
inline ExtractOutput extract(const std::vector<std::vector<std::string>>& sentences,
                             const PromptRequest& request_template, LlmClient& client,
                             std::size_t concurrency = 4) {
    struct PerSentence {
        std::vector<RecordedResponse> responses;
        std::size_t retries = 0;
        std::size_t parse_failures = 0;
        std::size_t dropped = 0;
        bool failed = false;
        LabeledSentence labeled;
    };

    const std::size_t max_attempts = request_template.max_retries == 0 ? 1 : request_template.max_retries;
    std::vector<PerSentence> results(sentences.size());

    auto run_one = [&](std::size_t idx) {
        const auto& tokens = sentences[idx];
        auto& slot = results[idx];
        if (tokens.empty()) {
            slot.labeled = {};
            return;
        }
        PromptRequest request = request_template;
        request.sentence = join_tokens(tokens);
        const std::string prompt = build_prompt(request.sentence);
        for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
            if (attempt > 0) ++slot.retries;
            const std::string raw = client.complete(prompt, request);
            slot.responses.push_back({request.sentence, raw});
            try {
                const ExtractionResult parsed = parse_response(raw, request.sentence);
                slot.dropped += parsed.dropped_names.size();
                auto regen = spans_to_iob(tokens, parsed.names);
                slot.dropped += regen.dropped_names.size();
                slot.labeled = std::move(regen.sentence);
                return;
            } catch (const ParseFailure&) {
                ++slot.parse_failures;
            }
        }
        slot.failed = true;
        slot.labeled = {tokens, std::vector<Tag>(tokens.size(), Tag::O)};
    };

    std::size_t workers = client.deterministic() ? 1 : (concurrency == 0 ? 1 : concurrency);
    if (workers <= 1 || sentences.size() <= 1) {
        for (std::size_t i = 0; i < sentences.size(); ++i) run_one(i);
    } else {
        std::mutex next_mutex;
        std::size_t next = 0;
        auto worker = [&] {
            for (;;) {
                std::size_t idx;
                {
                    std::lock_guard<std::mutex> lock(next_mutex);
                    if (next >= sentences.size()) return;
                    idx = next++;
                }
                run_one(idx);
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers && w < sentences.size(); ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    ExtractOutput out;
    out.stats.n_sentences = sentences.size();
    std::map<std::string, std::string> first_answer;
    for (auto& slot : results) {
        out.stats.n_requests += slot.responses.size();
        out.stats.retries += slot.retries;
        out.stats.parse_failures += slot.parse_failures;
        out.stats.dropped_names += slot.dropped;
        if (slot.failed) ++out.stats.failed_sentences;
        for (auto& r : slot.responses) {
            const auto it = first_answer.find(r.sentence);
            if (it == first_answer.end()) {
                first_answer.emplace(r.sentence, r.raw_response);
            } else if (it->second != r.raw_response) {
                ++out.stats.disagreements;
            }
            out.stats.responses.push_back(std::move(r));
        }
        out.sentences.push_back(std::move(slot.labeled));
    }
    return out;
}

} // namespace floratag
