// SPDX-License-Identifier: Apache-2.0
#pragma once

// Chat-completions HTTP client. Credentials come from the
// METAPHOR_LLM_API_KEY environment variable; the endpoint URL is
// configurable so tests can point at a local server. Rate limits and
// server errors are retried with exponential backoff.

#include <chrono>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "floratag/errors.hpp"
#include "floratag/llm_client.hpp"

namespace floratag {

inline constexpr const char* kApiKeyEnvVar = "METAPHOR_LLM_API_KEY";

inline constexpr const char* kSystemPreamble =
    "You answer questions about metaphoric flower and plant names. "
    "Answer with yes or no and list the names exactly as they appear in the sentence.";

struct HttpClientOptions {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::size_t max_transport_attempts = 5;
    double backoff_base_seconds = 0.5;
    double timeout_seconds = 60.0;
};

class HttpChatClient : public LlmClient {
public:
    explicit HttpChatClient(HttpClientOptions options = {})
        : options_(std::move(options)) {
        const char* key = std::getenv(kApiKeyEnvVar);
        if (key == nullptr || std::string(key).empty()) {
            throw UsageError(std::string("missing API credential: set ") + kApiKeyEnvVar);
        }
        api_key_ = key;
        split_endpoint();
    }

    std::string complete(const std::string& prompt, const PromptRequest& request) override {
        nlohmann::json body = {
            {"model", request.model_name},
            {"temperature", request.temperature},
            {"messages",
             {{{"role", "system"}, {"content", kSystemPreamble}},
              {{"role", "user"}, {"content", prompt}}}},
        };
        const std::string payload = body.dump();
        httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

        std::string last_error;
        for (std::size_t attempt = 0; attempt < options_.max_transport_attempts; ++attempt) {
            if (attempt > 0) {
                const double delay = options_.backoff_base_seconds * static_cast<double>(1ULL << (attempt - 1));
                std::this_thread::sleep_for(std::chrono::duration<double>(delay));
            }
            httplib::Client cli(base_url_);
            cli.set_read_timeout(std::chrono::duration<double>(options_.timeout_seconds));
            cli.set_connection_timeout(std::chrono::duration<double>(options_.timeout_seconds));
            auto res = cli.Post(path_, headers, payload, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 429 || res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200) {
                throw DataError("LLM endpoint returned HTTP " + std::to_string(res->status) +
                                ": " + res->body);
            }
            return extract_content(res->body);
        }
        throw DataError("LLM request failed after " + std::to_string(options_.max_transport_attempts) +
                        " attempts (" + last_error + ")");
    }

private:
    static std::string extract_content(const std::string& body) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("malformed LLM response body: ") + e.what());
        }
        if (!j.contains("choices") || j["choices"].empty() ||
            !j["choices"][0].contains("message")) {
            throw DataError("LLM response body has no choices[0].message");
        }
        return j["choices"][0]["message"].value("content", "");
    }

    void split_endpoint() {
        const auto scheme_end = options_.endpoint.find("://");
        if (scheme_end == std::string::npos) {
            throw UsageError("endpoint URL must include a scheme: " + options_.endpoint);
        }
        const auto path_start = options_.endpoint.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            base_url_ = options_.endpoint;
            path_ = "/";
        } else {
            base_url_ = options_.endpoint.substr(0, path_start);
            path_ = options_.endpoint.substr(path_start);
        }
    }

    HttpClientOptions options_;
    std::string api_key_;
    std::string base_url_;
    std::string path_;
};

} // namespace floratag
