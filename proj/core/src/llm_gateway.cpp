#include "emomem/llm_gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "emomem/detail/fnv.hpp"

namespace emomem {

using json = nlohmann::json;

std::string role_name(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

std::string chat(const ChatRequest& request, ChatBackend& backend) {
    if (request.messages.empty()) {
        throw Error("chat: request must contain at least one message");
    }
    return backend.chat(request);
}

std::vector<SemanticVector> embed_batch(const std::vector<std::string>& texts,
                                        EmbeddingBackend& backend) {
    if (texts.empty()) {
        throw Error("embed_batch: text list must be non-empty");
    }
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (texts[i].empty()) {
            throw Error("embed_batch: text at index " + std::to_string(i) + " is empty");
        }
    }
    auto vectors = backend.embed_batch(texts);
    if (vectors.size() != texts.size()) {
        throw BackendError("embedding backend returned " + std::to_string(vectors.size()) +
                           " vectors for " + std::to_string(texts.size()) + " texts");
    }
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != backend.dimension()) {
            throw DimensionError("embedding at index " + std::to_string(i) + " has " +
                                 std::to_string(vectors[i].size()) + " values, expected " +
                                 std::to_string(backend.dimension()));
        }
    }
    return vectors;
}

// ---- ConcurrencyLimiter ----

ConcurrencyLimiter::ConcurrencyLimiter(int max_in_flight) : limit_(max_in_flight) {
    if (limit_ < 1) {
        throw ConfigError("concurrency bound must be at least 1");
    }
}

ConcurrencyLimiter::Ticket ConcurrencyLimiter::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return in_flight_ < limit_; });
    ++in_flight_;
    high_water_ = std::max(high_water_, in_flight_);
    return Ticket(this);
}

void ConcurrencyLimiter::release() {
    {
        std::lock_guard lock(mutex_);
        --in_flight_;
    }
    cv_.notify_one();
}

ConcurrencyLimiter::Ticket::~Ticket() {
    if (limiter_) limiter_->release();
}

int ConcurrencyLimiter::high_water() const {
    std::lock_guard lock(mutex_);
    return high_water_;
}

// ---- HTTP plumbing ----

namespace {

// Splits "http://host:port/v1" into the client base and the path prefix.
struct EndpointParts {
    std::string host_base;  // scheme://host[:port]
    std::string prefix;     // /v1 or empty
};

EndpointParts split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    std::size_t path_start = scheme_end == std::string::npos
                                 ? endpoint.find('/')
                                 : endpoint.find('/', scheme_end + 3);
    EndpointParts parts;
    if (path_start == std::string::npos) {
        parts.host_base = endpoint;
    } else {
        parts.host_base = endpoint.substr(0, path_start);
        parts.prefix = endpoint.substr(path_start);
        while (!parts.prefix.empty() && parts.prefix.back() == '/') {
            parts.prefix.pop_back();
        }
    }
    return parts;
}

class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(const HttpBackendConfig& config)
        : parts_(split_endpoint(config.endpoint)), client_(parts_.host_base) {
        const auto timeout_ms = static_cast<int>(config.timeout_seconds * 1000.0);
        client_.set_connection_timeout(0, timeout_ms * 1000);
        client_.set_read_timeout(0, timeout_ms * 1000);
        client_.set_write_timeout(0, timeout_ms * 1000);
        if (!config.api_key.empty()) {
            client_.set_bearer_token_auth(config.api_key);
        }
    }

    TransportResponse post_json(const std::string& path, const std::string& body) override {
        // httplib::Client shares one socket across requests; serialize here.
        // TODO: pool clients if per-backend serialization limits throughput
        // under concurrent serving.
        std::lock_guard lock(mutex_);
        auto result = client_.Post(parts_.prefix + path, body, "application/json");
        if (!result) {
            const auto err = result.error();
            const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                                   err == httplib::Error::Read || err == httplib::Error::Write;
            throw TransportError("transport failure: " + httplib::to_string(err), timed_out);
        }
        return TransportResponse{result->status, result->body};
    }

private:
    EndpointParts parts_;
    httplib::Client client_;
    std::mutex mutex_;
};

bool retryable_status(int status) {
    return status == 429 || status >= 500;
}

// Shared retry loop for the chat and embedding clients.
TransportResponse post_with_retries(HttpTransport& transport, const std::string& path,
                                    const std::string& body, const RetryPolicy& policy,
                                    BackendStats& stats) {
    int attempt = 0;
    bool last_was_timeout = false;
    std::string last_failure;
    while (true) {
        stats.requests.fetch_add(1);
        try {
            TransportResponse response = transport.post_json(path, body);
            if (response.status == 200) {
                return response;
            }
            if (response.status == 401 || response.status == 403) {
                throw AuthError("authentication rejected (HTTP " +
                                std::to_string(response.status) + "): " + response.body);
            }
            if (!retryable_status(response.status)) {
                throw BackendError("HTTP " + std::to_string(response.status) + ": " +
                                   response.body);
            }
            last_was_timeout = false;
            last_failure = "HTTP " + std::to_string(response.status);
        } catch (const TransportError& e) {
            last_was_timeout = e.timed_out();
            last_failure = e.what();
        }
        if (attempt >= policy.max_retries) {
            const std::string msg = last_failure + " after " + std::to_string(attempt + 1) +
                                    " attempts";
            if (last_was_timeout) throw TimeoutError(msg);
            throw BackendError(msg);
        }
        stats.retries.fetch_add(1);
        const long shift = std::min(attempt, 16);
        const long delay = std::min<long>(static_cast<long>(policy.backoff_base_ms) << shift,
                                          policy.backoff_cap_ms);
        if (delay > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
        ++attempt;
    }
}

json chat_request_to_json(const ChatRequest& request, const std::string& default_model) {
    json messages = json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", role_name(message.role)}, {"content", message.content}});
    }
    return json{{"model", request.model.empty() ? default_model : request.model},
                {"messages", std::move(messages)},
                {"temperature", request.temperature},
                {"max_tokens", request.max_tokens}};
}

}  // namespace

std::unique_ptr<HttpTransport> make_httplib_transport(const HttpBackendConfig& config) {
    if (config.endpoint.empty()) {
        throw ConfigError("http backend requires an endpoint URL");
    }
    return std::make_unique<HttplibTransport>(config);
}

HttpChatBackend::HttpChatBackend(HttpBackendConfig config,
                                 std::shared_ptr<ConcurrencyLimiter> limiter,
                                 std::unique_ptr<HttpTransport> transport)
    : config_(std::move(config)),
      limiter_(std::move(limiter)),
      transport_(transport ? std::move(transport) : make_httplib_transport(config_)) {}

std::string HttpChatBackend::chat(const ChatRequest& request) {
    std::optional<ConcurrencyLimiter::Ticket> ticket;
    if (limiter_) ticket.emplace(limiter_->acquire());

    const std::string body = chat_request_to_json(request, config_.model).dump();
    TransportResponse response =
        post_with_retries(*transport_, "/chat/completions", body, config_.retry, stats_);
    try {
        json payload = json::parse(response.body);
        const auto& choices = payload.at("choices");
        if (choices.empty()) {
            throw BackendError("chat response contained no choices");
        }
        return choices.at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(std::string("malformed chat response: ") + e.what());
    }
}

HttpEmbeddingBackend::HttpEmbeddingBackend(HttpBackendConfig config,
                                           std::shared_ptr<ConcurrencyLimiter> limiter,
                                           std::unique_ptr<HttpTransport> transport)
    : config_(std::move(config)),
      limiter_(std::move(limiter)),
      transport_(transport ? std::move(transport) : make_httplib_transport(config_)) {}

std::vector<SemanticVector> HttpEmbeddingBackend::embed_batch(
    const std::vector<std::string>& texts) {
    std::optional<ConcurrencyLimiter::Ticket> ticket;
    if (limiter_) ticket.emplace(limiter_->acquire());

    const std::string body = json{{"model", config_.model}, {"input", texts}}.dump();
    TransportResponse response =
        post_with_retries(*transport_, "/embeddings", body, config_.retry, stats_);
    try {
        json payload = json::parse(response.body);
        const auto& data = payload.at("data");
        if (data.size() != texts.size()) {
            throw BackendError("embedding response has " + std::to_string(data.size()) +
                               " entries for " + std::to_string(texts.size()) + " inputs");
        }
        std::vector<SemanticVector> vectors(texts.size());
        for (const auto& entry : data) {
            const auto index = entry.at("index").get<std::size_t>();
            if (index >= vectors.size()) {
                throw BackendError("embedding response index " + std::to_string(index) +
                                   " out of range");
            }
            SemanticVector v = entry.at("embedding").get<SemanticVector>();
            if (v.size() != config_.dimension) {
                throw DimensionError("embedding at index " + std::to_string(index) + " has " +
                                     std::to_string(v.size()) + " values, expected " +
                                     std::to_string(config_.dimension));
            }
            vectors[index] = std::move(v);
        }
        return vectors;
    } catch (const json::exception& e) {
        throw BackendError(std::string("malformed embedding response: ") + e.what());
    }
}

// ---- mocks ----

std::string MockChatBackend::prompt_key(const ChatRequest& request) {
    std::string key;
    for (const auto& message : request.messages) {
        if (!key.empty()) key += '\n';
        key += message.content;
    }
    return key;
}

void MockChatBackend::set_default_reply(std::string reply) {
    std::lock_guard lock(mutex_);
    default_reply_ = std::move(reply);
}

void MockChatBackend::add_canned(const std::string& prompt, std::string reply) {
    std::lock_guard lock(mutex_);
    canned_[prompt] = std::move(reply);
}

void MockChatBackend::fail_times(int n) {
    fail_remaining_.store(n);
}

void MockChatBackend::fail_when_contains(std::string needle) {
    std::lock_guard lock(mutex_);
    fail_needle_ = std::move(needle);
}

std::string MockChatBackend::chat(const ChatRequest& request) {
    calls_.fetch_add(1);
    const std::string key = prompt_key(request);
    if (fail_remaining_.load() > 0) {
        fail_remaining_.fetch_sub(1);
        throw BackendError("mock backend: scripted failure");
    }
    std::lock_guard lock(mutex_);
    if (!fail_needle_.empty() && key.find(fail_needle_) != std::string::npos) {
        throw BackendError("mock backend: scripted failure for matching prompt");
    }
    auto it = canned_.find(key);
    if (it != canned_.end()) return it->second;
    if (default_reply_) return *default_reply_;
    throw BackendError("mock backend: no canned reply for prompt");
}

std::string MockEmotionScorer::chat(const ChatRequest& request) {
    calls_.fetch_add(1);
    const std::string key = MockChatBackend::prompt_key(request);
    static constexpr const char* kNames[] = {"joy",     "acceptance", "fear",  "surprise",
                                             "sadness", "disgust",    "anger", "anticipation"};
    std::string reply;
    for (int i = 0; i < 8; ++i) {
        const std::uint64_t h = detail::fnv1a64(key, 0x100001b3ULL + static_cast<unsigned>(i));
        if (i > 0) reply += ", ";
        reply += kNames[i];
        reply += ':';
        reply += std::to_string(1 + static_cast<int>(h % 10));
    }
    return reply;
}

std::string MockGenerator::chat(const ChatRequest& request) {
    calls_.fetch_add(1);
    const std::uint64_t h = detail::fnv1a64(MockChatBackend::prompt_key(request));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "mock-reply-%08llx",
                  static_cast<unsigned long long>(h & 0xffffffffULL));
    return buf;
}

std::string MockJudge::chat(const ChatRequest& request) {
    calls_.fetch_add(1);
    const std::uint64_t h = detail::fnv1a64(MockChatBackend::prompt_key(request));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", static_cast<double>(h % 1001) / 1000.0);
    return buf;
}

}  // namespace emomem
