#pragma once

#include <atomic>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "emomem/embedding.hpp"
#include "emomem/errors.hpp"

namespace emomem {

enum class Role { System, User, Assistant };

std::string role_name(Role role);

struct ChatMessage {
    Role role = Role::User;
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 1024;
    std::string model;  // empty means "use the backend's configured model"
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // Returns the assistant's reply text.
    virtual std::string chat(const ChatRequest& request) = 0;
};

// Validates the request invariants, then delegates to the backend.
std::string chat(const ChatRequest& request, ChatBackend& backend);

// Order-preserving batched embedding with dimension validation.
std::vector<SemanticVector> embed_batch(const std::vector<std::string>& texts,
                                        EmbeddingBackend& backend);

// Bounds concurrent in-flight backend calls and records the high-water
// mark, which the stress tests observe.
class ConcurrencyLimiter {
public:
    explicit ConcurrencyLimiter(int max_in_flight);

    class Ticket {
    public:
        explicit Ticket(ConcurrencyLimiter* limiter) : limiter_(limiter) {}
        ~Ticket();
        Ticket(Ticket&& other) noexcept : limiter_(other.limiter_) { other.limiter_ = nullptr; }
        Ticket(const Ticket&) = delete;
        Ticket& operator=(const Ticket&) = delete;
        Ticket& operator=(Ticket&&) = delete;

    private:
        ConcurrencyLimiter* limiter_;
    };

    Ticket acquire();
    int limit() const { return limit_; }
    int high_water() const;

private:
    friend class Ticket;
    void release();

    int limit_;
    int in_flight_ = 0;
    int high_water_ = 0;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
};

// Only transport failures and HTTP 5xx/429 are retried; total attempts are
// 1 + max_retries with bounded exponential backoff.
struct RetryPolicy {
    int max_retries = 3;
    int backoff_base_ms = 200;
    int backoff_cap_ms = 5000;
};

struct BackendStats {
    std::atomic<long> requests{0};
    std::atomic<long> retries{0};
};

struct TransportResponse {
    int status = 0;
    std::string body;
};

// Connection-level failure below the HTTP layer; retryable.
class TransportError : public BackendError {
public:
    TransportError(const std::string& what, bool timed_out)
        : BackendError(what), timed_out_(timed_out) {}
    bool timed_out() const { return timed_out_; }

private:
    bool timed_out_;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    // Throws TransportError when no HTTP response was obtained.
    virtual TransportResponse post_json(const std::string& path, const std::string& body) = 0;
};

struct HttpBackendConfig {
    std::string endpoint;  // base URL, e.g. http://host:8000/v1
    std::string model;
    std::string api_key;   // bearer token; read from EMOMEM_API_KEY by callers
    double timeout_seconds = 30.0;
    std::size_t dimension = 768;  // embeddings only
    RetryPolicy retry;
};

std::unique_ptr<HttpTransport> make_httplib_transport(const HttpBackendConfig& config);

// OpenAI-compatible /chat/completions client.
class HttpChatBackend final : public ChatBackend {
public:
    HttpChatBackend(HttpBackendConfig config,
                    std::shared_ptr<ConcurrencyLimiter> limiter = nullptr,
                    std::unique_ptr<HttpTransport> transport = nullptr);

    std::string chat(const ChatRequest& request) override;
    const BackendStats& stats() const { return stats_; }

private:
    HttpBackendConfig config_;
    std::shared_ptr<ConcurrencyLimiter> limiter_;
    std::unique_ptr<HttpTransport> transport_;
    BackendStats stats_;
};

// OpenAI-compatible /embeddings client.
class HttpEmbeddingBackend final : public EmbeddingBackend {
public:
    HttpEmbeddingBackend(HttpBackendConfig config,
                         std::shared_ptr<ConcurrencyLimiter> limiter = nullptr,
                         std::unique_ptr<HttpTransport> transport = nullptr);

    std::size_t dimension() const override { return config_.dimension; }
    std::vector<SemanticVector> embed_batch(const std::vector<std::string>& texts) override;
    const BackendStats& stats() const { return stats_; }

private:
    HttpBackendConfig config_;
    std::shared_ptr<ConcurrencyLimiter> limiter_;
    std::unique_ptr<HttpTransport> transport_;
    BackendStats stats_;
};

// ---- deterministic offline backends ----

// Replays canned replies keyed on the full prompt text; supports scripted
// failures for retry and partial-failure tests.
class MockChatBackend : public ChatBackend {
public:
    void set_default_reply(std::string reply);
    void add_canned(const std::string& prompt, std::string reply);
    // The next `n` calls throw BackendError.
    void fail_times(int n);
    // Calls whose prompt contains `needle` throw BackendError.
    void fail_when_contains(std::string needle);

    std::string chat(const ChatRequest& request) override;
    long calls() const { return calls_.load(); }

    static std::string prompt_key(const ChatRequest& request);

private:
    std::map<std::string, std::string> canned_;
    std::optional<std::string> default_reply_;
    std::string fail_needle_;
    std::atomic<int> fail_remaining_{0};
    std::atomic<long> calls_{0};
    std::mutex mutex_;
};

// Replies with a well-formed eight-emotion score line derived from the
// prompt hash; a fixed prompt always yields the same scores.
class MockEmotionScorer final : public ChatBackend {
public:
    std::string chat(const ChatRequest& request) override;
    long calls() const { return calls_.load(); }

private:
    std::atomic<long> calls_{0};
};

// Replies with a short deterministic pseudo-response derived from the prompt.
class MockGenerator final : public ChatBackend {
public:
    std::string chat(const ChatRequest& request) override;
    long calls() const { return calls_.load(); }

private:
    std::atomic<long> calls_{0};
};

// Replies with a number in [0,1] derived from the prompt hash.
class MockJudge final : public ChatBackend {
public:
    std::string chat(const ChatRequest& request) override;
    long calls() const { return calls_.load(); }

private:
    std::atomic<long> calls_{0};
};

}  // namespace emomem
