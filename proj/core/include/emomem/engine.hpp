#pragma once

#include <memory>
#include <string>
#include <vector>

#include "emomem/config.hpp"
#include "emomem/evaluation.hpp"
#include "emomem/memory_store.hpp"
#include "emomem/retrieval.hpp"

namespace emomem {

// Wires the configured backends, templates, memory, and profiles together.
// The CLI and the HTTP service both run on this, so they cannot disagree.
class Engine {
public:
    explicit Engine(EngineConfig config);

    const EngineConfig& config() const { return config_; }
    const TemplateRegistry& templates() const { return templates_; }
    const std::vector<CharacterProfile>& profiles() const { return profiles_; }
    const MemoryUnit& memory() const { return memory_; }

    // Throws UnknownCharacterError.
    const CharacterProfile& profile_for(const std::string& character_id) const;
    const MemoryUnit& unit_for(const std::string& character_id) const;

    std::vector<ScoredFragment> retrieve_for(const std::string& character_id,
                                             const std::string& query_text,
                                             const RetrievalStrategy& strategy, int k);

    struct ChatOutcome {
        std::string reply;
        std::vector<std::string> fragment_ids;
        std::vector<ScoredFragment> retrieved;
    };
    ChatOutcome chat_for(const std::string& character_id, const std::string& query_text,
                         const RetrievalStrategy& strategy, int k);

    EmbeddingBackend& embedder() { return *embedder_; }
    ChatBackend& scorer() { return *scorer_; }
    ChatBackend& generator() { return *generator_; }
    ChatBackend& judge() { return *judge_; }
    EvalBackends eval_backends();

private:
    EngineConfig config_;
    std::shared_ptr<ConcurrencyLimiter> limiter_;
    std::unique_ptr<EmbeddingBackend> embedder_;
    std::unique_ptr<ChatBackend> scorer_;
    std::unique_ptr<ChatBackend> generator_;
    std::unique_ptr<ChatBackend> judge_;
    TemplateRegistry templates_;
    std::vector<CharacterProfile> profiles_;
    MemoryUnit memory_;
    // Per-character snapshots, filtered once at startup.
    std::vector<std::pair<std::string, MemoryUnit>> units_;
};

}  // namespace emomem
