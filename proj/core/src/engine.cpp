#include "emomem/engine.hpp"

#include <cstdlib>

#include "emomem/errors.hpp"
#include "emomem/prompt_builders.hpp"

namespace emomem {

namespace {

std::string api_key_from_env() {
    const char* key = std::getenv("EMOMEM_API_KEY");
    return key ? key : "";
}

HttpBackendConfig to_http_config(const BackendRoleConfig& role) {
    HttpBackendConfig config;
    config.endpoint = role.endpoint;
    config.model = role.model;
    config.api_key = api_key_from_env();
    config.timeout_seconds = role.timeout_seconds;
    config.dimension = role.dimension;
    config.retry.max_retries = role.max_retries;
    return config;
}

std::unique_ptr<ChatBackend> make_chat_backend(const BackendRoleConfig& role,
                                               const char* purpose,
                                               std::shared_ptr<ConcurrencyLimiter> limiter) {
    if (role.kind == "http") {
        return std::make_unique<HttpChatBackend>(to_http_config(role), std::move(limiter));
    }
    // Deterministic offline backends, one flavor per role.
    const std::string p = purpose;
    if (p == "scorer") return std::make_unique<MockEmotionScorer>();
    if (p == "judge") return std::make_unique<MockJudge>();
    return std::make_unique<MockGenerator>();
}

}  // namespace

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
    config_.validate();
    limiter_ = std::make_shared<ConcurrencyLimiter>(config_.concurrency);

    if (config_.embedder.kind == "http") {
        embedder_ =
            std::make_unique<HttpEmbeddingBackend>(to_http_config(config_.embedder), limiter_);
    } else {
        embedder_ = std::make_unique<HashingEmbedder>(config_.embedder.dimension);
    }
    scorer_ = make_chat_backend(config_.scorer, "scorer", limiter_);
    generator_ = make_chat_backend(config_.generator, "generator", limiter_);
    judge_ = make_chat_backend(config_.judge, "judge", limiter_);

    templates_ = TemplateRegistry::load_dir(config_.templates_dir / config_.language);
    for (const char* key : {kGenerationTemplate, kEmotionScoringTemplate, kAssessmentTemplate,
                            kNoMemoryNoticeTemplate}) {
        templates_.get(key);  // fail fast when a template file is missing
    }

    profiles_ = load_profiles(config_.profiles_path);
    memory_ = load_memory(config_.memory_path);
    for (const auto& profile : profiles_) {
        units_.emplace_back(profile.character_id, memory_.for_character(profile.character_id));
    }
}

const CharacterProfile& Engine::profile_for(const std::string& character_id) const {
    for (const auto& profile : profiles_) {
        if (profile.character_id == character_id) return profile;
    }
    throw UnknownCharacterError(character_id);
}

const MemoryUnit& Engine::unit_for(const std::string& character_id) const {
    for (const auto& [id, unit] : units_) {
        if (id == character_id) return unit;
    }
    throw UnknownCharacterError(character_id);
}

std::vector<ScoredFragment> Engine::retrieve_for(const std::string& character_id,
                                                 const std::string& query_text,
                                                 const RetrievalStrategy& strategy, int k) {
    const MemoryUnit& unit = unit_for(character_id);
    // Check the cache before encoding so a stale memory file fails fast
    // instead of spending backend calls first.
    std::vector<std::string> uncached;
    for (const auto& fragment : unit.fragments) {
        if (!fragment.fully_cached()) uncached.push_back(fragment.id);
    }
    if (!uncached.empty()) {
        throw UncachedVectorError(std::move(uncached));
    }
    const Query query = encode_query(query_text, *embedder_, *scorer_,
                                     templates_.get(kEmotionScoringTemplate));
    return retrieve(query, unit, strategy, k);
}

Engine::ChatOutcome Engine::chat_for(const std::string& character_id,
                                     const std::string& query_text,
                                     const RetrievalStrategy& strategy, int k) {
    const CharacterProfile& profile = profile_for(character_id);
    const MemoryUnit& unit = unit_for(character_id);

    ChatOutcome outcome;
    outcome.retrieved = retrieve_for(character_id, query_text, strategy, k);
    std::vector<MemoryFragment> memories;
    memories.reserve(outcome.retrieved.size());
    for (const auto& scored : outcome.retrieved) {
        outcome.fragment_ids.push_back(scored.fragment_id);
        memories.push_back(*unit.find(scored.fragment_id));
    }
    ChatRequest request = build_generation_prompt(profile, memories, query_text, templates_);
    request.temperature = config_.temperature;
    outcome.reply = chat(request, *generator_);
    return outcome;
}

EvalBackends Engine::eval_backends() {
    return EvalBackends{*embedder_, *scorer_, *generator_, *judge_};
}

}  // namespace emomem
