#include "emomem/retrieval.hpp"

#include <algorithm>
#include <limits>

#include "emomem/errors.hpp"

namespace emomem {

StrategyVariant parse_strategy_variant(const std::string& name) {
    if (name == "semantic-only") return StrategyVariant::SemanticOnly;
    if (name == "c-a") return StrategyVariant::CombineAdd;
    if (name == "c-m") return StrategyVariant::CombineMul;
    if (name == "s-s") return StrategyVariant::SeqSemanticFirst;
    if (name == "s-e") return StrategyVariant::SeqEmotionFirst;
    throw ConfigError("unknown strategy '" + name +
                      "' (expected semantic-only, c-a, c-m, s-s or s-e)");
}

std::string strategy_flag_name(StrategyVariant variant) {
    switch (variant) {
        case StrategyVariant::SemanticOnly: return "semantic-only";
        case StrategyVariant::CombineAdd: return "c-a";
        case StrategyVariant::CombineMul: return "c-m";
        case StrategyVariant::SeqSemanticFirst: return "s-s";
        case StrategyVariant::SeqEmotionFirst: return "s-e";
    }
    return "semantic-only";
}

std::string strategy_display_name(StrategyVariant variant) {
    switch (variant) {
        case StrategyVariant::SemanticOnly: return "Ordinary RAG";
        case StrategyVariant::CombineAdd: return "Emotional RAG (C-A)";
        case StrategyVariant::CombineMul: return "Emotional RAG (C-M)";
        case StrategyVariant::SeqSemanticFirst: return "Emotional RAG (S-S)";
        case StrategyVariant::SeqEmotionFirst: return "Emotional RAG (S-E)";
    }
    return "Ordinary RAG";
}

void RetrievalStrategy::validate(int k) const {
    if (k < 1) {
        throw Error("retrieval k must be at least 1, got " + std::to_string(k));
    }
    if (weight < 0.0 || weight > 1.0) {
        throw Error("combine-add weight must lie in [0, 1], got " + std::to_string(weight));
    }
    const bool sequential = variant == StrategyVariant::SeqSemanticFirst ||
                            variant == StrategyVariant::SeqEmotionFirst;
    if (sequential && pool_size < k) {
        throw Error("sequential pool_size (" + std::to_string(pool_size) +
                    ") must be at least k (" + std::to_string(k) + ")");
    }
}

Query encode_query(const std::string& text, EmbeddingBackend& embedder, ChatBackend& scorer,
                   const PromptTemplate& emotion_prompt, int reprompt_budget) {
    if (text.empty()) {
        throw Error("encode_query: text must be non-empty");
    }
    Query query;
    query.text = text;
    query.semantic = embed(text, embedder);
    query.emotion = score_emotion(text, scorer, emotion_prompt, reprompt_budget);
    return query;
}

double combine_add(double s_norm, double e_norm, double weight) {
    return weight * s_norm + (1.0 - weight) * e_norm;
}

double combine_mul(double s_norm, double e_norm, double epsilon) {
    return (s_norm + epsilon) * (e_norm + epsilon);
}

std::vector<double> min_max_normalize(const std::vector<double>& values) {
    std::vector<double> out(values.size(), 0.0);
    if (values.empty()) return out;
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi == lo) return out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = (values[i] - lo) / (hi - lo);
    }
    return out;
}

namespace {

struct Ranked {
    const std::string* id;
    double score;
};

// Ascending score, ties broken by ascending id so results are independent
// of fragment order in the unit.
void rank(std::vector<Ranked>& items) {
    std::sort(items.begin(), items.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score < b.score;
        return *a.id < *b.id;
    });
}

}  // namespace

std::vector<std::string> sequential_rerank(
    const std::unordered_map<std::string, double>& primary_scores,
    const std::unordered_map<std::string, double>& secondary_scores, int pool_size, int k) {
    if (k < 1) {
        throw Error("sequential_rerank: k must be at least 1");
    }
    if (pool_size < k) {
        throw Error("sequential_rerank: pool_size must be at least k");
    }
    if (primary_scores.size() != secondary_scores.size()) {
        throw Error("sequential_rerank: score maps cover different fragment sets");
    }
    std::vector<Ranked> stage1;
    stage1.reserve(primary_scores.size());
    for (const auto& [id, score] : primary_scores) {
        if (!secondary_scores.count(id)) {
            throw Error("sequential_rerank: fragment '" + id + "' missing a secondary score");
        }
        stage1.push_back({&id, score});
    }
    rank(stage1);
    if (stage1.size() > static_cast<std::size_t>(pool_size)) {
        stage1.resize(static_cast<std::size_t>(pool_size));
    }
    std::vector<Ranked> stage2;
    stage2.reserve(stage1.size());
    for (const auto& item : stage1) {
        stage2.push_back({item.id, secondary_scores.at(*item.id)});
    }
    rank(stage2);
    if (stage2.size() > static_cast<std::size_t>(k)) {
        stage2.resize(static_cast<std::size_t>(k));
    }
    std::vector<std::string> out;
    out.reserve(stage2.size());
    for (const auto& item : stage2) out.push_back(*item.id);
    return out;
}

std::vector<ScoredFragment> retrieve(const Query& query, const MemoryUnit& unit,
                                     const RetrievalStrategy& strategy, int k) {
    strategy.validate(k);

    std::vector<std::string> uncached;
    for (const auto& fragment : unit.fragments) {
        if (!fragment.fully_cached()) uncached.push_back(fragment.id);
    }
    if (!uncached.empty()) {
        throw UncachedVectorError(std::move(uncached));
    }

    const std::size_t n = unit.size();
    if (n == 0) return {};

    std::vector<ScoredFragment> scored(n);
    std::vector<double> semantic(n), emotional(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& fragment = unit.fragments[i];
        semantic[i] = semantic_distance(query.semantic, *fragment.semantic, strategy.metric);
        emotional[i] = emotion_distance(query.emotion, *fragment.emotion);
        scored[i].fragment_id = fragment.id;
        scored[i].semantic_score = semantic[i];
        scored[i].emotional_score = emotional[i];
    }

    switch (strategy.variant) {
        case StrategyVariant::SemanticOnly:
            for (std::size_t i = 0; i < n; ++i) scored[i].final_score = semantic[i];
            break;
        case StrategyVariant::CombineAdd:
        case StrategyVariant::CombineMul: {
            const std::vector<double> s = strategy.normalize ? min_max_normalize(semantic)
                                                             : semantic;
            const std::vector<double> e = strategy.normalize ? min_max_normalize(emotional)
                                                             : emotional;
            for (std::size_t i = 0; i < n; ++i) {
                scored[i].final_score = strategy.variant == StrategyVariant::CombineAdd
                                            ? combine_add(s[i], e[i], strategy.weight)
                                            : combine_mul(s[i], e[i]);
            }
            break;
        }
        case StrategyVariant::SeqSemanticFirst:
        case StrategyVariant::SeqEmotionFirst: {
            const bool semantic_first = strategy.variant == StrategyVariant::SeqSemanticFirst;
            std::unordered_map<std::string, double> primary, secondary;
            primary.reserve(n);
            secondary.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                primary[scored[i].fragment_id] = semantic_first ? semantic[i] : emotional[i];
                secondary[scored[i].fragment_id] = semantic_first ? emotional[i] : semantic[i];
            }
            const auto ids = sequential_rerank(primary, secondary, strategy.pool_size, k);
            std::unordered_map<std::string, std::size_t> index;
            index.reserve(n);
            for (std::size_t i = 0; i < n; ++i) index[scored[i].fragment_id] = i;
            std::vector<ScoredFragment> out;
            out.reserve(ids.size());
            for (const auto& id : ids) {
                ScoredFragment item = scored[index.at(id)];
                item.final_score = secondary.at(id);
                out.push_back(std::move(item));
            }
            return out;
        }
    }

    std::sort(scored.begin(), scored.end(), [](const ScoredFragment& a, const ScoredFragment& b) {
        if (a.final_score != b.final_score) return a.final_score < b.final_score;
        return a.fragment_id < b.fragment_id;
    });
    if (scored.size() > static_cast<std::size_t>(k)) {
        scored.resize(static_cast<std::size_t>(k));
    }
    return scored;
}

}  // namespace emomem
