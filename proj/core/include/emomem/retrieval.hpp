#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "emomem/embedding.hpp"
#include "emomem/emotion.hpp"
#include "emomem/memory_store.hpp"

namespace emomem {

// semantic-only is the ordinary-RAG baseline; c-a/c-m fuse both distances
// at once, s-s/s-e shortlist by one distance and re-rank by the other.
enum class StrategyVariant {
    SemanticOnly,
    CombineAdd,
    CombineMul,
    SeqSemanticFirst,
    SeqEmotionFirst,
};

StrategyVariant parse_strategy_variant(const std::string& name);
std::string strategy_flag_name(StrategyVariant variant);   // "semantic-only", "c-a", ...
std::string strategy_display_name(StrategyVariant variant);

inline constexpr int kDefaultTopK = 10;
inline constexpr double kCombineMulEpsilon = 0.01;

struct RetrievalStrategy {
    StrategyVariant variant = StrategyVariant::SemanticOnly;
    int pool_size = 3 * kDefaultTopK;  // sequential variants only
    double weight = 0.5;               // combine-add only
    Metric metric = Metric::Euclidean;
    bool normalize = true;  // min-max normalize distances before c-a/c-m fusion

    void validate(int k) const;
};

// A query encoded into both vector spaces.
struct Query {
    std::string text;
    SemanticVector semantic;
    EmotionVector emotion;
};

// A fragment with its raw semantic and emotional distances plus the final
// fused score the active strategy ranked it by.
struct ScoredFragment {
    std::string fragment_id;
    double semantic_score = 0.0;
    double emotional_score = 0.0;
    double final_score = 0.0;
};

Query encode_query(const std::string& text, EmbeddingBackend& embedder, ChatBackend& scorer,
                   const PromptTemplate& emotion_prompt,
                   int reprompt_budget = kDefaultRepromptBudget);

// Returns the min(k, n) fragments with the smallest final scores, ascending,
// ties broken by ascending fragment id. Requires every fragment to carry
// both cached vectors.
std::vector<ScoredFragment> retrieve(const Query& query, const MemoryUnit& unit,
                                     const RetrievalStrategy& strategy, int k = kDefaultTopK);

// Weighted sum of normalized distances.
double combine_add(double s_norm, double e_norm, double weight);

// Product of normalized distances, each shifted by epsilon so a zero
// distance cannot annihilate the other signal.
double combine_mul(double s_norm, double e_norm, double epsilon = kCombineMulEpsilon);

// Shortlists the pool_size ids with the smallest primary distance, reorders
// them by ascending secondary distance, and returns the first k.
std::vector<std::string> sequential_rerank(
    const std::unordered_map<std::string, double>& primary_scores,
    const std::unordered_map<std::string, double>& secondary_scores, int pool_size, int k);

// Maps values to [0,1] via (v - min) / (max - min); a degenerate family
// (all values equal) maps to all zeros.
std::vector<double> min_max_normalize(const std::vector<double>& values);

}  // namespace emomem
