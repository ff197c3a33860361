#include <benchmark/benchmark.h>

#include <random>

#include "emomem/embedding.hpp"
#include "emomem/emotion.hpp"
#include "emomem/retrieval.hpp"

using namespace emomem;

namespace {

EmotionVector random_emotion(std::mt19937& rng) {
    std::uniform_int_distribution<int> dist(1, 10);
    EmotionVector v;
    for (auto& x : v.values) x = dist(rng);
    return v;
}

SemanticVector random_semantic(std::mt19937& rng, std::size_t dim) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    SemanticVector v(dim);
    for (auto& x : v) x = dist(rng);
    return v;
}

MemoryUnit make_unit(std::size_t n, std::size_t dim) {
    std::mt19937 rng(12345);
    MemoryUnit unit;
    for (std::size_t i = 0; i < n; ++i) {
        MemoryFragment f;
        f.id = "frag-" + std::to_string(i);
        f.character_id = "bench";
        f.text = "benchmark fragment";
        f.semantic = random_semantic(rng, dim);
        f.emotion = random_emotion(rng);
        unit.fragments.push_back(std::move(f));
    }
    return unit;
}

Query make_query(std::size_t dim) {
    std::mt19937 rng(999);
    Query query;
    query.text = "bench";
    query.semantic = random_semantic(rng, dim);
    query.emotion = random_emotion(rng);
    return query;
}

void BM_Retrieve(benchmark::State& state, StrategyVariant variant) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto dim = static_cast<std::size_t>(state.range(1));
    const MemoryUnit unit = make_unit(n, dim);
    const Query query = make_query(dim);
    RetrievalStrategy strategy;
    strategy.variant = variant;
    for (auto _ : state) {
        benchmark::DoNotOptimize(retrieve(query, unit, strategy, kDefaultTopK));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

// Unit sizes bracket the reference datasets (113 / 337 / 1000 fragments).
#define RETRIEVE_BENCH(name, variant)                                     \
    BENCHMARK_CAPTURE(BM_Retrieve, name, variant)                         \
        ->Args({113, 768})                                                \
        ->Args({337, 768})                                                \
        ->Args({1000, 768})

RETRIEVE_BENCH(semantic_only, StrategyVariant::SemanticOnly);
RETRIEVE_BENCH(combine_add, StrategyVariant::CombineAdd);
RETRIEVE_BENCH(combine_mul, StrategyVariant::CombineMul);
RETRIEVE_BENCH(seq_semantic_first, StrategyVariant::SeqSemanticFirst);
RETRIEVE_BENCH(seq_emotion_first, StrategyVariant::SeqEmotionFirst);

void BM_EmotionDistance(benchmark::State& state) {
    std::mt19937 rng(7);
    const EmotionVector a = random_emotion(rng);
    const EmotionVector b = random_emotion(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(emotion_distance(a, b));
    }
}
BENCHMARK(BM_EmotionDistance);

void BM_SemanticDistance(benchmark::State& state) {
    std::mt19937 rng(7);
    const auto dim = static_cast<std::size_t>(state.range(0));
    const SemanticVector a = random_semantic(rng, dim);
    const SemanticVector b = random_semantic(rng, dim);
    for (auto _ : state) {
        benchmark::DoNotOptimize(semantic_distance(a, b));
    }
}
BENCHMARK(BM_SemanticDistance)->Arg(8)->Arg(768);

void BM_HashingEmbed(benchmark::State& state) {
    HashingEmbedder embedder(static_cast<std::size_t>(state.range(0)));
    const std::string text =
        "Q: What do you remember about the storm last winter?\n"
        "A: The waves were taller than the mast and we sang through the night.";
    for (auto _ : state) {
        benchmark::DoNotOptimize(embed(text, embedder));
    }
    state.SetBytesProcessed(state.iterations() * static_cast<long>(text.size()));
}
BENCHMARK(BM_HashingEmbed)->Arg(8)->Arg(768);

}  // namespace

BENCHMARK_MAIN();
