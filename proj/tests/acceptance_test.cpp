// Acceptance suite: one test per release criterion, run by ctest as the
// `acceptance` target. Each test prints its own pass/fail line via gtest.
#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <random>
#include <set>

#include "emomem/config.hpp"
#include "emomem/engine.hpp"
#include "emomem/errors.hpp"
#include "emomem/evaluation.hpp"
#include "emomem/memory_store.hpp"
#include "emomem/prompt_builders.hpp"
#include "emomem/retrieval.hpp"
#include "fixture_workspace.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace emomem;
using Clock = std::chrono::steady_clock;

namespace {

std::vector<std::string> ids_of(const std::vector<ScoredFragment>& results) {
    std::vector<std::string> ids;
    for (const auto& r : results) ids.push_back(r.fragment_id);
    return ids;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

// 200 randomized units (n <= 50, dim-8 vectors), all five strategies:
// retrieve() must match the independent brute-force sorter exactly,
// including tie-breaks, in under 10 seconds.
TEST(Acceptance, RetrievalMatchesBruteForceOn200RandomUnits) {
    const auto start = Clock::now();
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> size_dist(1, 50);
    std::uniform_int_distribution<int> k_dist(1, 15);
    std::uniform_real_distribution<double> weight_dist(0.0, 1.0);

    const StrategyVariant variants[] = {
        StrategyVariant::SemanticOnly, StrategyVariant::CombineAdd, StrategyVariant::CombineMul,
        StrategyVariant::SeqSemanticFirst, StrategyVariant::SeqEmotionFirst};

    for (int unit_index = 0; unit_index < 200; ++unit_index) {
        const std::size_t n = static_cast<std::size_t>(size_dist(rng));
        const MemoryUnit unit = testutil::random_unit(rng, n, 8);
        Query query;
        query.text = "q";
        query.semantic = testutil::random_semantic(rng, 8);
        query.emotion = testutil::random_emotion(rng);
        const int k = k_dist(rng);
        for (const auto variant : variants) {
            RetrievalStrategy strategy;
            strategy.variant = variant;
            strategy.weight = weight_dist(rng);
            strategy.pool_size = std::uniform_int_distribution<int>(
                k, std::max(k, static_cast<int>(n) + 10))(rng);
            const auto got = ids_of(retrieve(query, unit, strategy, k));
            const auto expected = oracle::reference_retrieve(query, unit, strategy, k);
            ASSERT_EQ(got, expected) << "unit " << unit_index << ", strategy "
                                     << strategy_flag_name(variant);
        }
    }
    EXPECT_LT(seconds_since(start), 10.0);
}

// emotion_distance and semantic_distance agree with hand-coded oracles to
// 1e-9 on 1,000 random pairs; symmetry and scale invariance hold to 1e-12.
TEST(Acceptance, DistancesMatchIndependentOracles) {
    std::mt19937 rng(2025);
    for (int i = 0; i < 1000; ++i) {
        const auto ea = testutil::random_emotion(rng);
        const auto eb = testutil::random_emotion(rng);
        EXPECT_NEAR(emotion_distance(ea, eb),
                    oracle::cosine_distance_ints(ea.values, eb.values), 1e-9);
        EXPECT_NEAR(emotion_distance(ea, eb), emotion_distance(eb, ea), 1e-12);

        const auto sa = testutil::random_semantic(rng, 8);
        const auto sb = testutil::random_semantic(rng, 8);
        EXPECT_NEAR(semantic_distance(sa, sb), oracle::euclidean(sa, sb), 1e-9);
        EXPECT_NEAR(semantic_distance(sa, sb, Metric::Cosine),
                    oracle::cosine_distance_reals(sa, sb), 1e-9);
    }
    // Integer scale invariance at the cosine level.
    std::uniform_int_distribution<int> small(1, 5);
    for (int i = 0; i < 200; ++i) {
        EmotionVector a;
        for (auto& x : a.values) x = small(rng);
        EmotionVector doubled;
        for (std::size_t j = 0; j < a.values.size(); ++j) doubled.values[j] = 2 * a.values[j];
        EXPECT_NEAR(emotion_distance(a, doubled), 0.0, 1e-12);
        EXPECT_NEAR(emotion_distance(a, a), 0.0, 1e-12);
    }
}

// With pool_size = n, s-s equals emotion-only top-k and s-e equals
// semantic-only top-k; the semantic-only ranking is bit-identical under any
// emotion-vector perturbation.
TEST(Acceptance, SequentialLimitsAndSemanticOnlyInvariance) {
    std::mt19937 rng(2026);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 30;
        const int k = 10;
        const MemoryUnit unit = testutil::random_unit(rng, n, 8);
        Query query;
        query.text = "q";
        query.semantic = testutil::random_semantic(rng, 8);
        query.emotion = testutil::random_emotion(rng);

        RetrievalStrategy ss;
        ss.variant = StrategyVariant::SeqSemanticFirst;
        ss.pool_size = static_cast<int>(n);
        std::vector<std::pair<double, std::string>> by_emotion;
        for (const auto& f : unit.fragments) {
            by_emotion.emplace_back(
                oracle::cosine_distance_ints(query.emotion.values, f.emotion->values), f.id);
        }
        std::sort(by_emotion.begin(), by_emotion.end());
        std::vector<std::string> emotion_only;
        for (int i = 0; i < k; ++i) emotion_only.push_back(by_emotion[i].second);
        EXPECT_EQ(ids_of(retrieve(query, unit, ss, k)), emotion_only);

        RetrievalStrategy se;
        se.variant = StrategyVariant::SeqEmotionFirst;
        se.pool_size = static_cast<int>(n);
        RetrievalStrategy semantic_only;
        EXPECT_EQ(ids_of(retrieve(query, unit, se, k)),
                  ids_of(retrieve(query, unit, semantic_only, k)));

        const auto baseline = ids_of(retrieve(query, unit, semantic_only, k));
        MemoryUnit perturbed = unit;
        for (auto& fragment : perturbed.fragments) {
            fragment.emotion = testutil::random_emotion(rng);
        }
        Query perturbed_query = query;
        perturbed_query.emotion = testutil::random_emotion(rng);
        EXPECT_EQ(ids_of(retrieve(perturbed_query, perturbed, semantic_only, k)), baseline);
    }
}

// The default configuration returns exactly 10 fragments whenever the unit
// has at least 10, including at the reference memory size of 337.
TEST(Acceptance, DefaultSelectionReturnsTopTen) {
    std::mt19937 rng(2027);
    for (const std::size_t n : {10u, 11u, 113u, 337u}) {
        const MemoryUnit unit = testutil::random_unit(rng, n, 8);
        Query query;
        query.text = "q";
        query.semantic = testutil::random_semantic(rng, 8);
        query.emotion = testutil::random_emotion(rng);
        for (const auto variant :
             {StrategyVariant::SemanticOnly, StrategyVariant::CombineAdd,
              StrategyVariant::CombineMul, StrategyVariant::SeqSemanticFirst,
              StrategyVariant::SeqEmotionFirst}) {
            RetrievalStrategy strategy;
            strategy.variant = variant;
            EXPECT_EQ(retrieve(query, unit, strategy, kDefaultTopK).size(), 10u)
                << "n=" << n << " variant=" << strategy_flag_name(variant);
        }
    }
    EXPECT_EQ(kDefaultTopK, 10);
    EXPECT_EQ(EngineConfig{}.k, 10);
}

// compute_metrics reproduces hand-computed values exactly on fixed
// fixtures, and acc_full <= acc_dim holds on 500 random fixtures.
TEST(Acceptance, MetricsMatchHandComputedFixtures) {
    // Single-axis miss: {A: INTJ, B: INTP} vs {A: INTJ, B: INTJ}.
    auto typed_result = [](const std::string& type) {
        AssessmentResult result;
        result.instrument = Instrument::Mbti;
        const auto& dims = dimensions_of(Instrument::Mbti);
        for (std::size_t i = 0; i < dims.size(); ++i) {
            DimensionAssessment d;
            d.dimension = dims[i].key;
            d.letter = type[i];
            d.score = type[i] == dims[i].first_letter ? 1.0 : 0.0;
            result.dimensions.push_back(d);
        }
        return result;
    };
    PersonalityLabel intj;
    intj.mbti_type = "INTJ";
    const std::map<std::string, AssessmentResult> results{
        {"A", typed_result("INTJ")}, {"B", typed_result("INTP")}};
    const std::map<std::string, PersonalityLabel> labels{{"A", intj}, {"B", intj}};
    const auto metrics = compute_metrics(results, labels, Instrument::Mbti);
    EXPECT_DOUBLE_EQ(metrics.acc_dim, 0.875);
    EXPECT_DOUBLE_EQ(metrics.acc_full, 0.5);

    // Four characters, four dimensions, scores hand-picked; expected values
    // frozen from an independent spreadsheet-style pass.
    const std::map<std::string, std::array<double, 4>> predicted{
        {"alpha", {0.8, 0.3, 0.7, 0.6}},
        {"bravo", {0.4, 0.9, 0.2, 0.5}},
        {"carol", {0.55, 0.45, 0.6, 0.1}},
        {"dave", {0.2, 0.2, 0.9, 0.8}},
    };
    const std::map<std::string, std::array<double, 4>> truth{
        {"alpha", {1.0, 0.0, 1.0, 1.0}},
        {"bravo", {0.3, 0.8, 0.1, 0.6}},
        {"carol", {0.5, 0.5, 0.7, 0.3}},
        {"dave", {0.4, 0.1, 0.8, 0.9}},
    };
    std::map<std::string, AssessmentResult> fixture_results;
    std::map<std::string, PersonalityLabel> fixture_labels;
    std::vector<std::vector<char>> pred_letters, label_letters;
    std::vector<std::vector<double>> pred_scores, label_scores;
    for (const auto& [id, scores] : predicted) {
        AssessmentResult result;
        result.instrument = Instrument::Mbti;
        std::vector<char> pl;
        std::vector<char> ll;
        for (std::size_t d = 0; d < 4; ++d) {
            DimensionAssessment dim;
            dim.dimension = dimensions_of(Instrument::Mbti)[d].key;
            dim.score = scores[d];
            dim.letter = letter_for_score(Instrument::Mbti, d, scores[d]);
            result.dimensions.push_back(dim);
            pl.push_back(dim.letter);
            ll.push_back(letter_for_score(Instrument::Mbti, d, truth.at(id)[d]));
        }
        fixture_results[id] = result;
        PersonalityLabel label;
        label.mbti_scores = truth.at(id);
        fixture_labels[id] = label;
        pred_letters.push_back(pl);
        label_letters.push_back(ll);
        pred_scores.push_back({scores.begin(), scores.end()});
        label_scores.push_back({truth.at(id).begin(), truth.at(id).end()});
    }
    const auto fixture_metrics =
        compute_metrics(fixture_results, fixture_labels, Instrument::Mbti);
    EXPECT_NEAR(fixture_metrics.acc_dim, 0.9375, 1e-12);
    EXPECT_NEAR(fixture_metrics.acc_full, 0.75, 1e-12);
    EXPECT_NEAR(fixture_metrics.mse, 0.0340625, 1e-12);
    EXPECT_NEAR(fixture_metrics.mae, 0.15625, 1e-12);
    const auto reference = oracle::reference_metrics(pred_letters, pred_scores, label_letters,
                                                     label_scores);
    EXPECT_NEAR(fixture_metrics.acc_dim, reference.acc_dim, 1e-12);
    EXPECT_NEAR(fixture_metrics.acc_full, reference.acc_full, 1e-12);
    EXPECT_NEAR(fixture_metrics.mse, reference.mse, 1e-12);
    EXPECT_NEAR(fixture_metrics.mae, reference.mae, 1e-12);

    // acc_full <= acc_dim on 500 random fixtures.
    std::mt19937 rng(2028);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    std::uniform_int_distribution<int> char_count(1, 8);
    for (int trial = 0; trial < 500; ++trial) {
        std::map<std::string, AssessmentResult> r;
        std::map<std::string, PersonalityLabel> l;
        const int chars = char_count(rng);
        for (int c = 0; c < chars; ++c) {
            AssessmentResult result;
            result.instrument = Instrument::Bfi;
            std::array<double, 5> t{};
            for (std::size_t d = 0; d < 5; ++d) {
                DimensionAssessment dim;
                dim.dimension = dimensions_of(Instrument::Bfi)[d].key;
                dim.score = score(rng);
                dim.letter = letter_for_score(Instrument::Bfi, d, dim.score);
                result.dimensions.push_back(dim);
                t[d] = score(rng);
            }
            PersonalityLabel label;
            label.bfi_scores = t;
            r["c" + std::to_string(c)] = result;
            l["c" + std::to_string(c)] = label;
        }
        const auto m = compute_metrics(r, l, Instrument::Bfi);
        ASSERT_LE(m.acc_full, m.acc_dim + 1e-12);
    }
}

// With mock backends, compare_strategies over 2 fixture characters and all
// 5 strategies produces byte-identical CSVs across 3 runs, in under 30 s.
TEST(Acceptance, StrategyComparisonIsByteReproducible) {
    const auto start = Clock::now();
    testutil::FixtureWorkspace workspace;
    std::vector<std::string> csvs;
    for (int run = 0; run < 3; ++run) {
        Engine engine(EngineConfig::load(workspace.config_path()));
        const auto questionnaire =
            load_questionnaire(workspace.dir.file("questionnaire.jsonl"));
        std::vector<RetrievalStrategy> strategies;
        for (const auto variant :
             {StrategyVariant::SemanticOnly, StrategyVariant::CombineAdd,
              StrategyVariant::CombineMul, StrategyVariant::SeqSemanticFirst,
              StrategyVariant::SeqEmotionFirst}) {
            RetrievalStrategy strategy = engine.config().default_strategy();
            strategy.variant = variant;
            strategies.push_back(strategy);
        }
        const auto backends = engine.eval_backends();
        const auto report = compare_strategies(
            engine.profiles(), engine.memory(), questionnaire, strategies,
            engine.config().k, engine.templates(), backends,
            labels_from_profiles(engine.profiles()));
        ASSERT_EQ(report.rows.size(), 5u);
        for (const auto& row : report.rows) {
            ASSERT_TRUE(row.ok) << row.strategy << ": " << row.error;
        }
        csvs.push_back(report.to_csv());
    }
    EXPECT_EQ(csvs[0], csvs[1]);
    EXPECT_EQ(csvs[1], csvs[2]);
    EXPECT_NE(csvs[0].find("semantic-only,Ordinary RAG,"), std::string::npos);
    EXPECT_LT(seconds_since(start), 30.0);
}

// save/load identity on 100 generated units, cached vectors included.
TEST(Acceptance, PersistenceRoundTripsGeneratedUnits) {
    std::mt19937 rng(2029);
    testutil::TempDir dir;
    std::uniform_int_distribution<std::size_t> size_dist(0, 40);
    for (int trial = 0; trial < 100; ++trial) {
        MemoryUnit unit = testutil::random_unit(rng, size_dist(rng), 8);
        for (std::size_t i = 0; i < unit.size(); ++i) {
            if (i % 5 == 0) unit.fragments[i].semantic.reset();
            if (i % 7 == 0) unit.fragments[i].emotion.reset();
            if (i % 3 == 0) unit.fragments[i].source = "src-" + std::to_string(i);
        }
        const auto path = dir.file("unit.jsonl");
        save_memory(unit, path);
        ASSERT_EQ(load_memory(path), unit) << "trial " << trial;
    }
}

// The checked-in fixture was constructed with the brute-force oracle so
// that the five strategies disagree: at least two distinct top-1 fragments,
// i.e. the emotional signal demonstrably changes retrieval.
TEST(Acceptance, CheckedInFixtureSeparatesStrategies) {
    const auto unit = load_memory(std::filesystem::path(EMOMEM_FIXTURES_DIR) /
                                  "divergence_memory.jsonl");
    ASSERT_EQ(unit.size(), 6u);
    Query query;
    query.text = "fixture query";
    query.semantic = SemanticVector(8, 0.0);
    query.emotion = testutil::make_emotion({5, 5, 5, 5, 5, 5, 5, 5});

    const std::map<StrategyVariant, std::string> expected_top1{
        {StrategyVariant::SemanticOnly, "div-a"},
        {StrategyVariant::CombineAdd, "div-c"},
        {StrategyVariant::CombineMul, "div-d"},
        {StrategyVariant::SeqSemanticFirst, "div-b"},
        {StrategyVariant::SeqEmotionFirst, "div-a"},
    };
    std::set<std::string> distinct;
    for (const auto& [variant, top1] : expected_top1) {
        RetrievalStrategy strategy;
        strategy.variant = variant;
        const auto results = retrieve(query, unit, strategy, kDefaultTopK);
        ASSERT_FALSE(results.empty());
        EXPECT_EQ(results[0].fragment_id, top1) << strategy_flag_name(variant);
        const auto reference = oracle::reference_retrieve(query, unit, strategy, kDefaultTopK);
        EXPECT_EQ(ids_of(results), reference) << strategy_flag_name(variant);
        distinct.insert(results[0].fragment_id);
    }
    EXPECT_GE(distinct.size(), 2u);
    EXPECT_EQ(distinct.size(), 4u);  // div-a, div-b, div-c, div-d
}

// Optional live smoke test against one OpenAI-compatible endpoint; skipped
// unless EMOMEM_API_KEY and EMOMEM_SMOKE_ENDPOINT are set.
TEST(Acceptance, LiveBackendSmokeTest) {
    const char* api_key = std::getenv("EMOMEM_API_KEY");
    const char* endpoint = std::getenv("EMOMEM_SMOKE_ENDPOINT");
    if (!api_key || !endpoint) {
        GTEST_SKIP() << "set EMOMEM_API_KEY and EMOMEM_SMOKE_ENDPOINT to run";
    }
    const char* chat_model_env = std::getenv("EMOMEM_SMOKE_CHAT_MODEL");
    const char* embed_model_env = std::getenv("EMOMEM_SMOKE_EMBED_MODEL");
    const char* embed_dim_env = std::getenv("EMOMEM_SMOKE_EMBED_DIM");

    HttpBackendConfig chat_config;
    chat_config.endpoint = endpoint;
    chat_config.model = chat_model_env ? chat_model_env : "gpt-3.5-turbo";
    chat_config.api_key = api_key;
    HttpChatBackend scorer(chat_config);
    HttpChatBackend generator(chat_config);

    HttpBackendConfig embed_config = chat_config;
    embed_config.model = embed_model_env ? embed_model_env : "text-embedding-3-small";
    embed_config.dimension = embed_dim_env ? std::stoul(embed_dim_env) : 1536;
    HttpEmbeddingBackend embedder(embed_config);

    MemoryUnit unit;
    for (int i = 0; i < 20; ++i) {
        MemoryFragment f;
        f.id = "live-" + std::to_string(i);
        f.character_id = "live";
        f.text = "Q: question number " + std::to_string(i) +
                 " about daily life\nA: a short answer number " + std::to_string(i);
        unit.fragments.push_back(f);
    }
    const auto registry =
        TemplateRegistry::load_dir(std::filesystem::path(EMOMEM_TEMPLATES_DIR) / "en");
    PrecomputeReport report;
    unit = precompute_vectors(unit, embedder, scorer,
                              registry.get(kEmotionScoringTemplate), false, &report);
    ASSERT_EQ(report.failed_count(), 0u);

    const Query query = encode_query("How was your morning?", embedder, scorer,
                                     registry.get(kEmotionScoringTemplate));
    RetrievalStrategy strategy;
    strategy.variant = StrategyVariant::CombineAdd;
    const auto results = retrieve(query, unit, strategy, kDefaultTopK);
    ASSERT_EQ(results.size(), 10u);

    CharacterProfile profile;
    profile.character_id = "live";
    profile.name = "Smoke";
    profile.profile_text = "A friendly test character.";
    std::vector<MemoryFragment> memories;
    for (const auto& scored : results) memories.push_back(*unit.find(scored.fragment_id));
    ChatRequest request =
        build_generation_prompt(profile, memories, "How was your morning?", registry);
    const std::string reply = chat(request, generator);
    EXPECT_FALSE(reply.empty());
}
