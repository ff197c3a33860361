#include "emomem/embedding.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "emomem/errors.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace emomem;

namespace {

// Fails hard on an unexpected dimension, for contract tests.
class LyingEmbedder final : public EmbeddingBackend {
public:
    LyingEmbedder(std::size_t declared, std::size_t actual)
        : declared_(declared), actual_(actual) {}
    std::size_t dimension() const override { return declared_; }
    std::vector<SemanticVector> embed_batch(const std::vector<std::string>& texts) override {
        return std::vector<SemanticVector>(texts.size(), SemanticVector(actual_, 0.5));
    }

private:
    std::size_t declared_;
    std::size_t actual_;
};

}  // namespace

TEST(HashingEmbedder, IsDeterministic) {
    HashingEmbedder embedder(8);
    EXPECT_EQ(embed("hello", embedder), embed("hello", embedder));
}

TEST(HashingEmbedder, IsDimensionStable) {
    for (std::size_t dim : {4u, 8u, 64u, 768u}) {
        HashingEmbedder embedder(dim);
        EXPECT_EQ(embed("some text", embedder).size(), dim);
    }
}

TEST(HashingEmbedder, ProducesUnitVectors) {
    HashingEmbedder embedder(16);
    const auto v = embed("a reasonably long piece of text", embedder);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    EXPECT_NEAR(norm, 1.0, 1e-9);
}

TEST(HashingEmbedder, NoCollisionsOnFixedCorpus) {
    HashingEmbedder embedder(8);
    std::vector<std::string> corpus;
    for (int i = 0; i < 1000; ++i) corpus.push_back("w" + std::to_string(i));
    const auto vectors = embedder.embed_batch(corpus);
    std::set<SemanticVector> distinct(vectors.begin(), vectors.end());
    EXPECT_EQ(distinct.size(), corpus.size());
}

TEST(Embed, RejectsEmptyText) {
    HashingEmbedder embedder(8);
    EXPECT_THROW(embed("", embedder), Error);
}

TEST(Embed, DetectsDimensionContractViolation) {
    LyingEmbedder embedder(768, 512);
    EXPECT_THROW(embed("text", embedder), DimensionError);
}

TEST(SemanticDistance, IdenticalVectorsAreAtDistanceZero) {
    const SemanticVector v{0.5, -0.25, 3.0};
    EXPECT_DOUBLE_EQ(semantic_distance(v, v), 0.0);
}

TEST(SemanticDistance, KnownRightTriangle) {
    SemanticVector a(8, 0.0), b(8, 0.0);
    a[0] = 3.0;
    a[1] = 4.0;
    EXPECT_DOUBLE_EQ(semantic_distance(a, b), 5.0);
}

TEST(SemanticDistance, RejectsMismatchedLengths) {
    EXPECT_THROW(semantic_distance(SemanticVector(3, 0.0), SemanticVector(4, 0.0)),
                 DimensionError);
}

TEST(SemanticDistance, MatchesIndependentOracleOnRandomPairs) {
    std::mt19937 rng(23);
    for (int i = 0; i < 1000; ++i) {
        const auto a = testutil::random_semantic(rng, 8);
        const auto b = testutil::random_semantic(rng, 8);
        EXPECT_NEAR(semantic_distance(a, b), oracle::euclidean(a, b), 1e-9);
        EXPECT_NEAR(semantic_distance(a, b, Metric::Cosine),
                    oracle::cosine_distance_reals(a, b), 1e-9);
    }
}

TEST(SemanticDistance, EuclideanIsAMetricOnSampledTriples) {
    std::mt19937 rng(31);
    for (int i = 0; i < 300; ++i) {
        const auto a = testutil::random_semantic(rng, 8);
        const auto b = testutil::random_semantic(rng, 8);
        const auto c = testutil::random_semantic(rng, 8);
        const double ab = semantic_distance(a, b);
        const double ba = semantic_distance(b, a);
        const double ac = semantic_distance(a, c);
        const double cb = semantic_distance(c, b);
        EXPECT_NEAR(ab, ba, 1e-9);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, ac + cb + 1e-9);
        EXPECT_NEAR(semantic_distance(a, a), 0.0, 1e-9);
    }
}

TEST(SemanticDistance, CosineRejectsZeroNormVectors) {
    EXPECT_THROW(
        semantic_distance(SemanticVector(4, 0.0), SemanticVector(4, 1.0), Metric::Cosine),
        Error);
}

TEST(MetricNames, RoundTrip) {
    EXPECT_EQ(parse_metric("euclidean"), Metric::Euclidean);
    EXPECT_EQ(parse_metric("cosine"), Metric::Cosine);
    EXPECT_EQ(metric_name(Metric::Cosine), "cosine");
    EXPECT_THROW(parse_metric("manhattan"), ConfigError);
}
