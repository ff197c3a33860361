#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace emomem {

// Semantic embedding of a text. Length equals the active embedder's
// declared dimension; all entries finite.
using SemanticVector = std::vector<double>;

enum class Metric { Euclidean, Cosine };

Metric parse_metric(const std::string& name);
std::string metric_name(Metric metric);

// Pluggable text-embedding backend. Implementations must return vectors of
// exactly dimension() entries, one per input text, in input order, and fail
// the whole batch as one unit.
class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual std::size_t dimension() const = 0;
    virtual std::vector<SemanticVector> embed_batch(const std::vector<std::string>& texts) = 0;
};

// Embeds a single non-empty text and validates the backend's declared
// dimension. Throws DimensionError if the backend misbehaves.
SemanticVector embed(const std::string& text, EmbeddingBackend& backend);

// Distance between two equal-length vectors. Euclidean by default; cosine
// distance (1 - cosine similarity) selectable. Smaller means more similar.
double semantic_distance(const SemanticVector& a, const SemanticVector& b,
                         Metric metric = Metric::Euclidean);

// Offline embedder: signed feature hashing of byte n-grams (n = 1..3) into
// the configured dimension, L2-normalized. Deterministic across runs and
// platforms; exists so the whole pipeline is testable with no network.
class HashingEmbedder final : public EmbeddingBackend {
public:
    explicit HashingEmbedder(std::size_t dimension = 768);

    std::size_t dimension() const override { return dimension_; }
    std::vector<SemanticVector> embed_batch(const std::vector<std::string>& texts) override;

private:
    SemanticVector embed_one(const std::string& text) const;

    std::size_t dimension_;
};

}  // namespace emomem
