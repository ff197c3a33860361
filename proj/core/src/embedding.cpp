#include "emomem/embedding.hpp"

#include <cmath>
#include <cstring>

#include "emomem/detail/fnv.hpp"
#include "emomem/errors.hpp"

namespace emomem {

Metric parse_metric(const std::string& name) {
    if (name == "euclidean") return Metric::Euclidean;
    if (name == "cosine") return Metric::Cosine;
    throw ConfigError("unknown metric '" + name + "' (expected euclidean or cosine)");
}

std::string metric_name(Metric metric) {
    return metric == Metric::Euclidean ? "euclidean" : "cosine";
}

SemanticVector embed(const std::string& text, EmbeddingBackend& backend) {
    if (text.empty()) {
        throw Error("embed: text must be non-empty");
    }
    auto vectors = backend.embed_batch({text});
    if (vectors.size() != 1) {
        throw BackendError("embedding backend returned " + std::to_string(vectors.size()) +
                           " vectors for a single text");
    }
    if (vectors[0].size() != backend.dimension()) {
        throw DimensionError("embedding backend declared dimension " +
                             std::to_string(backend.dimension()) + " but returned " +
                             std::to_string(vectors[0].size()) + " values");
    }
    return std::move(vectors[0]);
}

double semantic_distance(const SemanticVector& a, const SemanticVector& b, Metric metric) {
    if (a.size() != b.size()) {
        throw DimensionError("semantic_distance: vector lengths differ (" +
                             std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    if (metric == Metric::Euclidean) {
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            sum += d * d;
        }
        return std::sqrt(sum);
    }
    double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        norm_a += a[i] * a[i];
        norm_b += b[i] * b[i];
    }
    if (norm_a == 0.0 || norm_b == 0.0) {
        throw Error("semantic_distance: cosine undefined for zero-norm vector");
    }
    return 1.0 - dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) {
        throw ConfigError("embedding dimension must be positive");
    }
}

std::vector<SemanticVector> HashingEmbedder::embed_batch(const std::vector<std::string>& texts) {
    std::vector<SemanticVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        out.push_back(embed_one(text));
    }
    return out;
}

SemanticVector HashingEmbedder::embed_one(const std::string& text) const {
    SemanticVector v(dimension_, 0.0);
    // Seed the hash with the gram length so "ab"+"c" and "a"+"bc" land in
    // different buckets. The bucket comes from the high bits and the weight
    // from the low 53 bits of the same hash, so two texts only embed alike
    // when their gram hashes collide outright.
    for (std::size_t n = 1; n <= 3; ++n) {
        if (text.size() < n) break;
        for (std::size_t i = 0; i + n <= text.size(); ++i) {
            const std::uint64_t seed = 14695981039346656037ULL ^ (n * 0x9e3779b97f4a7c15ULL);
            const std::uint64_t h =
                detail::fnv1a64(std::string_view(text).substr(i, n), seed);
            const std::size_t bucket = static_cast<std::size_t>((h >> 53) % dimension_);
            const double weight =
                static_cast<double>(h & ((1ULL << 53) - 1)) / static_cast<double>(1ULL << 53);
            v[bucket] += 2.0 * weight - 1.0;
        }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
        const double inv = 1.0 / std::sqrt(norm);
        for (double& x : v) x *= inv;
    }
    return v;
}

}  // namespace emomem
