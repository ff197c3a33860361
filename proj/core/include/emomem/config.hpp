#pragma once

#include <filesystem>
#include <string>

#include "emomem/embedding.hpp"
#include "emomem/llm_gateway.hpp"
#include "emomem/retrieval.hpp"

namespace emomem {

// One backend role in the engine: what kind it is and, for http backends,
// how to reach it. Credentials come from EMOMEM_API_KEY, never from here.
struct BackendRoleConfig {
    std::string kind = "mock";  // embedder: hashing|http; chat roles: mock|http
    std::string endpoint;
    std::string model;
    double timeout_seconds = 30.0;
    int max_retries = 3;
    std::size_t dimension = 768;  // embedder only
};

struct EngineConfig {
    EngineConfig() { embedder.kind = "hashing"; }

    BackendRoleConfig embedder;
    BackendRoleConfig scorer;
    BackendRoleConfig generator;
    BackendRoleConfig judge;

    StrategyVariant strategy_variant = StrategyVariant::SemanticOnly;
    int k = kDefaultTopK;
    int pool_size = 3 * kDefaultTopK;
    double weight = 0.5;
    Metric metric = Metric::Euclidean;
    bool normalize = true;

    int concurrency = 4;
    double temperature = 0.0;
    std::string language = "en";

    std::filesystem::path memory_path;
    std::filesystem::path profiles_path;
    std::filesystem::path templates_dir;

    RetrievalStrategy default_strategy() const;

    // Parses the key=value config file; relative paths resolve against the
    // config file's directory. Throws ConfigError on unknown keys, bad
    // values, or referenced paths that do not exist.
    static EngineConfig load(const std::filesystem::path& path);

    void validate() const;
};

}  // namespace emomem
