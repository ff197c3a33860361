#include "emomem/config.hpp"

#include <cctype>
#include <fstream>

#include "emomem/errors.hpp"

namespace emomem {

namespace {

std::string trim(const std::string& s) {
    std::size_t start = 0, end = s.size();
    while (start < end && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    while (end > start && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(start, end - start);
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int parsed = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double parsed = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key '" + key + "' expects true/false, got '" + value + "'");
}

// Applies "<role>.<field>" keys shared by the four backend roles.
bool apply_backend_key(BackendRoleConfig& backend, const std::string& key,
                       const std::string& field, const std::string& value) {
    if (field == "kind") {
        backend.kind = value;
    } else if (field == "endpoint") {
        backend.endpoint = value;
    } else if (field == "model") {
        backend.model = value;
    } else if (field == "timeout_seconds") {
        backend.timeout_seconds = parse_double(key, value);
    } else if (field == "max_retries") {
        backend.max_retries = parse_int(key, value);
    } else if (field == "dimension") {
        backend.dimension = static_cast<std::size_t>(parse_int(key, value));
    } else {
        return false;
    }
    return true;
}

}  // namespace

RetrievalStrategy EngineConfig::default_strategy() const {
    RetrievalStrategy strategy;
    strategy.variant = strategy_variant;
    strategy.pool_size = pool_size;
    strategy.weight = weight;
    strategy.metric = metric;
    strategy.normalize = normalize;
    return strategy;
}

EngineConfig EngineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    EngineConfig config;
    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");
    auto resolve = [&base](const std::string& value) {
        std::filesystem::path p(value);
        return p.is_absolute() ? p : base / p;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              " is not a key=value pair: " + stripped);
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        const auto dot = key.find('.');
        const std::string section = dot == std::string::npos ? key : key.substr(0, dot);
        const std::string field = dot == std::string::npos ? "" : key.substr(dot + 1);

        if (section == "embedder" && apply_backend_key(config.embedder, key, field, value)) {
        } else if (section == "scorer" && apply_backend_key(config.scorer, key, field, value)) {
        } else if (section == "generator" &&
                   apply_backend_key(config.generator, key, field, value)) {
        } else if (section == "judge" && apply_backend_key(config.judge, key, field, value)) {
        } else if (key == "strategy.variant") {
            config.strategy_variant = parse_strategy_variant(value);
        } else if (key == "strategy.k") {
            config.k = parse_int(key, value);
        } else if (key == "strategy.pool_size") {
            config.pool_size = parse_int(key, value);
        } else if (key == "strategy.weight") {
            config.weight = parse_double(key, value);
        } else if (key == "strategy.metric") {
            config.metric = parse_metric(value);
        } else if (key == "strategy.normalize") {
            config.normalize = parse_bool(key, value);
        } else if (key == "gateway.concurrency") {
            config.concurrency = parse_int(key, value);
        } else if (key == "generation.temperature") {
            config.temperature = parse_double(key, value);
        } else if (key == "prompts.language") {
            config.language = value;
        } else if (key == "paths.memory") {
            config.memory_path = resolve(value);
        } else if (key == "paths.profiles") {
            config.profiles_path = resolve(value);
        } else if (key == "paths.templates") {
            config.templates_dir = resolve(value);
        } else {
            throw ConfigError("unknown config key '" + key + "' at line " +
                              std::to_string(line_no));
        }
    }
    config.validate();
    return config;
}

void EngineConfig::validate() const {
    auto check_backend = [](const BackendRoleConfig& backend, const char* role, bool chat) {
        const std::string& kind = backend.kind;
        const bool known = chat ? (kind == "mock" || kind == "http")
                                : (kind == "hashing" || kind == "http");
        if (!known) {
            throw ConfigError(std::string(role) + ".kind '" + kind + "' is not supported");
        }
        if (kind == "http" && backend.endpoint.empty()) {
            throw ConfigError(std::string(role) + " backend needs an endpoint");
        }
        if (backend.timeout_seconds <= 0) {
            throw ConfigError(std::string(role) + ".timeout_seconds must be positive");
        }
        if (backend.max_retries < 0) {
            throw ConfigError(std::string(role) + ".max_retries must be non-negative");
        }
    };
    check_backend(embedder, "embedder", false);
    check_backend(scorer, "scorer", true);
    check_backend(generator, "generator", true);
    check_backend(judge, "judge", true);
    if (embedder.dimension == 0) {
        throw ConfigError("embedder.dimension must be positive");
    }
    if (k < 1) throw ConfigError("strategy.k must be at least 1");
    if (pool_size < k) throw ConfigError("strategy.pool_size must be at least strategy.k");
    if (weight < 0.0 || weight > 1.0) throw ConfigError("strategy.weight must lie in [0, 1]");
    if (concurrency < 1) throw ConfigError("gateway.concurrency must be at least 1");
    if (temperature < 0.0) throw ConfigError("generation.temperature must be non-negative");

    auto check_path = [](const std::filesystem::path& p, const char* what, bool dir) {
        if (p.empty()) {
            throw ConfigError(std::string("config is missing paths.") + what);
        }
        if (dir ? !std::filesystem::is_directory(p) : !std::filesystem::is_regular_file(p)) {
            throw ConfigError(std::string("paths.") + what + " does not exist: " + p.string());
        }
    };
    check_path(memory_path, "memory", false);
    check_path(profiles_path, "profiles", false);
    check_path(templates_dir, "templates", true);
}

}  // namespace emomem
