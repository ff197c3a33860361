#include "emomem/service.hpp"

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "emomem/errors.hpp"

namespace emomem {

using json = nlohmann::json;

namespace {

// Strategy overrides arrive either as a flag-name string or as an object
// with any of variant/k/pool_size/weight/metric/normalize.
struct StrategyRequest {
    RetrievalStrategy strategy;
    int k;
};

StrategyRequest strategy_from_body(const json& body, const EngineConfig& config) {
    StrategyRequest out{config.default_strategy(), config.k};
    if (!body.contains("strategy") || body.at("strategy").is_null()) return out;
    const auto& node = body.at("strategy");
    if (node.is_string()) {
        out.strategy.variant = parse_strategy_variant(node.get<std::string>());
        return out;
    }
    if (!node.is_object()) {
        throw Error("'strategy' must be a string or an object");
    }
    if (node.contains("variant")) {
        out.strategy.variant = parse_strategy_variant(node.at("variant").get<std::string>());
    }
    if (node.contains("k")) out.k = node.at("k").get<int>();
    if (node.contains("pool_size")) out.strategy.pool_size = node.at("pool_size").get<int>();
    if (node.contains("weight")) out.strategy.weight = node.at("weight").get<double>();
    if (node.contains("metric")) {
        out.strategy.metric = parse_metric(node.at("metric").get<std::string>());
    }
    if (node.contains("normalize")) out.strategy.normalize = node.at("normalize").get<bool>();
    return out;
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", message}}.dump(), "application/json");
}

json scored_to_json(const std::vector<ScoredFragment>& results, const MemoryUnit& unit) {
    json arr = json::array();
    for (const auto& scored : results) {
        const MemoryFragment* fragment = unit.find(scored.fragment_id);
        arr.push_back({{"fragment_id", scored.fragment_id},
                       {"text", fragment ? fragment->text : ""},
                       {"semantic_score", scored.semantic_score},
                       {"emotional_score", scored.emotional_score},
                       {"final_score", scored.final_score}});
    }
    return arr;
}

}  // namespace

struct HttpService::Impl {
    explicit Impl(Engine& engine) : engine(engine) {}

    Engine& engine;
    httplib::Server server;
    std::thread thread;

    // Runs `handler`, translating engine errors to the documented statuses.
    template <typename Handler>
    void guarded(const httplib::Request& req, httplib::Response& res, Handler&& handler) {
        json body;
        if (!req.body.empty()) {
            body = json::parse(req.body, nullptr, false);
            if (body.is_discarded()) {
                reply_error(res, 400, "request body is not valid JSON");
                return;
            }
        }
        try {
            handler(body);
        } catch (const UnknownCharacterError& e) {
            reply_error(res, 404, e.what());
        } catch (const BackendError& e) {
            reply_error(res, 503, e.what());
        } catch (const json::exception& e) {
            reply_error(res, 400, std::string("malformed request: ") + e.what());
        } catch (const Error& e) {
            reply_error(res, 400, e.what());
        }
    }

    void install_routes() {
        server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("ok", "text/plain");
        });

        server.Get("/characters", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(req, res, [&](const json&) {
                json arr = json::array();
                for (const auto& profile : engine.profiles()) {
                    arr.push_back({{"character_id", profile.character_id},
                                   {"name", profile.name},
                                   {"fragment_count",
                                    engine.unit_for(profile.character_id).size()}});
                }
                res.set_content(arr.dump(), "application/json");
            });
        });

        server.Post("/retrieve", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(req, res, [&](const json& body) {
                const auto character_id = body.at("character_id").get<std::string>();
                const auto query = body.at("query").get<std::string>();
                const auto req_strategy = strategy_from_body(body, engine.config());
                const auto results = engine.retrieve_for(character_id, query,
                                                         req_strategy.strategy, req_strategy.k);
                res.set_content(
                    json{{"results",
                          scored_to_json(results, engine.unit_for(character_id))}}.dump(),
                    "application/json");
            });
        });

        server.Post("/chat", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(req, res, [&](const json& body) {
                const auto character_id = body.at("character_id").get<std::string>();
                const auto query = body.at("query").get<std::string>();
                const auto req_strategy = strategy_from_body(body, engine.config());
                const auto outcome = engine.chat_for(character_id, query, req_strategy.strategy,
                                                     req_strategy.k);
                res.set_content(json{{"reply", outcome.reply},
                                     {"used_fragment_ids", outcome.fragment_ids}}
                                    .dump(),
                                "application/json");
            });
        });
    }
};

HttpService::HttpService(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {
    impl_->install_routes();
}

HttpService::~HttpService() {
    stop();
}

int HttpService::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
        if (bound <= 0) {
            throw Error("could not bind to an ephemeral port on " + host);
        }
    } else {
        if (!impl_->server.bind_to_port(host, port)) {
            throw Error("could not bind to " + host + ":" + std::to_string(port));
        }
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void HttpService::stop() {
    if (!impl_) return;
    if (impl_->server.is_running()) {
        impl_->server.stop();
    }
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

}  // namespace emomem
