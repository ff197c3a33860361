#include "emomem/service.hpp"

#include <gtest/gtest.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "emomem/config.hpp"
#include "emomem/engine.hpp"
#include "emomem/errors.hpp"
#include "fixture_workspace.hpp"

using namespace emomem;
using json = nlohmann::json;

namespace {

class ServiceTest : public ::testing::Test {
protected:
    void SetUp() override {
        engine_ = std::make_unique<Engine>(EngineConfig::load(workspace_.config_path()));
        service_ = std::make_unique<HttpService>(*engine_);
        port_ = service_->start("127.0.0.1", 0);
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    }

    void TearDown() override { service_->stop(); }

    testutil::FixtureWorkspace workspace_;
    std::unique_ptr<Engine> engine_;
    std::unique_ptr<HttpService> service_;
    std::unique_ptr<httplib::Client> client_;
    int port_ = 0;
};

}  // namespace

TEST_F(ServiceTest, HealthzAnswersOk) {
    const auto res = client_->Get("/healthz");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->body, "ok");
}

TEST_F(ServiceTest, CharactersListsTheCatalog) {
    const auto res = client_->Get("/characters");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    const json body = json::parse(res->body);
    ASSERT_EQ(body.size(), 2u);
    EXPECT_EQ(body[0]["character_id"], "ada");
    EXPECT_EQ(body[0]["fragment_count"], 6);
    EXPECT_EQ(body[1]["name"], "Bo");
}

TEST_F(ServiceTest, RetrieveReturnsScoredFragments) {
    const json request{{"character_id", "ada"}, {"query", "Tell me about the sea"}};
    const auto res = client_->Post("/retrieve", request.dump(), "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    const json body = json::parse(res->body);
    const auto& results = body.at("results");
    ASSERT_EQ(results.size(), 3u);  // k=3 from config
    for (const auto& row : results) {
        EXPECT_TRUE(row.contains("fragment_id"));
        EXPECT_TRUE(row.contains("semantic_score"));
        EXPECT_TRUE(row.contains("emotional_score"));
        EXPECT_TRUE(row.contains("final_score"));
    }
    // Ascending final score.
    for (std::size_t i = 1; i < results.size(); ++i) {
        EXPECT_LE(results[i - 1]["final_score"].get<double>(),
                  results[i]["final_score"].get<double>());
    }
}

TEST_F(ServiceTest, RetrieveMatchesEngineExactly) {
    const json request{{"character_id", "bo"},
                       {"query", "storms at sea"},
                       {"strategy", {{"variant", "s-e"}, {"k", 4}, {"pool_size", 6}}}};
    const auto res = client_->Post("/retrieve", request.dump(), "application/json");
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200);
    const json body = json::parse(res->body);

    RetrievalStrategy strategy = engine_->config().default_strategy();
    strategy.variant = StrategyVariant::SeqEmotionFirst;
    strategy.pool_size = 6;
    const auto direct = engine_->retrieve_for("bo", "storms at sea", strategy, 4);
    ASSERT_EQ(body.at("results").size(), direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        EXPECT_EQ(body.at("results")[i]["fragment_id"], direct[i].fragment_id);
        EXPECT_DOUBLE_EQ(body.at("results")[i]["final_score"].get<double>(),
                         direct[i].final_score);
    }
}

TEST_F(ServiceTest, StrategyAcceptsFlagNameString) {
    const json request{{"character_id", "ada"},
                       {"query", "a quiet evening"},
                       {"strategy", "semantic-only"}};
    const auto res = client_->Post("/retrieve", request.dump(), "application/json");
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200);

    RetrievalStrategy strategy = engine_->config().default_strategy();
    strategy.variant = StrategyVariant::SemanticOnly;
    const auto direct =
        engine_->retrieve_for("ada", "a quiet evening", strategy, engine_->config().k);
    const json body = json::parse(res->body);
    ASSERT_EQ(body.at("results").size(), direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        EXPECT_EQ(body.at("results")[i]["fragment_id"], direct[i].fragment_id);
    }

    const json bad{{"character_id", "ada"}, {"query", "x"}, {"strategy", "fancy"}};
    const auto bad_res = client_->Post("/retrieve", bad.dump(), "application/json");
    ASSERT_TRUE(bad_res);
    EXPECT_EQ(bad_res->status, 400);
}

TEST_F(ServiceTest, ChatReturnsReplyAndUsedFragments) {
    const json request{{"character_id", "ada"}, {"query", "Are you coming to the party?"}};
    const auto res = client_->Post("/chat", request.dump(), "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    const json body = json::parse(res->body);
    EXPECT_FALSE(body.at("reply").get<std::string>().empty());
    EXPECT_EQ(body.at("used_fragment_ids").size(), 3u);
}

TEST_F(ServiceTest, UnknownCharacterIs404) {
    const json request{{"character_id", "nobody"}, {"query", "hi"}};
    const auto res = client_->Post("/retrieve", request.dump(), "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 404);
    EXPECT_NE(json::parse(res->body).at("error").get<std::string>().find("nobody"),
              std::string::npos);
}

TEST_F(ServiceTest, MalformedBodyIs400) {
    const auto res = client_->Post("/retrieve", "{not json", "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);
    const auto missing = client_->Post("/retrieve", "{\"query\":\"hi\"}", "application/json");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 400);
}

TEST(ServiceBackendDown, ScorerFailureIs503) {
    testutil::FixtureWorkspace workspace;
    // http scorer pointing at a port nobody listens on, no retries to keep
    // the test fast.
    testutil::write_file(workspace.dir.file("down.conf"),
                         workspace.config_text() +
                             "scorer.kind = http\n"
                             "scorer.endpoint = http://127.0.0.1:9/v1\n"
                             "scorer.max_retries = 0\n"
                             "scorer.timeout_seconds = 0.2\n");
    Engine engine(EngineConfig::load(workspace.dir.file("down.conf")));
    HttpService service(engine);
    const int port = service.start("127.0.0.1", 0);
    httplib::Client client("127.0.0.1", port);
    const json request{{"character_id", "ada"}, {"query", "hello"}};
    const auto res = client.Post("/retrieve", request.dump(), "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 503);
    EXPECT_TRUE(json::parse(res->body).contains("error"));
    service.stop();
}

TEST(EngineSharedCore, CliAndServicePathsAgree) {
    testutil::FixtureWorkspace workspace;
    Engine engine(EngineConfig::load(workspace.config_path()));
    // Two calls through the same engine must agree bit-for-bit; the CLI and
    // the service both call exactly this entry point.
    const auto a = engine.retrieve_for("ada", "a quiet evening with books",
                                       engine.config().default_strategy(), 3);
    const auto b = engine.retrieve_for("ada", "a quiet evening with books",
                                       engine.config().default_strategy(), 3);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].fragment_id, b[i].fragment_id);
        EXPECT_DOUBLE_EQ(a[i].final_score, b[i].final_score);
    }
}

TEST(EngineLanguages, ChinesePipelineRunsEndToEnd) {
    testutil::FixtureWorkspace workspace;
    std::string zh_config = workspace.config_text();
    const auto pos = zh_config.find("prompts.language = en");
    zh_config.replace(pos, std::string("prompts.language = en").size(),
                      "prompts.language = zh");
    testutil::write_file(workspace.dir.file("zh.conf"), zh_config);
    Engine engine(EngineConfig::load(workspace.dir.file("zh.conf")));
    const auto outcome = engine.chat_for("ada", "你今天过得怎么样？",
                                         engine.config().default_strategy(), 3);
    EXPECT_FALSE(outcome.reply.empty());
    EXPECT_EQ(outcome.fragment_ids.size(), 3u);
    // Same engine, same query, same templates: identical outcome.
    const auto again = engine.chat_for("ada", "你今天过得怎么样？",
                                       engine.config().default_strategy(), 3);
    EXPECT_EQ(outcome.reply, again.reply);
    EXPECT_EQ(outcome.fragment_ids, again.fragment_ids);
}

TEST(EngineErrors, UnknownCharacterAndUncachedVectors) {
    testutil::FixtureWorkspace workspace;
    Engine engine(EngineConfig::load(workspace.config_path()));
    EXPECT_THROW(engine.profile_for("ghost"), UnknownCharacterError);
    EXPECT_THROW(
        engine.retrieve_for("ghost", "hi", engine.config().default_strategy(), 3),
        UnknownCharacterError);
}
