#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "emomem/engine.hpp"
#include "emomem/errors.hpp"
#include "emomem/prompt_builders.hpp"
#include "emomem/service.hpp"

namespace {

using namespace emomem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;

struct StrategyFlags {
    std::optional<std::string> variant;
    std::optional<int> k;
    std::optional<int> pool_size;
    std::optional<double> weight;
    std::optional<std::string> metric;
    bool raw = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--strategy", variant,
                        "Retrieval strategy: semantic-only, c-a, c-m, s-s, s-e");
        cmd->add_option("--k", k, "Number of fragments to retrieve");
        cmd->add_option("--pool-size", pool_size, "Stage-1 pool size for s-s/s-e");
        cmd->add_option("--weight", weight, "Semantic weight for c-a, in [0,1]");
        cmd->add_option("--metric", metric, "Semantic metric: euclidean or cosine");
        cmd->add_flag("--raw", raw, "Fuse raw distances instead of normalized ones");
    }

    RetrievalStrategy resolve(const EngineConfig& config, int* k_out) const {
        RetrievalStrategy strategy = config.default_strategy();
        if (variant) strategy.variant = parse_strategy_variant(*variant);
        if (pool_size) strategy.pool_size = *pool_size;
        if (weight) strategy.weight = *weight;
        if (metric) strategy.metric = parse_metric(*metric);
        if (raw) strategy.normalize = false;
        *k_out = k.value_or(config.k);
        return strategy;
    }
};

int cmd_ingest(const std::string& input, const std::string& output,
               const std::string& character_id) {
    MemoryUnit unit = ingest_dialogues(input, character_id);
    save_memory(unit, output);
    if (unit.empty()) {
        std::cerr << "warning: input had no dialogue rows; wrote an empty memory file\n";
    }
    std::cout << "ingested " << unit.size() << " fragments for '" << character_id << "' into "
              << output << "\n";
    return kExitOk;
}

int cmd_precompute(const std::string& config_path, std::optional<std::string> memory_override,
                   std::optional<std::string> output, bool overwrite) {
    EngineConfig config = EngineConfig::load(config_path);
    if (memory_override) config.memory_path = *memory_override;
    Engine engine(config);

    const MemoryUnit unit = load_memory(config.memory_path);
    PrecomputeReport report;
    const MemoryUnit updated =
        precompute_vectors(unit, engine.embedder(), engine.scorer(),
                           engine.templates().get(kEmotionScoringTemplate), overwrite, &report);
    save_memory(updated, output.value_or(config.memory_path.string()));

    std::cout << "precompute: " << report.ok_count() << " ok, " << report.failed_count()
              << " failed\n";
    for (const auto& row : report.rows) {
        if (!row.ok()) std::cerr << "  failed " << row.fragment_id << ": " << row.error << "\n";
    }
    return report.failed_count() == 0 ? kExitOk : kExitBackend;
}

int cmd_retrieve(const std::string& config_path, const std::string& character_id,
                 const std::string& query, const StrategyFlags& flags) {
    Engine engine(EngineConfig::load(config_path));
    int k = 0;
    const RetrievalStrategy strategy = flags.resolve(engine.config(), &k);

    std::vector<ScoredFragment> results;
    try {
        results = engine.retrieve_for(character_id, query, strategy, k);
    } catch (const UncachedVectorError& e) {
        std::cerr << "error: " << e.what()
                  << "\nhint: run `emomem precompute` to cache the missing vectors\n";
        return kExitData;
    }
    std::printf("%-16s %14s %14s %14s\n", "fragment_id", "semantic", "emotional", "final");
    for (const auto& r : results) {
        std::printf("%-16s %14.6f %14.6f %14.6f\n", r.fragment_id.c_str(), r.semantic_score,
                    r.emotional_score, r.final_score);
    }
    return kExitOk;
}

int cmd_chat(const std::string& config_path, const std::string& character_id,
             const StrategyFlags& flags, bool show_memory) {
    Engine engine(EngineConfig::load(config_path));
    int k = 0;
    const RetrievalStrategy strategy = flags.resolve(engine.config(), &k);
    const CharacterProfile& profile = engine.profile_for(character_id);

    std::cout << "chatting with " << profile.name << " (Ctrl-D or /quit to exit)\n";
    std::string line;
    while (true) {
        std::cout << "> " << std::flush;
        if (!std::getline(std::cin, line)) break;
        if (line == "/quit" || line == "/exit") break;
        if (line.empty()) continue;
        try {
            const auto outcome = engine.chat_for(character_id, line, strategy, k);
            if (show_memory) {
                std::cout << "[memory]\n";
                const MemoryUnit& unit = engine.unit_for(character_id);
                for (const auto& id : outcome.fragment_ids) {
                    const MemoryFragment* fragment = unit.find(id);
                    std::cout << "  " << id << ": " << (fragment ? fragment->text : "") << "\n";
                }
            }
            std::cout << profile.name << ": " << outcome.reply << "\n";
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
        }
    }
    return kExitOk;
}

std::map<std::string, PersonalityLabel> resolve_labels(const Engine& engine,
                                                       const std::optional<std::string>& path) {
    if (path) return load_labels(*path);
    return labels_from_profiles(engine.profiles());
}

std::vector<CharacterProfile> resolve_characters(const Engine& engine,
                                                 const std::vector<std::string>& ids) {
    if (ids.empty()) return engine.profiles();
    std::vector<CharacterProfile> selected;
    for (const auto& id : ids) selected.push_back(engine.profile_for(id));
    return selected;
}

int emit_report(const StrategyReport& report, const std::optional<std::string>& output) {
    std::cout << report.to_table();
    if (output) {
        std::ofstream out(*output, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write report file " + *output);
        out << report.to_csv();
        std::cout << "wrote " << *output << "\n";
    }
    for (const auto& row : report.rows) {
        if (!row.ok) return kExitBackend;
    }
    return kExitOk;
}

int cmd_evaluate(const std::string& config_path, const std::string& questionnaire_path,
                 const std::optional<std::string>& labels_path,
                 const std::vector<std::string>& character_ids, const StrategyFlags& flags,
                 const std::optional<std::string>& output) {
    Engine engine(EngineConfig::load(config_path));
    int k = 0;
    const RetrievalStrategy strategy = flags.resolve(engine.config(), &k);
    const Questionnaire questionnaire = load_questionnaire(questionnaire_path);
    const auto labels = resolve_labels(engine, labels_path);
    const auto characters = resolve_characters(engine, character_ids);

    const auto backends = engine.eval_backends();
    StrategyReport report =
        compare_strategies(characters, engine.memory(), questionnaire, {strategy}, k,
                           engine.templates(), backends, labels);
    return emit_report(report, output);
}

int cmd_compare(const std::string& config_path, const std::string& questionnaire_path,
                const std::optional<std::string>& labels_path,
                const std::vector<std::string>& character_ids,
                const std::vector<std::string>& strategy_names, const StrategyFlags& flags,
                const std::optional<std::string>& output) {
    Engine engine(EngineConfig::load(config_path));
    int k = 0;
    const RetrievalStrategy base = flags.resolve(engine.config(), &k);

    std::vector<std::string> names = strategy_names;
    if (names.empty()) {
        names = {"semantic-only", "c-a", "c-m", "s-s", "s-e"};
    }
    std::vector<RetrievalStrategy> strategies;
    for (const auto& name : names) {
        RetrievalStrategy strategy = base;
        strategy.variant = parse_strategy_variant(name);
        strategies.push_back(strategy);
    }

    const Questionnaire questionnaire = load_questionnaire(questionnaire_path);
    const auto labels = resolve_labels(engine, labels_path);
    const auto characters = resolve_characters(engine, character_ids);

    const auto backends = engine.eval_backends();
    StrategyReport report = compare_strategies(characters, engine.memory(), questionnaire,
                                               strategies, k, engine.templates(), backends,
                                               labels);
    return emit_report(report, output);
}

int cmd_serve(const std::string& config_path, const std::string& host, int port) {
    Engine engine(EngineConfig::load(config_path));
    HttpService service(engine);
    const int bound = service.start(host, port);
    std::cout << "serving on http://" << host << ":" << bound << "\n";
    // Blocks until the process is killed.
    while (true) std::this_thread::sleep_for(std::chrono::seconds(3600));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"emotion-aware memory retrieval engine for role-playing agents"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Build a memory file from raw dialogue rows");
    std::string ingest_input, ingest_output, ingest_character;
    ingest->add_option("--input", ingest_input, "JSONL of {question, answer} rows")->required();
    ingest->add_option("--output", ingest_output, "Destination memory JSONL")->required();
    ingest->add_option("--character-id", ingest_character, "Owner of the fragments")->required();

    // precompute
    auto* precompute =
        app.add_subcommand("precompute", "Cache semantic and emotion vectors for a memory file");
    std::string pre_config;
    std::optional<std::string> pre_memory, pre_output;
    bool pre_overwrite = false;
    precompute->add_option("--config", pre_config, "Engine config file")->required();
    precompute->add_option("--memory", pre_memory, "Memory file (defaults to paths.memory)");
    precompute->add_option("--output", pre_output, "Write here instead of in place");
    precompute->add_flag("--overwrite", pre_overwrite, "Recompute vectors already cached");

    // retrieve
    auto* retrieve_cmd = app.add_subcommand("retrieve", "Rank memory fragments for a query");
    std::string ret_config, ret_character, ret_query;
    StrategyFlags ret_flags;
    retrieve_cmd->add_option("--config", ret_config, "Engine config file")->required();
    retrieve_cmd->add_option("--character-id", ret_character, "Character to search")->required();
    retrieve_cmd->add_option("--query", ret_query, "Query text")->required();
    ret_flags.attach(retrieve_cmd);

    // chat
    auto* chat_cmd = app.add_subcommand("chat", "Interactive role-playing chat");
    std::string chat_config, chat_character;
    StrategyFlags chat_flags;
    bool chat_show_memory = false;
    chat_cmd->add_option("--config", chat_config, "Engine config file")->required();
    chat_cmd->add_option("--character-id", chat_character, "Character to play")->required();
    chat_cmd->add_flag("--show-memory", chat_show_memory,
                       "Print the fragments used for each reply");
    chat_flags.attach(chat_cmd);

    // evaluate
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "Run a questionnaire and score personality fidelity");
    std::string eval_config, eval_questionnaire;
    std::optional<std::string> eval_labels, eval_output;
    std::vector<std::string> eval_characters;
    StrategyFlags eval_flags;
    evaluate_cmd->add_option("--config", eval_config, "Engine config file")->required();
    evaluate_cmd->add_option("--questionnaire", eval_questionnaire, "Questionnaire JSONL")
        ->required();
    evaluate_cmd->add_option("--labels", eval_labels, "Labels JSONL (default: profile labels)");
    evaluate_cmd->add_option("--characters", eval_characters,
                             "Character ids (default: every profile)");
    evaluate_cmd->add_option("--output", eval_output, "Write the report CSV here");
    eval_flags.attach(evaluate_cmd);

    // compare
    auto* compare_cmd =
        app.add_subcommand("compare", "Compare retrieval strategies on one questionnaire");
    std::string cmp_config, cmp_questionnaire;
    std::optional<std::string> cmp_labels, cmp_output;
    std::vector<std::string> cmp_characters, cmp_strategies;
    StrategyFlags cmp_flags;
    compare_cmd->add_option("--config", cmp_config, "Engine config file")->required();
    compare_cmd->add_option("--questionnaire", cmp_questionnaire, "Questionnaire JSONL")
        ->required();
    compare_cmd->add_option("--labels", cmp_labels, "Labels JSONL (default: profile labels)");
    compare_cmd->add_option("--characters", cmp_characters,
                            "Character ids (default: every profile)");
    compare_cmd->add_option("--strategies", cmp_strategies,
                            "Strategies to compare (default: all five)");
    compare_cmd->add_option("--output", cmp_output, "Write the report CSV here");
    cmp_flags.attach(compare_cmd);

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP retrieval/chat service");
    std::string srv_config, srv_host = "127.0.0.1";
    int srv_port = 8080;
    serve_cmd->add_option("--config", srv_config, "Engine config file")->required();
    serve_cmd->add_option("--host", srv_host, "Bind address");
    serve_cmd->add_option("--port", srv_port, "Port (0 picks an ephemeral port)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*ingest) return cmd_ingest(ingest_input, ingest_output, ingest_character);
        if (*precompute) return cmd_precompute(pre_config, pre_memory, pre_output, pre_overwrite);
        if (*retrieve_cmd) return cmd_retrieve(ret_config, ret_character, ret_query, ret_flags);
        if (*chat_cmd) return cmd_chat(chat_config, chat_character, chat_flags, chat_show_memory);
        if (*evaluate_cmd) {
            return cmd_evaluate(eval_config, eval_questionnaire, eval_labels, eval_characters,
                                eval_flags, eval_output);
        }
        if (*compare_cmd) {
            return cmd_compare(cmp_config, cmp_questionnaire, cmp_labels, cmp_characters,
                               cmp_strategies, cmp_flags, cmp_output);
        }
        if (*serve_cmd) return cmd_serve(srv_config, srv_host, srv_port);
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
