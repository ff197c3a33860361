#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "emomem/memory_store.hpp"
#include "emomem/personality.hpp"
#include "emomem/prompts.hpp"
#include "emomem/retrieval.hpp"

namespace emomem {

struct QuestionnaireItem {
    std::string id;
    std::string text;
    std::string dimension;  // must name a dimension of the instrument
};

struct Questionnaire {
    Instrument instrument = Instrument::Mbti;
    std::vector<QuestionnaireItem> items;

    void validate() const;
};

// JSONL: one {id, text, dimension, instrument} object per line. All items
// must share one instrument.
Questionnaire load_questionnaire(const std::filesystem::path& path);

struct TranscriptEntry {
    std::string item_id;
    std::string dimension;
    std::string question;
    std::string reply;
    std::vector<std::string> fragment_ids;  // memories used for the reply
    bool ok = true;
    std::string error;
};

struct Transcript {
    std::string character_id;
    std::string character_name;
    Instrument instrument = Instrument::Mbti;
    std::vector<TranscriptEntry> entries;
};

struct DimensionAssessment {
    std::string dimension;
    double score = 0.0;  // proportion toward the first pole, in [0, 1]
    char letter = '?';
    bool ok = true;
    std::string error;
};

struct AssessmentResult {
    Instrument instrument = Instrument::Mbti;
    std::vector<DimensionAssessment> dimensions;  // fixed instrument order

    bool complete() const;
    std::string type_string() const;  // e.g. "INTJ", or "HLHLH" for BFI
};

struct Metrics {
    double acc_dim = 0.0;
    double acc_full = 0.0;
    double mse = 0.0;
    double mae = 0.0;
};

struct EvalBackends {
    EmbeddingBackend& embedder;
    ChatBackend& scorer;
    ChatBackend& generator;
    ChatBackend& judge;
};

// Puts every questionnaire item through encode -> retrieve -> prompt ->
// generate. Item-level backend failures are recorded on the entry and the
// run continues.
Transcript administer(const CharacterProfile& character, const MemoryUnit& unit,
                      const Questionnaire& questionnaire, const RetrievalStrategy& strategy,
                      int k, const TemplateRegistry& templates, const EvalBackends& backends);

// One judge call per dimension over that dimension's transcript entries;
// the reply must contain a number in [0, 1]. Failures are recorded per
// dimension after the re-prompt budget.
AssessmentResult assess(const Transcript& transcript, const TemplateRegistry& templates,
                        ChatBackend& judge, int reprompt_budget = kDefaultRepromptBudget);

// Letter accuracy per (character, dimension), exact full-profile accuracy,
// and MSE/MAE over per-dimension score-label pairs. Labels lacking numeric
// scores contribute binarized values (1 toward the first pole, else 0).
Metrics compute_metrics(const std::map<std::string, AssessmentResult>& results,
                        const std::map<std::string, PersonalityLabel>& labels,
                        Instrument instrument);

struct StrategyReportRow {
    std::string strategy;  // flag name, e.g. "c-a"
    std::string method;    // display name, e.g. "Emotional RAG (C-A)"
    Metrics metrics;
    bool ok = true;
    std::string error;
};

struct StrategyReport {
    Instrument instrument = Instrument::Mbti;
    std::vector<StrategyReportRow> rows;

    std::string to_csv() const;
    std::string to_table() const;
};

// Runs the full administer -> assess -> metrics pipeline once per strategy
// and emits one report row each. Per-strategy failures are recorded in the
// row; the report is still produced.
StrategyReport compare_strategies(const std::vector<CharacterProfile>& characters,
                                  const MemoryUnit& all_memory,
                                  const Questionnaire& questionnaire,
                                  const std::vector<RetrievalStrategy>& strategies, int k,
                                  const TemplateRegistry& templates,
                                  const EvalBackends& backends,
                                  const std::map<std::string, PersonalityLabel>& labels);

// Labels keyed by character_id, taken from profile records that carry them.
std::map<std::string, PersonalityLabel> labels_from_profiles(
    const std::vector<CharacterProfile>& profiles);

// JSONL: one {character_id, mbti_type?, mbti_scores?, bfi_scores?} per line.
std::map<std::string, PersonalityLabel> load_labels(const std::filesystem::path& path);

}  // namespace emomem
