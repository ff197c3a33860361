#include "emomem/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emomem/errors.hpp"
#include "emomem/prompt_builders.hpp"

namespace emomem {

using json = nlohmann::json;

void Questionnaire::validate() const {
    for (const auto& item : items) {
        if (item.id.empty() || item.text.empty()) {
            throw Error("questionnaire item must have a non-empty id and text");
        }
        dimension_index(instrument, item.dimension);  // throws on unknown dimension
    }
}

Questionnaire load_questionnaire(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open questionnaire file " + path.string());
    }
    Questionnaire questionnaire;
    bool instrument_set = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        try {
            QuestionnaireItem item;
            item.id = record.at("id").get<std::string>();
            item.text = record.at("text").get<std::string>();
            item.dimension = record.at("dimension").get<std::string>();
            const Instrument inst = parse_instrument(record.at("instrument").get<std::string>());
            if (!instrument_set) {
                questionnaire.instrument = inst;
                instrument_set = true;
            } else if (inst != questionnaire.instrument) {
                throw FormatError("questionnaire mixes instruments", line_no);
            }
            questionnaire.items.push_back(std::move(item));
        } catch (const json::exception& e) {
            throw FormatError(std::string("malformed item: ") + e.what(), line_no);
        }
    }
    questionnaire.validate();
    return questionnaire;
}

bool AssessmentResult::complete() const {
    if (dimensions.size() != dimension_count(instrument)) return false;
    return std::all_of(dimensions.begin(), dimensions.end(),
                       [](const DimensionAssessment& d) { return d.ok; });
}

std::string AssessmentResult::type_string() const {
    std::string type;
    for (const auto& d : dimensions) type += d.ok ? d.letter : '?';
    return type;
}

Transcript administer(const CharacterProfile& character, const MemoryUnit& unit,
                      const Questionnaire& questionnaire, const RetrievalStrategy& strategy,
                      int k, const TemplateRegistry& templates, const EvalBackends& backends) {
    questionnaire.validate();
    Transcript transcript;
    transcript.character_id = character.character_id;
    transcript.character_name = character.name;
    transcript.instrument = questionnaire.instrument;
    for (const auto& item : questionnaire.items) {
        TranscriptEntry entry;
        entry.item_id = item.id;
        entry.dimension = item.dimension;
        entry.question = item.text;
        try {
            const Query query = encode_query(item.text, backends.embedder, backends.scorer,
                                             templates.get(kEmotionScoringTemplate));
            const auto results = retrieve(query, unit, strategy, k);
            std::vector<MemoryFragment> memories;
            memories.reserve(results.size());
            for (const auto& scored : results) {
                entry.fragment_ids.push_back(scored.fragment_id);
                memories.push_back(*unit.find(scored.fragment_id));
            }
            const ChatRequest request =
                build_generation_prompt(character, memories, item.text, templates);
            entry.reply = chat(request, backends.generator);
        } catch (const Error& e) {
            entry.ok = false;
            entry.error = e.what();
        }
        transcript.entries.push_back(std::move(entry));
    }
    return transcript;
}

namespace {

// First numeric token in the judge's reply; must land in [0, 1].
double parse_judge_score(const std::string& reply) {
    static const std::regex number("[-+]?(?:\\d+\\.?\\d*|\\.\\d+)(?:[eE][-+]?\\d+)?");
    std::smatch match;
    if (!std::regex_search(reply, match, number)) {
        throw ParseError("judge reply contains no number: " + reply);
    }
    double value = 0.0;
    try {
        value = std::stod(match.str());
    } catch (const std::out_of_range&) {
        throw ParseError("judge score does not fit a double: " + reply);
    }
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ParseError("judge score " + match.str() + " outside [0, 1]: " + reply);
    }
    return value;
}

std::string transcript_block(const Transcript& transcript, const std::string& dimension) {
    std::string block;
    for (const auto& entry : transcript.entries) {
        if (!entry.ok || entry.dimension != dimension) continue;
        if (!block.empty()) block += '\n';
        block += "Q: " + entry.question + "\nA: " + entry.reply;
    }
    return block;
}

}  // namespace

AssessmentResult assess(const Transcript& transcript, const TemplateRegistry& templates,
                        ChatBackend& judge, int reprompt_budget) {
    AssessmentResult result;
    result.instrument = transcript.instrument;
    const auto& dims = dimensions_of(transcript.instrument);
    for (std::size_t i = 0; i < dims.size(); ++i) {
        DimensionAssessment assessment;
        assessment.dimension = dims[i].key;
        const std::string block = transcript_block(transcript, dims[i].key);
        if (block.empty()) {
            assessment.ok = false;
            assessment.error = "no transcript entries for dimension " + dims[i].key;
            result.dimensions.push_back(std::move(assessment));
            continue;
        }
        ChatRequest request;
        request.messages.push_back(
            {Role::User, render(templates.get(kAssessmentTemplate),
                                {{"character_name", transcript.character_name},
                                 {"dimension", dims[i].key},
                                 {"first_pole", dims[i].first_pole},
                                 {"second_pole", dims[i].second_pole},
                                 {"transcript", block}})});
        std::string failure;
        bool done = false;
        for (int attempt = 0; attempt <= reprompt_budget && !done; ++attempt) {
            try {
                const std::string reply = chat(request, judge);
                assessment.score = parse_judge_score(reply);
                assessment.letter =
                    letter_for_score(transcript.instrument, i, assessment.score);
                done = true;
            } catch (const ParseError& e) {
                failure = e.what();
            } catch (const BackendError& e) {
                failure = e.what();
                break;
            }
        }
        if (!done) {
            assessment.ok = false;
            assessment.error = failure;
        }
        result.dimensions.push_back(std::move(assessment));
    }
    return result;
}

namespace {

char label_letter(const PersonalityLabel& label, Instrument instrument, std::size_t dim,
                  const std::string& character_id) {
    if (instrument == Instrument::Mbti) {
        if (label.mbti_type) {
            return static_cast<char>(
                std::toupper(static_cast<unsigned char>((*label.mbti_type)[dim])));
        }
        if (label.mbti_scores) {
            return letter_for_score(instrument, dim, (*label.mbti_scores)[dim]);
        }
    } else if (label.bfi_scores) {
        return letter_for_score(instrument, dim, (*label.bfi_scores)[dim]);
    }
    throw MissingLabelError({character_id});
}

double label_score(const PersonalityLabel& label, Instrument instrument, std::size_t dim,
                   const std::string& character_id) {
    if (instrument == Instrument::Mbti) {
        if (label.mbti_scores) return (*label.mbti_scores)[dim];
        if (label.mbti_type) {
            // Type-only labels binarize: 1 toward the first pole, else 0.
            const char c = label_letter(label, instrument, dim, character_id);
            return c == dimensions_of(instrument)[dim].first_letter ? 1.0 : 0.0;
        }
    } else if (label.bfi_scores) {
        return (*label.bfi_scores)[dim];
    }
    throw MissingLabelError({character_id});
}

bool label_covers(const PersonalityLabel& label, Instrument instrument) {
    if (instrument == Instrument::Mbti) return label.mbti_type || label.mbti_scores;
    return label.bfi_scores.has_value();
}

}  // namespace

Metrics compute_metrics(const std::map<std::string, AssessmentResult>& results,
                        const std::map<std::string, PersonalityLabel>& labels,
                        Instrument instrument) {
    if (results.empty()) {
        throw Error("compute_metrics: no assessment results");
    }
    std::vector<std::string> missing;
    for (const auto& [character_id, _] : results) {
        auto it = labels.find(character_id);
        if (it == labels.end() || !label_covers(it->second, instrument)) {
            missing.push_back(character_id);
        }
    }
    if (!missing.empty()) {
        throw MissingLabelError(std::move(missing));
    }

    const std::size_t dims = dimension_count(instrument);
    std::size_t dim_matches = 0, full_matches = 0, pair_count = 0;
    double sq_sum = 0.0, abs_sum = 0.0;
    for (const auto& [character_id, result] : results) {
        if (result.instrument != instrument) {
            throw Error("assessment for '" + character_id + "' uses a different instrument");
        }
        if (!result.complete()) {
            throw Error("assessment for '" + character_id + "' has failed dimensions");
        }
        const PersonalityLabel& label = labels.at(character_id);
        bool all_match = true;
        for (std::size_t d = 0; d < dims; ++d) {
            const char predicted = result.dimensions[d].letter;
            const char truth = label_letter(label, instrument, d, character_id);
            if (predicted == truth) {
                ++dim_matches;
            } else {
                all_match = false;
            }
            const double err = result.dimensions[d].score -
                               label_score(label, instrument, d, character_id);
            sq_sum += err * err;
            abs_sum += std::abs(err);
            ++pair_count;
        }
        if (all_match) ++full_matches;
    }

    Metrics metrics;
    metrics.acc_dim = static_cast<double>(dim_matches) / static_cast<double>(pair_count);
    metrics.acc_full = static_cast<double>(full_matches) / static_cast<double>(results.size());
    metrics.mse = sq_sum / static_cast<double>(pair_count);
    metrics.mae = abs_sum / static_cast<double>(pair_count);
    return metrics;
}

namespace {

std::string format_metric(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

}  // namespace

std::string StrategyReport::to_csv() const {
    std::string csv = "strategy,method,acc_dim,acc_full,mse,mae\n";
    for (const auto& row : rows) {
        csv += row.strategy + ',' + row.method + ',';
        if (row.ok) {
            csv += format_metric(row.metrics.acc_dim) + ',' +
                   format_metric(row.metrics.acc_full) + ',' + format_metric(row.metrics.mse) +
                   ',' + format_metric(row.metrics.mae);
        } else {
            csv += "nan,nan,nan,nan";
        }
        csv += '\n';
    }
    return csv;
}

std::string StrategyReport::to_table() const {
    std::ostringstream out;
    out << instrument_name(instrument) << " strategy comparison\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %-22s %10s %10s %10s %10s\n", "strategy", "method",
                  "acc_dim", "acc_full", "mse", "mae");
    out << line;
    for (const auto& row : rows) {
        if (row.ok) {
            std::snprintf(line, sizeof(line), "%-14s %-22s %10.4f %10.4f %10.4f %10.4f\n",
                          row.strategy.c_str(), row.method.c_str(), row.metrics.acc_dim,
                          row.metrics.acc_full, row.metrics.mse, row.metrics.mae);
        } else {
            std::snprintf(line, sizeof(line), "%-14s %-22s failed: %s\n", row.strategy.c_str(),
                          row.method.c_str(), row.error.c_str());
        }
        out << line;
    }
    return out.str();
}

StrategyReport compare_strategies(const std::vector<CharacterProfile>& characters,
                                  const MemoryUnit& all_memory,
                                  const Questionnaire& questionnaire,
                                  const std::vector<RetrievalStrategy>& strategies, int k,
                                  const TemplateRegistry& templates,
                                  const EvalBackends& backends,
                                  const std::map<std::string, PersonalityLabel>& labels) {
    StrategyReport report;
    report.instrument = questionnaire.instrument;
    for (const auto& strategy : strategies) {
        StrategyReportRow row;
        row.strategy = strategy_flag_name(strategy.variant);
        row.method = strategy_display_name(strategy.variant);
        try {
            std::map<std::string, AssessmentResult> results;
            for (const auto& character : characters) {
                const MemoryUnit unit = all_memory.for_character(character.character_id);
                const Transcript transcript =
                    administer(character, unit, questionnaire, strategy, k, templates, backends);
                results[character.character_id] =
                    assess(transcript, templates, backends.judge);
            }
            row.metrics = compute_metrics(results, labels, questionnaire.instrument);
        } catch (const Error& e) {
            row.ok = false;
            row.error = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::map<std::string, PersonalityLabel> labels_from_profiles(
    const std::vector<CharacterProfile>& profiles) {
    std::map<std::string, PersonalityLabel> labels;
    for (const auto& profile : profiles) {
        if (profile.labels && !profile.labels->empty()) {
            labels[profile.character_id] = *profile.labels;
        }
    }
    return labels;
}

std::map<std::string, PersonalityLabel> load_labels(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open labels file " + path.string());
    }
    std::map<std::string, PersonalityLabel> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        try {
            const std::string character_id = record.at("character_id").get<std::string>();
            PersonalityLabel label;
            if (record.contains("mbti_type") && !record.at("mbti_type").is_null()) {
                label.mbti_type = record.at("mbti_type").get<std::string>();
            }
            if (record.contains("mbti_scores") && !record.at("mbti_scores").is_null()) {
                label.mbti_scores = record.at("mbti_scores").get<std::array<double, 4>>();
            }
            if (record.contains("bfi_scores") && !record.at("bfi_scores").is_null()) {
                label.bfi_scores = record.at("bfi_scores").get<std::array<double, 5>>();
            }
            label.validate();
            labels[character_id] = std::move(label);
        } catch (const json::exception& e) {
            throw FormatError(std::string("malformed label: ") + e.what(), line_no);
        } catch (const Error& e) {
            throw FormatError(std::string("invalid label: ") + e.what(), line_no);
        }
    }
    return labels;
}

}  // namespace emomem
