#include "emomem/memory_store.hpp"

#include <cmath>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "emomem/errors.hpp"

namespace emomem {

using json = nlohmann::json;

const MemoryFragment* MemoryUnit::find(const std::string& id) const {
    for (const auto& fragment : fragments) {
        if (fragment.id == id) return &fragment;
    }
    return nullptr;
}

MemoryUnit MemoryUnit::for_character(const std::string& character_id) const {
    MemoryUnit unit;
    for (const auto& fragment : fragments) {
        if (fragment.character_id == character_id) unit.fragments.push_back(fragment);
    }
    return unit;
}

namespace {

std::string require_string(const json& record, const char* key, std::size_t line) {
    if (!record.contains(key) || !record.at(key).is_string()) {
        throw FormatError(std::string("missing or non-string key '") + key + "'", line);
    }
    return record.at(key).get<std::string>();
}

std::optional<SemanticVector> read_semantic(const json& record, std::size_t line) {
    if (!record.contains("semantic") || record.at("semantic").is_null()) return std::nullopt;
    const auto& arr = record.at("semantic");
    if (!arr.is_array()) {
        throw FormatError("'semantic' must be an array of numbers or null", line);
    }
    SemanticVector v;
    v.reserve(arr.size());
    for (const auto& x : arr) {
        if (!x.is_number()) {
            throw FormatError("'semantic' must contain only numbers", line);
        }
        const double value = x.get<double>();
        if (!std::isfinite(value)) {
            throw FormatError("'semantic' contains a non-finite value", line);
        }
        v.push_back(value);
    }
    return v;
}

std::optional<EmotionVector> read_emotion(const json& record, std::size_t line) {
    if (!record.contains("emotion") || record.at("emotion").is_null()) return std::nullopt;
    const auto& arr = record.at("emotion");
    if (!arr.is_array() || arr.size() != kEmotionDimensions) {
        throw FormatError("'emotion' must be an array of 8 integers or null", line);
    }
    EmotionVector v;
    for (std::size_t i = 0; i < kEmotionDimensions; ++i) {
        if (!arr[i].is_number_integer()) {
            throw FormatError("'emotion' must contain only integers", line);
        }
        v.values[i] = arr[i].get<int>();
    }
    if (!v.is_valid()) {
        throw FormatError("'emotion' intensities must lie in [1, 10]", line);
    }
    return v;
}

json fragment_to_json(const MemoryFragment& fragment) {
    json record;
    record["id"] = fragment.id;
    record["character_id"] = fragment.character_id;
    record["text"] = fragment.text;
    record["semantic"] = fragment.semantic ? json(*fragment.semantic) : json(nullptr);
    if (fragment.emotion) {
        record["emotion"] = json(std::vector<int>(fragment.emotion->values.begin(),
                                                  fragment.emotion->values.end()));
    } else {
        record["emotion"] = nullptr;
    }
    record["source"] = fragment.source ? json(*fragment.source) : json(nullptr);
    return record;
}

std::optional<PersonalityLabel> read_labels(const json& record, std::size_t line) {
    if (!record.contains("labels") || record.at("labels").is_null()) return std::nullopt;
    const auto& obj = record.at("labels");
    if (!obj.is_object()) {
        throw FormatError("'labels' must be an object or null", line);
    }
    PersonalityLabel label;
    try {
        if (obj.contains("mbti_type") && !obj.at("mbti_type").is_null()) {
            label.mbti_type = obj.at("mbti_type").get<std::string>();
        }
        if (obj.contains("mbti_scores") && !obj.at("mbti_scores").is_null()) {
            label.mbti_scores = obj.at("mbti_scores").get<std::array<double, 4>>();
        }
        if (obj.contains("bfi_scores") && !obj.at("bfi_scores").is_null()) {
            label.bfi_scores = obj.at("bfi_scores").get<std::array<double, 5>>();
        }
        label.validate();
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed 'labels': ") + e.what(), line);
    } catch (const Error& e) {
        throw FormatError(std::string("invalid 'labels': ") + e.what(), line);
    }
    return label;
}

json labels_to_json(const PersonalityLabel& label) {
    json obj;
    obj["mbti_type"] = label.mbti_type ? json(*label.mbti_type) : json(nullptr);
    obj["mbti_scores"] = label.mbti_scores ? json(*label.mbti_scores) : json(nullptr);
    obj["bfi_scores"] = label.bfi_scores ? json(*label.bfi_scores) : json(nullptr);
    return obj;
}

}  // namespace

MemoryUnit load_memory(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open memory file " + path.string());
    }
    MemoryUnit unit;
    std::unordered_set<std::string> seen_ids;
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
        if (!record.is_object()) {
            throw FormatError("record must be a JSON object", line_no);
        }
        MemoryFragment fragment;
        fragment.id = require_string(record, "id", line_no);
        fragment.character_id = require_string(record, "character_id", line_no);
        fragment.text = require_string(record, "text", line_no);
        if (fragment.text.empty()) {
            throw FormatError("'text' must be non-empty", line_no);
        }
        fragment.semantic = read_semantic(record, line_no);
        fragment.emotion = read_emotion(record, line_no);
        if (record.contains("source") && !record.at("source").is_null()) {
            if (!record.at("source").is_string()) {
                throw FormatError("'source' must be a string or null", line_no);
            }
            fragment.source = record.at("source").get<std::string>();
        }
        if (!seen_ids.insert(fragment.id).second) {
            throw DuplicateIdError(fragment.id, line_no);
        }
        unit.fragments.push_back(std::move(fragment));
    }
    return unit;
}

void save_memory(const MemoryUnit& unit, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write memory file " + path.string());
    }
    for (const auto& fragment : unit.fragments) {
        out << fragment_to_json(fragment).dump() << '\n';
    }
    if (!out) {
        throw Error("write failed for memory file " + path.string());
    }
}

std::vector<CharacterProfile> load_profiles(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open profile file " + path.string());
    }
    std::vector<CharacterProfile> profiles;
    std::unordered_set<std::string> seen_ids;
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
        CharacterProfile profile;
        profile.character_id = require_string(record, "character_id", line_no);
        profile.name = require_string(record, "name", line_no);
        profile.profile_text = require_string(record, "profile_text", line_no);
        if (profile.profile_text.empty()) {
            throw FormatError("'profile_text' must be non-empty", line_no);
        }
        profile.labels = read_labels(record, line_no);
        if (!seen_ids.insert(profile.character_id).second) {
            throw DuplicateIdError(profile.character_id, line_no);
        }
        profiles.push_back(std::move(profile));
    }
    return profiles;
}

void save_profiles(const std::vector<CharacterProfile>& profiles,
                   const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write profile file " + path.string());
    }
    for (const auto& profile : profiles) {
        json record;
        record["character_id"] = profile.character_id;
        record["name"] = profile.name;
        record["profile_text"] = profile.profile_text;
        record["labels"] = profile.labels ? labels_to_json(*profile.labels) : json(nullptr);
        out << record.dump() << '\n';
    }
    if (!out) {
        throw Error("write failed for profile file " + path.string());
    }
}

std::size_t PrecomputeReport::ok_count() const {
    std::size_t n = 0;
    for (const auto& row : rows) n += row.ok();
    return n;
}

std::size_t PrecomputeReport::failed_count() const {
    return rows.size() - ok_count();
}

std::vector<std::string> PrecomputeReport::failed_ids() const {
    std::vector<std::string> ids;
    for (const auto& row : rows) {
        if (!row.ok()) ids.push_back(row.fragment_id);
    }
    return ids;
}

MemoryUnit ingest_dialogues(const std::filesystem::path& path,
                            const std::string& character_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open dialogue file " + path.string());
    }
    if (character_id.empty()) {
        throw Error("ingest: character_id must be non-empty");
    }
    MemoryUnit unit;
    std::string line;
    std::size_t line_no = 0;
    std::size_t row = 0;
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
        const std::string question = require_string(record, "question", line_no);
        const std::string answer = require_string(record, "answer", line_no);
        if (question.empty() || answer.empty()) {
            throw FormatError("'question' and 'answer' must be non-empty", line_no);
        }
        ++row;
        MemoryFragment fragment;
        std::string seq = std::to_string(row);
        if (seq.size() < 5) seq.insert(0, 5 - seq.size(), '0');
        fragment.id = character_id + "-" + seq;
        fragment.character_id = character_id;
        fragment.text = "Q: " + question + "\nA: " + answer;
        if (record.contains("source") && !record.at("source").is_null()) {
            if (!record.at("source").is_string()) {
                throw FormatError("'source' must be a string or null", line_no);
            }
            fragment.source = record.at("source").get<std::string>();
        }
        unit.fragments.push_back(std::move(fragment));
    }
    return unit;
}

MemoryUnit precompute_vectors(const MemoryUnit& unit, EmbeddingBackend& embedder,
                              ChatBackend& scorer, const PromptTemplate& emotion_prompt,
                              bool overwrite, PrecomputeReport* report, int reprompt_budget) {
    MemoryUnit result = unit;
    PrecomputeReport local;
    for (auto& fragment : result.fragments) {
        PrecomputeRow row;
        row.fragment_id = fragment.id;
        const bool need_semantic = overwrite || !fragment.semantic.has_value();
        const bool need_emotion = overwrite || !fragment.emotion.has_value();
        if (!need_semantic && !need_emotion) {
            row.skipped = true;
            local.rows.push_back(std::move(row));
            continue;
        }
        try {
            if (need_semantic) {
                fragment.semantic = embed(fragment.text, embedder);
                row.embedded = true;
            }
            if (need_emotion) {
                fragment.emotion =
                    score_emotion(fragment.text, scorer, emotion_prompt, reprompt_budget);
                row.scored = true;
            }
        } catch (const Error& e) {
            row.error = e.what();
        }
        local.rows.push_back(std::move(row));
    }
    if (report) *report = std::move(local);
    return result;
}

}  // namespace emomem
