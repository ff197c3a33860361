#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emomem/embedding.hpp"
#include "emomem/emotion.hpp"
#include "emomem/personality.hpp"

namespace emomem {

// One stored question-answer dialogue pair with optional cached vectors.
struct MemoryFragment {
    std::string id;
    std::string character_id;
    std::string text;
    std::optional<SemanticVector> semantic;
    std::optional<EmotionVector> emotion;
    std::optional<std::string> source;

    bool fully_cached() const { return semantic.has_value() && emotion.has_value(); }
    bool operator==(const MemoryFragment&) const = default;
};

// An immutable snapshot of a character's (or a whole file's) memory
// fragments, in load order. Mutating operations return new snapshots.
struct MemoryUnit {
    std::vector<MemoryFragment> fragments;

    std::size_t size() const { return fragments.size(); }
    bool empty() const { return fragments.empty(); }
    const MemoryFragment* find(const std::string& id) const;
    MemoryUnit for_character(const std::string& character_id) const;

    bool operator==(const MemoryUnit&) const = default;
};

struct CharacterProfile {
    std::string character_id;
    std::string name;
    std::string profile_text;
    std::optional<PersonalityLabel> labels;
};

// Line-delimited JSON persistence. Records keep file order; malformed lines
// raise FormatError with the line number, duplicated ids DuplicateIdError.
MemoryUnit load_memory(const std::filesystem::path& path);
void save_memory(const MemoryUnit& unit, const std::filesystem::path& path);

std::vector<CharacterProfile> load_profiles(const std::filesystem::path& path);
void save_profiles(const std::vector<CharacterProfile>& profiles,
                   const std::filesystem::path& path);

struct PrecomputeRow {
    std::string fragment_id;
    bool embedded = false;   // semantic vector computed on this run
    bool scored = false;     // emotion vector computed on this run
    bool skipped = false;    // both vectors were already cached
    std::string error;       // empty on success

    bool ok() const { return error.empty(); }
};

struct PrecomputeReport {
    std::vector<PrecomputeRow> rows;

    std::size_t ok_count() const;
    std::size_t failed_count() const;
    std::vector<std::string> failed_ids() const;
};

// Populates missing vectors on every fragment (all of them when
// `overwrite`). Per-fragment backend failures go into the report; fragments
// that succeeded keep their new vectors.
MemoryUnit precompute_vectors(const MemoryUnit& unit, EmbeddingBackend& embedder,
                              ChatBackend& scorer, const PromptTemplate& emotion_prompt,
                              bool overwrite, PrecomputeReport* report = nullptr,
                              int reprompt_budget = kDefaultRepromptBudget);

// Builds an uncached memory unit from raw dialogue rows: JSONL objects with
// "question" and "answer" strings (and optional "source"). One fragment per
// row, ids numbered in file order.
MemoryUnit ingest_dialogues(const std::filesystem::path& path, const std::string& character_id);

}  // namespace emomem
