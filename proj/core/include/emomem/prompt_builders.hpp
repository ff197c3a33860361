#pragma once

#include <string>
#include <vector>

#include "emomem/llm_gateway.hpp"
#include "emomem/memory_store.hpp"
#include "emomem/prompts.hpp"

namespace emomem {

// Registry keys the engine expects in a template directory.
inline constexpr const char* kGenerationTemplate = "generation";
inline constexpr const char* kEmotionScoringTemplate = "emotion_scoring";
inline constexpr const char* kAssessmentTemplate = "assessment";
inline constexpr const char* kNoMemoryNoticeTemplate = "no_memory_notice";

// Formats retrieved fragments as a numbered block, preserving retrieval
// order; an empty list renders the explicit no-memory notice instead.
std::string format_memories(const std::vector<MemoryFragment>& memories,
                            const TemplateRegistry& templates);

// Builds the single-message generation request: task description, role
// profile, retrieved memories, then the query, per the generation template.
ChatRequest build_generation_prompt(const CharacterProfile& profile,
                                    const std::vector<MemoryFragment>& memories,
                                    const std::string& query,
                                    const TemplateRegistry& templates);

}  // namespace emomem
