#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "emomem/llm_gateway.hpp"
#include "emomem/prompts.hpp"

namespace emomem {

inline constexpr std::size_t kEmotionDimensions = 8;
inline constexpr std::array<const char*, kEmotionDimensions> kEmotionNames = {
    "joy", "acceptance", "fear", "surprise", "sadness", "disgust", "anger", "anticipation"};
inline constexpr int kMinIntensity = 1;
inline constexpr int kMaxIntensity = 10;

// Emotional state of a text: eight integer intensities in [1, 10], in the
// fixed dimension order of kEmotionNames. The minimum intensity of 1 keeps
// the norm strictly positive, so cosine similarity is always defined.
struct EmotionVector {
    std::array<int, kEmotionDimensions> values{};

    bool is_valid() const;
    void validate() const;

    // Canonical "joy:3, acceptance:4, ..." rendering.
    std::string to_prompt_string() const;

    int operator[](std::size_t i) const { return values[i]; }
    int& operator[](std::size_t i) { return values[i]; }
    bool operator==(const EmotionVector&) const = default;
};

// Extracts the eight named integer scores from a scorer reply, tolerant of
// surrounding prose, case, and separator drift. Every dimension must appear
// exactly once with an in-range value.
EmotionVector parse_emotion_response(const std::string& raw);

// 1 - cosine similarity; 0 for emotionally identical states, up to 2.
double emotion_distance(const EmotionVector& a, const EmotionVector& b);

inline constexpr int kDefaultRepromptBudget = 2;

// Asks the scorer backend to rate `text` with the emotion-scoring prompt
// template, re-prompting up to `reprompt_budget` additional times when the
// reply does not parse.
EmotionVector score_emotion(const std::string& text, ChatBackend& scorer,
                            const PromptTemplate& prompt,
                            int reprompt_budget = kDefaultRepromptBudget);

}  // namespace emomem
