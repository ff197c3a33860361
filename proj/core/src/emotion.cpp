#include "emomem/emotion.hpp"

#include <cmath>
#include <regex>

#include "emomem/errors.hpp"

namespace emomem {

bool EmotionVector::is_valid() const {
    for (int v : values) {
        if (v < kMinIntensity || v > kMaxIntensity) return false;
    }
    return true;
}

void EmotionVector::validate() const {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < kMinIntensity || values[i] > kMaxIntensity) {
            throw Error("emotion intensity '" + std::string(kEmotionNames[i]) + "' is " +
                        std::to_string(values[i]) + ", outside [" +
                        std::to_string(kMinIntensity) + ", " + std::to_string(kMaxIntensity) +
                        "]");
        }
    }
}

std::string EmotionVector::to_prompt_string() const {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        out += kEmotionNames[i];
        out += ':';
        out += std::to_string(values[i]);
    }
    return out;
}

EmotionVector parse_emotion_response(const std::string& raw) {
    EmotionVector result;
    for (std::size_t i = 0; i < kEmotionDimensions; ++i) {
        // Name as a whole word, an optional separator, then the integer.
        const std::regex pattern("\\b" + std::string(kEmotionNames[i]) +
                                     "\\b\\s*[:=-]?\\s*(-?\\d+)",
                                 std::regex::icase);
        auto begin = std::sregex_iterator(raw.begin(), raw.end(), pattern);
        auto end = std::sregex_iterator();
        const auto count = std::distance(begin, end);
        if (count == 0) {
            throw ParseError("emotion dimension '" + std::string(kEmotionNames[i]) +
                             "' missing or non-integer in reply: " + raw);
        }
        if (count > 1) {
            throw ParseError("emotion dimension '" + std::string(kEmotionNames[i]) +
                             "' appears " + std::to_string(count) + " times in reply: " + raw);
        }
        int value = 0;
        try {
            value = std::stoi((*begin)[1].str());
        } catch (const std::out_of_range&) {
            throw ParseError("emotion dimension '" + std::string(kEmotionNames[i]) +
                             "' has an out-of-range value in reply: " + raw);
        }
        if (value < kMinIntensity || value > kMaxIntensity) {
            throw ParseError("emotion dimension '" + std::string(kEmotionNames[i]) + "' is " +
                             std::to_string(value) + ", outside [" +
                             std::to_string(kMinIntensity) + ", " +
                             std::to_string(kMaxIntensity) + "]");
        }
        result.values[i] = value;
    }
    return result;
}

double emotion_distance(const EmotionVector& a, const EmotionVector& b) {
    a.validate();
    b.validate();
    double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (std::size_t i = 0; i < kEmotionDimensions; ++i) {
        dot += static_cast<double>(a.values[i]) * b.values[i];
        norm_a += static_cast<double>(a.values[i]) * a.values[i];
        norm_b += static_cast<double>(b.values[i]) * b.values[i];
    }
    return 1.0 - dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

EmotionVector score_emotion(const std::string& text, ChatBackend& scorer,
                            const PromptTemplate& prompt, int reprompt_budget) {
    if (text.empty()) {
        throw Error("score_emotion: text must be non-empty");
    }
    ChatRequest request;
    request.messages.push_back({Role::User, render(prompt, {{"text", text}})});

    std::string parse_failure;
    for (int attempt = 0; attempt <= reprompt_budget; ++attempt) {
        std::string reply;
        try {
            reply = chat(request, scorer);
        } catch (const BackendError& e) {
            throw BackendError(std::string("emotion scoring failed: ") + e.what());
        }
        try {
            return parse_emotion_response(reply);
        } catch (const ParseError& e) {
            parse_failure = e.what();
        }
    }
    throw ParseError("emotion scoring gave unusable output after " +
                     std::to_string(reprompt_budget + 1) + " attempts: " + parse_failure);
}

}  // namespace emomem
