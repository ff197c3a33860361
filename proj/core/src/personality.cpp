#include "emomem/personality.hpp"

#include <cctype>

#include "emomem/errors.hpp"

namespace emomem {

Instrument parse_instrument(const std::string& name) {
    std::string lowered;
    for (char c : name) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lowered == "mbti") return Instrument::Mbti;
    if (lowered == "bfi") return Instrument::Bfi;
    throw ConfigError("unknown instrument '" + name + "' (expected MBTI or BFI)");
}

std::string instrument_name(Instrument instrument) {
    return instrument == Instrument::Mbti ? "MBTI" : "BFI";
}

const std::vector<PersonalityDimension>& dimensions_of(Instrument instrument) {
    static const std::vector<PersonalityDimension> mbti = {
        {"E/I", 'E', 'I', "Extroversion (E)", "Introversion (I)"},
        {"S/N", 'S', 'N', "Sensing (S)", "iNtuition (N)"},
        {"T/F", 'T', 'F', "Thinking (T)", "Feeling (F)"},
        {"J/P", 'J', 'P', "Judging (J)", "Perceiving (P)"},
    };
    static const std::vector<PersonalityDimension> bfi = {
        {"Openness", 'H', 'L', "high Openness", "low Openness"},
        {"Conscientiousness", 'H', 'L', "high Conscientiousness", "low Conscientiousness"},
        {"Extraversion", 'H', 'L', "high Extraversion", "low Extraversion"},
        {"Agreeableness", 'H', 'L', "high Agreeableness", "low Agreeableness"},
        {"Neuroticism", 'H', 'L', "high Neuroticism", "low Neuroticism"},
    };
    return instrument == Instrument::Mbti ? mbti : bfi;
}

std::size_t dimension_count(Instrument instrument) {
    return dimensions_of(instrument).size();
}

std::size_t dimension_index(Instrument instrument, const std::string& key) {
    const auto& dims = dimensions_of(instrument);
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i].key == key) return i;
    }
    throw Error("unknown " + instrument_name(instrument) + " dimension '" + key + "'");
}

char letter_for_score(Instrument instrument, std::size_t dim, double score) {
    const auto& d = dimensions_of(instrument).at(dim);
    // Tie at exactly 0.5 resolves to the first pole.
    return score >= 0.5 ? d.first_letter : d.second_letter;
}

void PersonalityLabel::validate() const {
    if (mbti_type) {
        const auto& dims = dimensions_of(Instrument::Mbti);
        if (mbti_type->size() != dims.size()) {
            throw Error("MBTI type '" + *mbti_type + "' must have exactly 4 letters");
        }
        for (std::size_t i = 0; i < dims.size(); ++i) {
            const char c = static_cast<char>(std::toupper(static_cast<unsigned char>((*mbti_type)[i])));
            if (c != dims[i].first_letter && c != dims[i].second_letter) {
                throw Error("MBTI type '" + *mbti_type + "' has invalid letter at axis " +
                            dims[i].key);
            }
        }
    }
    auto check_range = [](double v, const char* what) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(std::string(what) + " score " + std::to_string(v) +
                        " outside [0, 1]");
        }
    };
    if (mbti_scores) {
        for (double v : *mbti_scores) check_range(v, "MBTI");
    }
    if (bfi_scores) {
        for (double v : *bfi_scores) check_range(v, "BFI");
    }
}

}  // namespace emomem
