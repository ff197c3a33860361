#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace emomem {

enum class Instrument { Mbti, Bfi };

Instrument parse_instrument(const std::string& name);
std::string instrument_name(Instrument instrument);

// One assessed dimension: an MBTI axis or a Big Five trait. Scores are the
// proportion toward the first pole; the categorical letter falls out of the
// 0.5 threshold, ties resolving to the first pole.
struct PersonalityDimension {
    std::string key;          // "E/I", ..., or "Openness", ...
    char first_letter;        // 'E' / 'S' / 'T' / 'J', or 'H' (high) for BFI
    char second_letter;       // 'I' / 'N' / 'F' / 'P', or 'L' (low) for BFI
    std::string first_pole;   // human-readable pole description
    std::string second_pole;
};

const std::vector<PersonalityDimension>& dimensions_of(Instrument instrument);
std::size_t dimension_count(Instrument instrument);

// Index of `key` within the instrument's dimensions; throws on unknown keys.
std::size_t dimension_index(Instrument instrument, const std::string& key);

char letter_for_score(Instrument instrument, std::size_t dim, double score);

// Ground-truth personality labels for one character. MBTI may be given as a
// 4-letter type, per-axis scores, or both; BFI as five trait scores.
struct PersonalityLabel {
    std::optional<std::string> mbti_type;               // letters over E/I,S/N,T/F,J/P
    std::optional<std::array<double, 4>> mbti_scores;   // proportion toward E,S,T,J
    std::optional<std::array<double, 5>> bfi_scores;    // proportion toward high O,C,E,A,N

    void validate() const;
    bool empty() const { return !mbti_type && !mbti_scores && !bfi_scores; }
};

}  // namespace emomem
