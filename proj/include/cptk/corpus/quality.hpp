#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cptk::corpus {

// Heuristic quality gate over a single document. Thresholds are strict
// inequalities: a document sitting exactly on a bound is kept. Defaults
// follow common web-corpus practice for morphologically rich languages
// (note the minimum word count of 4 and the average-word-length band).
struct FilterConfig {
    uint32_t min_words = 4;
    double min_avg_word_len = 3.0;   // codepoints, inclusive bound
    double max_avg_word_len = 12.0;  // codepoints, inclusive bound
    double max_symbol_word_ratio = 0.1;
    double max_non_alpha_frac = 0.7;
    double max_bullet_line_frac = 0.9;
    double max_ellipsis_line_frac = 0.3;
    bool reject_curly_markup = true;

    // Language gate (used by language_filter): keep when the top label
    // equals lang_label with probability >= lang_threshold (inclusive).
    std::string lang_label;
    double lang_threshold = 0.5;

    // Throws ConfigError when a ratio leaves [0,1], the average-length
    // band is inverted, or min_words is zero.
    void validate() const;
};

enum class FilterReason {
    kPass,
    kTooShort,
    kCurlyMarkup,
    kAvgWordLen,
    kSymbolRatio,
    kNonAlpha,
    kBulletLines,
    kEllipsisLines,
    kLanguage,
};

std::string_view filter_reason_name(FilterReason reason);

struct FilterVerdict {
    bool kept = false;
    FilterReason reason = FilterReason::kPass;
    // Language probability when the language gate produced one.
    std::optional<double> score;
};

// Side-channel measurements, exposed so tests and reports can audit the
// exact quantities the decision used.
struct QualityStats {
    uint64_t word_count = 0;
    double avg_word_len = 0.0;  // codepoints per word
    double hash_word_ratio = 0.0;
    double ellipsis_word_ratio = 0.0;
    double non_alpha_frac = 0.0;
    uint64_t line_count = 0;
    double bullet_line_frac = 0.0;
    double ellipsis_line_frac = 0.0;
    bool has_curly = false;
};

QualityStats measure_quality(std::string_view text);

// Applies the checks in a fixed order and reports the first failure:
// word count, curly markup, average word length, symbol-to-word ratio
// (hash marks or ellipses, each checked on its own), non-alphabetic word
// fraction, bullet-line fraction, ellipsis-line fraction.
FilterVerdict quality_filter(std::string_view text, const FilterConfig& cfg);

}  // namespace cptk::corpus
