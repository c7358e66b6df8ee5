#include "cptk/corpus/quality.hpp"

#include <vector>

#include "cptk/error.hpp"
#include "cptk/unicode.hpp"

namespace cptk::corpus {

namespace {

constexpr std::string_view kBulletDot = "•";       // •
constexpr std::string_view kHorizontalEllipsis = "…";  // …

size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    size_t count = 0;
    size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string_view::npos) {
        ++count;
        pos += needle.size();  // non-overlapping
    }
    return count;
}

// Lines are '\n'-separated; a trailing newline does not open an empty final
// line, matching the usual splitlines convention. A '\r' left by CRLF input
// is treated as line-local whitespace.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    size_t start = 0;
    while (start < text.size()) {
        size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

std::string_view strip_left_ws(std::string_view line) {
    size_t pos = 0;
    while (pos < line.size()) {
        size_t next = pos;
        auto cp = uni::decode_next(line, next);
        if (!cp || !uni::is_whitespace(*cp)) break;
        pos = next;
    }
    return line.substr(pos);
}

std::string_view strip_right_ws(std::string_view line) {
    // Walk from the front remembering the end of the last non-whitespace
    // codepoint; avoids reverse UTF-8 decoding.
    size_t keep = 0;
    size_t pos = 0;
    while (pos < line.size()) {
        auto cp = uni::decode_next(line, pos);
        if (!cp) break;
        if (!uni::is_whitespace(*cp)) keep = pos;
    }
    return line.substr(0, keep);
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

void FilterConfig::validate() const {
    auto ratio_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (min_words == 0) throw ConfigError("filter: min_words must be at least 1");
    if (!(min_avg_word_len >= 0.0) || !(max_avg_word_len >= min_avg_word_len)) {
        throw ConfigError("filter: average word length band is inverted or negative");
    }
    if (!ratio_ok(max_symbol_word_ratio) || !ratio_ok(max_non_alpha_frac) ||
        !ratio_ok(max_bullet_line_frac) || !ratio_ok(max_ellipsis_line_frac)) {
        throw ConfigError("filter: ratio thresholds must lie in [0, 1]");
    }
    if (!ratio_ok(lang_threshold)) {
        throw ConfigError("filter: lang_threshold must lie in [0, 1]");
    }
}

std::string_view filter_reason_name(FilterReason reason) {
    switch (reason) {
        case FilterReason::kPass: return "pass";
        case FilterReason::kTooShort: return "too_short";
        case FilterReason::kCurlyMarkup: return "curly_markup";
        case FilterReason::kAvgWordLen: return "avg_word_len";
        case FilterReason::kSymbolRatio: return "symbol_ratio";
        case FilterReason::kNonAlpha: return "non_alpha";
        case FilterReason::kBulletLines: return "bullet_lines";
        case FilterReason::kEllipsisLines: return "ellipsis_lines";
        case FilterReason::kLanguage: return "language";
    }
    return "unknown";
}

QualityStats measure_quality(std::string_view text) {
    QualityStats stats;
    stats.has_curly = text.find('{') != std::string_view::npos ||
                      text.find('}') != std::string_view::npos;

    auto words = uni::split_words(text);
    stats.word_count = words.size();

    uint64_t total_cps = 0;
    uint64_t non_alpha_words = 0;
    for (auto word : words) {
        total_cps += uni::codepoint_count(word);
        bool has_alpha = false;
        size_t pos = 0;
        while (pos < word.size()) {
            auto cp = uni::decode_next(word, pos);
            if (!cp) break;
            if (uni::is_alphabetic(*cp)) {
                has_alpha = true;
                break;
            }
        }
        if (!has_alpha) ++non_alpha_words;
    }
    if (stats.word_count > 0) {
        stats.avg_word_len = static_cast<double>(total_cps) / static_cast<double>(stats.word_count);
        stats.non_alpha_frac =
            static_cast<double>(non_alpha_words) / static_cast<double>(stats.word_count);

        size_t hash_count = count_occurrences(text, "#");
        size_t ellipsis_count = count_occurrences(text, kHorizontalEllipsis) +
                                count_occurrences(text, "...");
        stats.hash_word_ratio =
            static_cast<double>(hash_count) / static_cast<double>(stats.word_count);
        stats.ellipsis_word_ratio =
            static_cast<double>(ellipsis_count) / static_cast<double>(stats.word_count);
    }

    auto lines = split_lines(text);
    stats.line_count = lines.size();
    if (!lines.empty()) {
        uint64_t bullet_lines = 0;
        uint64_t ellipsis_lines = 0;
        for (auto line : lines) {
            auto lhs = strip_left_ws(line);
            if (starts_with(lhs, kBulletDot) || starts_with(lhs, "-") || starts_with(lhs, "*")) {
                ++bullet_lines;
            }
            auto rhs = strip_right_ws(line);
            if (ends_with(rhs, kHorizontalEllipsis) || ends_with(rhs, "...")) {
                ++ellipsis_lines;
            }
        }
        stats.bullet_line_frac =
            static_cast<double>(bullet_lines) / static_cast<double>(lines.size());
        stats.ellipsis_line_frac =
            static_cast<double>(ellipsis_lines) / static_cast<double>(lines.size());
    }
    return stats;
}

FilterVerdict quality_filter(std::string_view text, const FilterConfig& cfg) {
    cfg.validate();
    QualityStats stats = measure_quality(text);

    auto reject = [](FilterReason reason) {
        return FilterVerdict{false, reason, std::nullopt};
    };

    if (stats.word_count < cfg.min_words) return reject(FilterReason::kTooShort);
    if (cfg.reject_curly_markup && stats.has_curly) return reject(FilterReason::kCurlyMarkup);
    if (stats.avg_word_len < cfg.min_avg_word_len || stats.avg_word_len > cfg.max_avg_word_len) {
        return reject(FilterReason::kAvgWordLen);
    }
    if (stats.hash_word_ratio > cfg.max_symbol_word_ratio ||
        stats.ellipsis_word_ratio > cfg.max_symbol_word_ratio) {
        return reject(FilterReason::kSymbolRatio);
    }
    if (stats.non_alpha_frac > cfg.max_non_alpha_frac) {
        return reject(FilterReason::kNonAlpha);
    }
    if (stats.bullet_line_frac > cfg.max_bullet_line_frac) {
        return reject(FilterReason::kBulletLines);
    }
    if (stats.ellipsis_line_frac > cfg.max_ellipsis_line_frac) {
        return reject(FilterReason::kEllipsisLines);
    }
    return FilterVerdict{true, FilterReason::kPass, std::nullopt};
}

}  // namespace cptk::corpus
