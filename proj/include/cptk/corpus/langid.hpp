#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cptk/corpus/quality.hpp"

namespace cptk::corpus {

struct LanguagePrediction {
    std::string label;
    double probability = 0.0;  // posterior of `label`, in [0,1]
};

// Pluggable language-identification backend. Implementations must be
// deterministic: the same text always yields the same prediction.
class LanguageScorer {
public:
    virtual ~LanguageScorer() = default;
    virtual LanguagePrediction score(std::string_view text) const = 0;
};

// Multinomial naive-Bayes over character 1..3-grams with add-one smoothing.
// Small, dependency-free, and good enough to separate languages with
// distinct character statistics. Posteriors come from a log-sum-exp over
// per-label log-likelihoods with a uniform prior.
class NgramLanguageScorer : public LanguageScorer {
public:
    void train(const std::string& label, std::string_view text);

    LanguagePrediction score(std::string_view text) const override;

    void save(const std::string& path) const;
    static NgramLanguageScorer load(const std::string& path);

    std::vector<std::string> labels() const;

private:
    // label -> (gram -> count); grams are UTF-8 substrings of 1..3 codepoints
    // extracted from the casefolded, whitespace-collapsed text.
    std::map<std::string, std::map<std::string, uint64_t>> counts_;
    std::map<std::string, uint64_t> totals_;
    uint64_t vocab_size_ = 0;

    void rebuild_vocab();
};

// Keeps the document when the scorer's top label matches cfg.language with
// probability >= cfg.language_threshold. The verdict always carries the
// probability so reports can show near-misses.
FilterVerdict language_filter(std::string_view text, const LanguageScorer& scorer,
                              const FilterConfig& cfg);

}  // namespace cptk::corpus
