#include "cptk/corpus/langid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cptk/error.hpp"
#include "cptk/unicode.hpp"
#include "json.hpp"

namespace cptk::corpus {

namespace {

constexpr size_t kMaxGram = 3;

// Character 1..3-grams over casefolded, whitespace-collapsed text, sliced on
// codepoint boundaries so multi-byte letters stay intact.
std::vector<std::string> extract_grams(std::string_view text) {
    std::string folded = uni::fold_for_shingling(text);
    std::vector<size_t> bounds{0};
    size_t pos = 0;
    while (pos < folded.size()) {
        if (!uni::decode_next(folded, pos)) break;
        bounds.push_back(pos);
    }
    size_t ncp = bounds.empty() ? 0 : bounds.size() - 1;
    std::vector<std::string> grams;
    grams.reserve(ncp * kMaxGram);
    for (size_t n = 1; n <= kMaxGram; ++n) {
        for (size_t i = 0; i + n <= ncp; ++i) {
            grams.push_back(folded.substr(bounds[i], bounds[i + n] - bounds[i]));
        }
    }
    return grams;
}

}  // namespace

void NgramLanguageScorer::train(const std::string& label, std::string_view text) {
    if (label.empty()) throw ConfigError("language label must be non-empty");
    auto& bag = counts_[label];
    auto& total = totals_[label];
    for (auto& gram : extract_grams(text)) {
        ++bag[gram];
        ++total;
    }
    rebuild_vocab();
}

void NgramLanguageScorer::rebuild_vocab() {
    std::set<std::string_view> vocab;
    for (const auto& [label, bag] : counts_) {
        for (const auto& [gram, count] : bag) vocab.insert(gram);
    }
    vocab_size_ = vocab.size();
}

std::vector<std::string> NgramLanguageScorer::labels() const {
    std::vector<std::string> out;
    out.reserve(counts_.size());
    for (const auto& [label, bag] : counts_) out.push_back(label);
    return out;
}

LanguagePrediction NgramLanguageScorer::score(std::string_view text) const {
    if (counts_.empty()) throw ConfigError("language scorer has no trained labels");

    auto grams = extract_grams(text);
    const double n_labels = static_cast<double>(counts_.size());
    if (grams.empty()) {
        // Nothing to condition on: uniform posterior, smallest label wins.
        return LanguagePrediction{counts_.begin()->first, 1.0 / n_labels};
    }

    // Add-one smoothing over the union vocabulary plus one slot for
    // unseen grams, so every gram has positive likelihood per label.
    const double vocab = static_cast<double>(vocab_size_ + 1);
    std::vector<std::pair<std::string, double>> loglik;
    loglik.reserve(counts_.size());
    for (const auto& [label, bag] : counts_) {
        const double denom = static_cast<double>(totals_.at(label)) + vocab;
        double ll = 0.0;
        for (const auto& gram : grams) {
            auto it = bag.find(gram);
            const double count = it == bag.end() ? 0.0 : static_cast<double>(it->second);
            ll += std::log((count + 1.0) / denom);
        }
        loglik.emplace_back(label, ll);
    }

    double max_ll = loglik.front().second;
    for (const auto& [label, ll] : loglik) max_ll = std::max(max_ll, ll);
    double z = 0.0;
    for (const auto& [label, ll] : loglik) z += std::exp(ll - max_ll);

    // std::map iteration is sorted, so ties resolve to the smallest label.
    const std::pair<std::string, double>* best = &loglik.front();
    for (const auto& entry : loglik) {
        if (entry.second > best->second) best = &entry;
    }
    return LanguagePrediction{best->first, std::exp(best->second - max_ll) / z};
}

void NgramLanguageScorer::save(const std::string& path) const {
    nlohmann::json doc;
    doc["format"] = "ngram-nb";
    doc["version"] = 1;
    doc["max_n"] = kMaxGram;
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [label, bag] : counts_) {
        nlohmann::json entry;
        entry["total"] = totals_.at(label);
        nlohmann::json grams = nlohmann::json::object();
        for (const auto& [gram, count] : bag) grams[gram] = count;
        entry["grams"] = std::move(grams);
        labels[label] = std::move(entry);
    }
    doc["labels"] = std::move(labels);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write language model: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw DataError("failed writing language model: " + path);
}

NgramLanguageScorer NgramLanguageScorer::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open language model: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": language model is not valid JSON: " + e.what());
    }
    if (doc.value("format", std::string()) != "ngram-nb") {
        throw DataError(path + ": not an ngram-nb language model");
    }
    NgramLanguageScorer scorer;
    for (const auto& [label, entry] : doc.at("labels").items()) {
        auto& bag = scorer.counts_[label];
        uint64_t total = 0;
        for (const auto& [gram, count] : entry.at("grams").items()) {
            bag[gram] = count.get<uint64_t>();
            total += count.get<uint64_t>();
        }
        scorer.totals_[label] = total;
        if (entry.contains("total") && entry.at("total").get<uint64_t>() != total) {
            throw DataError(path + ": gram counts for '" + label + "' do not sum to total");
        }
    }
    if (scorer.counts_.empty()) throw DataError(path + ": language model has no labels");
    scorer.rebuild_vocab();
    return scorer;
}

FilterVerdict language_filter(std::string_view text, const LanguageScorer& scorer,
                              const FilterConfig& cfg) {
    cfg.validate();
    if (cfg.lang_label.empty()) {
        throw ConfigError("language filter requires a target language label");
    }
    LanguagePrediction pred = scorer.score(text);
    bool keep = pred.label == cfg.lang_label && pred.probability >= cfg.lang_threshold;
    FilterVerdict verdict;
    verdict.kept = keep;
    verdict.reason = keep ? FilterReason::kPass : FilterReason::kLanguage;
    verdict.score = pred.probability;
    return verdict;
}

}  // namespace cptk::corpus
