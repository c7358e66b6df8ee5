#include "cptk/dedup/minhash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cptk/digest.hpp"
#include "cptk/error.hpp"
#include "cptk/unicode.hpp"

namespace cptk::dedup {

ShingleSet shingle(std::string_view doc_id, std::string_view text, uint32_t ngram) {
    if (ngram == 0) throw ConfigError("shingle size must be at least 1");
    ShingleSet set;
    set.doc_id = std::string(doc_id);
    set.ngram = ngram;

    std::string folded = uni::fold_for_shingling(text);
    // fold_for_shingling collapses all whitespace to single spaces, so
    // plain space-splitting recovers the words.
    std::vector<std::string_view> words;
    {
        std::string_view fv = folded;
        size_t start = 0;
        while (start < fv.size()) {
            size_t sp = fv.find(' ', start);
            if (sp == std::string_view::npos) {
                words.push_back(fv.substr(start));
                break;
            }
            if (sp > start) words.push_back(fv.substr(start, sp - start));
            start = sp + 1;
        }
    }
    if (words.size() < ngram) return set;  // empty: too short to shingle

    std::string window;
    for (size_t i = 0; i + ngram <= words.size(); ++i) {
        window.clear();
        for (size_t j = 0; j < ngram; ++j) {
            if (j > 0) window += ' ';
            window.append(words[i + j].data(), words[i + j].size());
        }
        set.shingles.push_back(sha1_u64(window));
    }
    std::sort(set.shingles.begin(), set.shingles.end());
    set.shingles.erase(std::unique(set.shingles.begin(), set.shingles.end()),
                       set.shingles.end());
    return set;
}

double jaccard_exact(const ShingleSet& a, const ShingleSet& b) {
    if (a.shingles.empty() && b.shingles.empty()) return 0.0;
    size_t i = 0, j = 0, inter = 0;
    while (i < a.shingles.size() && j < b.shingles.size()) {
        if (a.shingles[i] == b.shingles[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a.shingles[i] < b.shingles[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    size_t uni = a.shingles.size() + b.shingles.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

MinHashSignature minhash_signature(const ShingleSet& set, const MinHashScheme& scheme) {
    if (set.empty()) {
        throw DataError("document '" + set.doc_id +
                        "' has no shingles (shorter than the n-gram window) and cannot be signed");
    }
    MinHashSignature sig;
    sig.doc_id = set.doc_id;
    const uint32_t n = scheme.num_hashes();
    sig.values.assign(n, std::numeric_limits<uint64_t>::max());
    for (uint32_t k = 0; k < n; ++k) {
        const uint64_t salt = derive_seed(scheme.seed, k);
        uint64_t best = std::numeric_limits<uint64_t>::max();
        for (uint64_t x : set.shingles) {
            best = std::min(best, mix64(x ^ salt));
        }
        sig.values[k] = best;
    }
    return sig;
}

std::vector<uint64_t> band_keys(const MinHashSignature& sig, const MinHashScheme& scheme) {
    if (sig.values.size() != scheme.num_hashes()) {
        throw DataError("signature for '" + sig.doc_id + "' has " +
                        std::to_string(sig.values.size()) + " values, scheme expects " +
                        std::to_string(scheme.num_hashes()));
    }
    std::vector<uint64_t> keys;
    keys.reserve(scheme.bands);
    std::string buf;
    for (uint32_t b = 0; b < scheme.bands; ++b) {
        buf.clear();
        // Little-endian serialization of the band index and its rows keeps
        // the key a pure function of (band, row values) across platforms.
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((b >> (8 * i)) & 0xFF));
        for (uint32_t r = 0; r < scheme.rows; ++r) {
            uint64_t v = sig.values[static_cast<size_t>(b) * scheme.rows + r];
            for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
        }
        keys.push_back(sha1_u64(buf));
    }
    return keys;
}

double lsh_candidate_probability(double s, const MinHashScheme& scheme) {
    return 1.0 - std::pow(1.0 - std::pow(s, static_cast<double>(scheme.rows)),
                          static_cast<double>(scheme.bands));
}

}  // namespace cptk::dedup
