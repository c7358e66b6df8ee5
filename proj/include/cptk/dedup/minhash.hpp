#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cptk::dedup {

// LSH geometry: 14 bands x 32 rows = 448 hash functions. With these
// parameters the probability that two documents share at least one band
// is 1-(1-s^32)^14, i.e. ~0.011 at Jaccard 0.80, ~0.387 at 0.90 and
// ~0.951 at 0.95 — a sharp knee just below the 0.95 operating point.
struct MinHashScheme {
    uint32_t bands = 14;
    uint32_t rows = 32;
    uint64_t seed = 0;

    uint32_t num_hashes() const { return bands * rows; }
};

// The set of word n-gram fingerprints for one document. Shingles are
// 64-bit truncations of the SHA-1 of each n-word window over casefolded,
// whitespace-collapsed text; the vector is sorted and duplicate-free so
// it behaves as a set.
struct ShingleSet {
    std::string doc_id;
    uint32_t ngram = 5;
    std::vector<uint64_t> shingles;

    bool empty() const { return shingles.empty(); }
};

ShingleSet shingle(std::string_view doc_id, std::string_view text, uint32_t ngram = 5);

// |A ∩ B| / |A ∪ B|; both inputs must be sorted unique. Two empty sets
// have similarity 0 by convention.
double jaccard_exact(const ShingleSet& a, const ShingleSet& b);

struct MinHashSignature {
    std::string doc_id;
    std::vector<uint64_t> values;  // one minimum per hash function
};

// Per-index hash family h_k(x) = mix64(x ^ salt_k) with salts derived from
// (scheme seed, k); the signature stores the minimum of h_k over the
// shingle set. Throws DataError for an empty shingle set — such documents
// cannot be signed and must be reported, not silently dropped.
MinHashSignature minhash_signature(const ShingleSet& set, const MinHashScheme& scheme);

// One 64-bit key per band: a SHA-1 truncation over the band index and its
// 32 row values. Documents agreeing on all rows of some band collide.
std::vector<uint64_t> band_keys(const MinHashSignature& sig, const MinHashScheme& scheme);

// Analytic probability that two documents with Jaccard similarity s share
// at least one band: 1 - (1 - s^rows)^bands.
double lsh_candidate_probability(double s, const MinHashScheme& scheme);

}  // namespace cptk::dedup
