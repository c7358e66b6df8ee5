#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "cptk/dedup/minhash.hpp"

namespace cptk::dedup {

struct DedupOptions {
    MinHashScheme scheme;
    uint32_t ngram = 5;
    // When set, band-key collisions are confirmed with an exact Jaccard
    // check at this threshold before documents are linked. Costs memory
    // (shingle sets are retained) but removes LSH false positives.
    std::optional<double> verify_jaccard;
};

// Everything dedup needs to know about one document. Computing this is the
// per-document parallelizable unit; clustering itself is sequential and
// order-insensitive.
struct DocBands {
    std::string id;
    bool unsignable = false;
    std::vector<uint64_t> keys;  // one per band; empty when unsignable
    ShingleSet shingles;         // retained only when verify_jaccard is set
};

DocBands compute_doc_bands(std::string_view doc_id, std::string_view text,
                           const DedupOptions& options);

struct DuplicateCluster {
    std::string survivor;              // lexicographically smallest member id
    std::vector<std::string> members;  // sorted ascending, size >= 2
};

struct DedupReport {
    std::vector<DuplicateCluster> clusters;   // sorted by survivor id
    std::vector<std::string> unsignable_ids;  // in input order; always kept
    uint64_t doc_count = 0;
};

// Links documents sharing at least one band key (optionally verified) with
// a union-find closure, then reports every component of size >= 2. The
// result does not depend on input order beyond the ids themselves, except
// that unsignable_ids preserves input order. Throws DataError on duplicate
// document ids.
DedupReport cluster_from_bands(const std::vector<DocBands>& docs, const DedupOptions& options);

// Ids that should be dropped to keep exactly one representative per
// cluster: every member except its survivor.
std::unordered_set<std::string> removed_ids(const DedupReport& report);

}  // namespace cptk::dedup
