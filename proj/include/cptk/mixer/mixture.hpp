#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cptk/mixer/permutation.hpp"
#include "cptk/packer/tokenizer.hpp"

namespace cptk::mixer {

// Byte-level index of one JSONL corpus: where each document line lives and
// how many tokens it carries. Built once, reused by planning and drawing;
// the file digest pins the corpus so a changed file is detected instead of
// silently mis-sliced.
struct IndexedDoc {
    std::string id;
    uint64_t byte_offset = 0;  // start of the line in the file
    uint64_t byte_length = 0;  // line length without the newline
    uint64_t token_count = 0;  // includes the end-of-text delimiter
};

struct CorpusIndex {
    std::string path;
    std::string file_sha256;
    std::string tokenizer_id;
    std::vector<IndexedDoc> docs;
    uint64_t total_tokens = 0;
};

// Reads the corpus once, verifying ids are unique. Blank lines are skipped.
CorpusIndex index_corpus(const std::string& path, const packer::TokenizerAdapter& tok);

// One source in a mixture. `disjoint_from` names another source over the
// same corpus file whose slice this one must not overlap; the reference
// must appear earlier in the spec and share path and seed.
struct MixtureSource {
    std::string name;
    std::string path;
    uint64_t token_budget = 0;
    uint64_t seed = 0;
    std::optional<std::string> disjoint_from;
};

struct MixtureSpec {
    std::string tokenizer = "byte";
    std::vector<MixtureSource> sources;

    // Throws ConfigError on duplicate names, empty names/paths, or
    // disjoint_from references that are unknown, later in the list, or
    // inconsistent (different path or seed).
    void validate() const;
};

// A contiguous range [start, end) of permuted positions over one corpus.
// Together with (domain = corpus size, seed) this pins the exact document
// multiset; the draw step replays it byte-for-byte.
struct SampleSlice {
    std::string source_name;
    std::string corpus_path;
    std::string corpus_sha256;
    uint64_t corpus_docs = 0;
    uint64_t permutation_seed = 0;
    uint64_t start = 0;
    uint64_t end = 0;
    uint64_t token_count = 0;
    uint64_t token_budget = 0;
    bool shortfall = false;  // corpus ran out before the budget was met
};

// Walks the permuted corpus accumulating token counts until the budget is
// met; the document that crosses the budget is included. Sources planned
// with disjoint_from continue where the referenced slice stopped.
std::vector<SampleSlice> plan_samples(const MixtureSpec& spec,
                                      const std::map<std::string, CorpusIndex>& indexes);

// Copies the slice's document lines (verbatim JSONL bytes) into out_path.
// Re-verifies the corpus digest and the slice token count; throws
// DataError when the corpus changed since indexing.
void draw_slice(const CorpusIndex& index, const SampleSlice& slice,
                const std::string& out_path);

}  // namespace cptk::mixer
