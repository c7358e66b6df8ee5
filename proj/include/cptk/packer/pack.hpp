#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cptk/document.hpp"
#include "cptk/packer/tokenizer.hpp"

namespace cptk::packer {

// A tokenized document: encode(text) plus the terminal end-of-text id.
struct TokenSequence {
    std::string doc_id;
    std::vector<uint32_t> tokens;
};

TokenSequence tokenize(const Document& doc, const TokenizerAdapter& tok);

struct Chunk {
    std::string doc_id;
    uint32_t chunk_index = 0;  // position within the source sequence
    std::vector<uint32_t> tokens;
};

// Splits a sequence into consecutive windows of at most max_len tokens.
// The windows cover the sequence exactly: concatenating them restores it.
// Requires max_len >= 2.
std::vector<Chunk> chunk(const TokenSequence& seq, uint32_t max_len);

struct ChunkRef {
    std::string doc_id;
    uint32_t chunk_index = 0;
    uint32_t length = 0;
};

struct Bucket {
    std::vector<ChunkRef> chunks;
    std::vector<uint32_t> tokens;  // concatenated payloads, fill() long
    uint32_t fill() const { return static_cast<uint32_t>(tokens.size()); }
};

// One line of evidence per placement; replaying the log against the stated
// policy verifies the packer made the best-fit decision at every step.
struct PlacementRecord {
    std::string doc_id;
    uint32_t chunk_index = 0;
    uint32_t chunk_len = 0;
    uint32_t bucket_index = 0;
    uint32_t residual_before = 0;  // residual of the chosen bucket, before placing
    bool opened_new = false;
};

struct PackResult {
    std::vector<Bucket> buckets;
    std::vector<PlacementRecord> log;
    uint32_t capacity = 0;
};

// First-fit-decreasing is deliberately *not* used: chunks are packed in
// arrival order into the open bucket with the smallest residual that still
// fits (ties -> lowest bucket index, i.e. the oldest), opening a new bucket
// when none fits. Buckets never close. Throws DataError if a chunk exceeds
// capacity.
PackResult pack_best_fit(const std::vector<Chunk>& chunks, uint32_t capacity);

struct PackStats {
    uint64_t bucket_count = 0;
    uint64_t token_count = 0;    // real tokens, excluding padding
    uint64_t chunk_count = 0;
    double utilization = 1.0;    // token_count / (bucket_count * capacity)
    double padding_fraction = 0.0;
};

// Utilization of an empty packing is defined as 1 (no capacity wasted).
PackStats packing_stats(const PackResult& result);

// Smallest number of buckets any packing could use: ceil(total / capacity).
uint64_t bucket_lower_bound(const std::vector<Chunk>& chunks, uint32_t capacity);

}  // namespace cptk::packer
