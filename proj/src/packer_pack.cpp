#include "cptk/packer/pack.hpp"

#include <set>
#include <utility>

#include "cptk/error.hpp"

namespace cptk::packer {

TokenSequence tokenize(const Document& doc, const TokenizerAdapter& tok) {
    TokenSequence seq;
    seq.doc_id = doc.id;
    try {
        seq.tokens = tok.encode(doc.text);
    } catch (const std::exception& e) {
        throw DataError("tokenizer '" + tok.id() + "' failed on document '" + doc.id +
                        "': " + e.what());
    }
    seq.tokens.push_back(tok.eot_id());
    return seq;
}

std::vector<Chunk> chunk(const TokenSequence& seq, uint32_t max_len) {
    if (max_len < 2) throw ConfigError("chunk length must be at least 2");
    std::vector<Chunk> chunks;
    const size_t n = seq.tokens.size();
    for (size_t start = 0, index = 0; start < n; start += max_len, ++index) {
        Chunk c;
        c.doc_id = seq.doc_id;
        c.chunk_index = static_cast<uint32_t>(index);
        size_t end = std::min(n, start + max_len);
        c.tokens.assign(seq.tokens.begin() + static_cast<ptrdiff_t>(start),
                        seq.tokens.begin() + static_cast<ptrdiff_t>(end));
        chunks.push_back(std::move(c));
    }
    return chunks;
}

PackResult pack_best_fit(const std::vector<Chunk>& chunks, uint32_t capacity) {
    if (capacity == 0) throw ConfigError("bucket capacity must be at least 1");
    PackResult result;
    result.capacity = capacity;

    // Open buckets ordered by (residual, index): lower_bound({len, 0}) is
    // the tightest bucket that still fits, and among equal residuals the
    // lowest index — the oldest bucket — comes first.
    std::set<std::pair<uint32_t, uint32_t>> open;

    for (const auto& c : chunks) {
        const auto len = static_cast<uint32_t>(c.tokens.size());
        if (len > capacity) {
            throw DataError("chunk " + std::to_string(c.chunk_index) + " of document '" +
                            c.doc_id + "' has " + std::to_string(len) +
                            " tokens, exceeding bucket capacity " + std::to_string(capacity));
        }
        if (len == 0) continue;  // chunking never produces these; be safe

        PlacementRecord rec;
        rec.doc_id = c.doc_id;
        rec.chunk_index = c.chunk_index;
        rec.chunk_len = len;

        auto it = open.lower_bound({len, 0});
        uint32_t bucket_index;
        if (it == open.end()) {
            bucket_index = static_cast<uint32_t>(result.buckets.size());
            result.buckets.emplace_back();
            rec.opened_new = true;
            rec.residual_before = capacity;
        } else {
            bucket_index = it->second;
            rec.residual_before = it->first;
            open.erase(it);
        }

        Bucket& bucket = result.buckets[bucket_index];
        bucket.chunks.push_back(ChunkRef{c.doc_id, c.chunk_index, len});
        bucket.tokens.insert(bucket.tokens.end(), c.tokens.begin(), c.tokens.end());
        const uint32_t residual = capacity - bucket.fill();
        if (residual > 0) open.insert({residual, bucket_index});

        rec.bucket_index = bucket_index;
        result.log.push_back(std::move(rec));
    }
    return result;
}

PackStats packing_stats(const PackResult& result) {
    PackStats stats;
    stats.bucket_count = result.buckets.size();
    for (const auto& bucket : result.buckets) {
        stats.token_count += bucket.fill();
        stats.chunk_count += bucket.chunks.size();
    }
    if (stats.bucket_count > 0) {
        const double space = static_cast<double>(stats.bucket_count) *
                             static_cast<double>(result.capacity);
        stats.utilization = static_cast<double>(stats.token_count) / space;
        stats.padding_fraction = 1.0 - stats.utilization;
    }
    return stats;
}

uint64_t bucket_lower_bound(const std::vector<Chunk>& chunks, uint32_t capacity) {
    if (capacity == 0) throw ConfigError("bucket capacity must be at least 1");
    uint64_t total = 0;
    for (const auto& c : chunks) total += c.tokens.size();
    return (total + capacity - 1) / capacity;
}

}  // namespace cptk::packer
