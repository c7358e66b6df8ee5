#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cptk {

// SHA-1 of `data`, truncated to the first 8 bytes interpreted big-endian.
// Used as the base hash of dedup shingles and LSH band keys.
uint64_t sha1_u64(std::string_view data);

// Hex-encoded SHA-256. Used for artifact digests and cache keys.
std::string sha256_hex(std::string_view data);

// Streaming SHA-256 for hashing files without loading them whole.
class Sha256Stream {
public:
    Sha256Stream();
    ~Sha256Stream();
    Sha256Stream(const Sha256Stream&) = delete;
    Sha256Stream& operator=(const Sha256Stream&) = delete;

    void update(std::string_view data);
    std::string hex();  // finalizes; further update() is invalid

private:
    void* ctx_;
};

// Hex-encoded SHA-256 of a file's contents.
std::string sha256_file_hex(const std::string& path);

// splitmix64 finalizer: a cheap, well-mixed 64-bit bijection.
inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic stream of 64-bit values from a seed. Used wherever the
// toolkit needs reproducible pseudo-randomness (hash salts, derived seeds).
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}
    uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    // Uniform value in [0, bound) via rejection sampling.
    uint64_t next_below(uint64_t bound) {
        if (bound == 0) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % bound;
    }

private:
    uint64_t state_;
};

// Derive the seed for an independent child stream (bootstrap resample i,
// hash salt k, ...). Children of distinct (seed, index) pairs do not collide
// in practice.
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
    return mix64(seed ^ mix64(index + 0x2545F4914F6CDD1DULL));
}

}  // namespace cptk
