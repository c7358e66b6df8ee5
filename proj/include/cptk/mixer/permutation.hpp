#pragma once

#include <cstdint>

namespace cptk::mixer {

// Seeded bijection over [0, domain) built from a 4-round Feistel network
// with cycle-walking, so any slice of a shuffled corpus can be replayed
// from (domain, seed) alone — no stored permutation tables, no
// implementation-defined library shuffles.
class FeistelPermutation {
public:
    // domain must be >= 1. Seeds that differ produce unrelated orders.
    FeistelPermutation(uint64_t domain, uint64_t seed);

    uint64_t domain() const { return domain_; }

    // index must be < domain; the result is < domain and distinct for
    // distinct indices.
    uint64_t apply(uint64_t index) const;

private:
    uint64_t domain_;
    int half_bits_;
    uint64_t half_mask_;
    uint64_t round_keys_[4];

    uint64_t encrypt_once(uint64_t x) const;
};

}  // namespace cptk::mixer
