#include "cptk/mixer/permutation.hpp"

#include "cptk/digest.hpp"
#include "cptk/error.hpp"

namespace cptk::mixer {

FeistelPermutation::FeistelPermutation(uint64_t domain, uint64_t seed) : domain_(domain) {
    if (domain == 0) throw ConfigError("permutation domain must be at least 1");

    // Smallest even bit width covering the domain; cycle-walking shrinks
    // the power-of-two cipher domain back to [0, domain). The width is at
    // most 2 bits above the minimum, so the expected walk is < 4 steps.
    int bits = 1;
    while (bits < 64 && (domain - 1) >> bits != 0) ++bits;
    if (bits % 2 != 0) ++bits;
    if (bits < 2) bits = 2;
    half_bits_ = bits / 2;
    half_mask_ = (uint64_t{1} << half_bits_) - 1;
    for (int r = 0; r < 4; ++r) round_keys_[r] = derive_seed(seed, static_cast<uint64_t>(r));
}

uint64_t FeistelPermutation::encrypt_once(uint64_t x) const {
    uint64_t left = x & half_mask_;
    uint64_t right = (x >> half_bits_) & half_mask_;
    for (int r = 0; r < 4; ++r) {
        uint64_t f = mix64(right ^ round_keys_[r]) & half_mask_;
        uint64_t next_right = left ^ f;
        left = right;
        right = next_right;
    }
    return (right << half_bits_) | left;
}

uint64_t FeistelPermutation::apply(uint64_t index) const {
    if (index >= domain_) {
        throw ConfigError("permutation index " + std::to_string(index) +
                          " outside domain " + std::to_string(domain_));
    }
    uint64_t x = index;
    do {
        x = encrypt_once(x);
    } while (x >= domain_);
    return x;
}

}  // namespace cptk::mixer
