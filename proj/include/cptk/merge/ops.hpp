#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cptk/merge/tensor.hpp"

namespace cptk::merge {

// Shell-style glob over tensor names: `*` any run, `?` one character,
// `[abc]` / `[a-z]` / `[!...]` character classes. Bytes, not codepoints —
// tensor names are ASCII in practice.
bool glob_match(std::string_view pattern, std::string_view name);

// Throws ConfigError on malformed patterns (unterminated class, empty).
void validate_glob(std::string_view pattern);

// Element-wise instruct - base. Name sets, shapes and dtypes must agree;
// mismatches raise DataError listing every offender.
TensorMap tensor_delta(const TensorMap& instruct, const TensorMap& base);

struct ChatVectorConfig {
    double alpha = 1.0;
    // Tensors matching any pattern are copied from the target model
    // byte-for-byte instead of being shifted.
    std::vector<std::string> exclude;
};

// target + alpha * delta for every non-excluded tensor. Delta must cover
// exactly the non-excluded names (extra or missing names are listed in the
// error). Output metadata records alpha and the exclusion patterns.
TensorMap apply_chat_vector(const TensorMap& target, const TensorMap& delta,
                            const ChatVectorConfig& cfg);

struct SlerpConfig {
    double t = 0.5;  // 0 = endpoint a, 1 = endpoint b; must lie in [0, 1]
    // |cos| at or above this falls back to linear interpolation.
    double parallel_threshold = 1.0 - 1e-7;
};

// Per-tensor spherical linear interpolation on flattened values, computed
// in double. Falls back to lerp for (anti)parallel or zero-norm tensors.
// t = 0 and t = 1 reproduce the endpoints bit-exactly. Output metadata
// records t.
TensorMap slerp_merge(const TensorMap& a, const TensorMap& b, const SlerpConfig& cfg);

// Parses "0.5" as a single value and "0.4..0.6:0.1" as an inclusive range
// swept by step; used by CLI flags that accept sweeps.
std::vector<double> parse_value_sweep(const std::string& text);

}  // namespace cptk::merge
