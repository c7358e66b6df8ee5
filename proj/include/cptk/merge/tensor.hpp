#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cptk::merge {

enum class Dtype { kF32, kBF16 };

size_t dtype_width(Dtype dtype);
const char* dtype_name(Dtype dtype);           // "F32" / "BF16"
Dtype dtype_from_name(const std::string& name);  // throws DataError

// bfloat16 <-> float32. Packing uses round-to-nearest-even on the dropped
// mantissa bits; NaNs stay NaNs (quieted), infinities and zeros map exactly.
float bf16_to_f32(uint16_t bits);
uint16_t f32_to_bf16(float value);

// A dense tensor stored as raw little-endian bytes in its on-disk dtype.
// Arithmetic reads elements out as doubles and writes results back through
// the dtype's rounding, so accumulation error never compounds in storage.
struct Tensor {
    Dtype dtype = Dtype::kF32;
    std::vector<uint64_t> shape;  // empty = 0-dimensional scalar
    std::vector<uint8_t> data;

    uint64_t numel() const;
    double get(uint64_t index) const;
    void set(uint64_t index, double value);

    static Tensor zeros(Dtype dtype, std::vector<uint64_t> shape);
};

// Named tensors plus free-form string metadata. std::map keeps names
// sorted, which makes serialization canonical.
struct TensorMap {
    std::map<std::string, Tensor> tensors;
    std::map<std::string, std::string> metadata;
};

}  // namespace cptk::merge
