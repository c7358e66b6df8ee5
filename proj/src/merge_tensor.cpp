#include "cptk/merge/tensor.hpp"

#include <cmath>
#include <cstring>

#include "cptk/error.hpp"

namespace cptk::merge {

size_t dtype_width(Dtype dtype) {
    switch (dtype) {
        case Dtype::kF32: return 4;
        case Dtype::kBF16: return 2;
    }
    throw DataError("unknown dtype");
}

const char* dtype_name(Dtype dtype) {
    switch (dtype) {
        case Dtype::kF32: return "F32";
        case Dtype::kBF16: return "BF16";
    }
    throw DataError("unknown dtype");
}

Dtype dtype_from_name(const std::string& name) {
    if (name == "F32") return Dtype::kF32;
    if (name == "BF16") return Dtype::kBF16;
    throw DataError("unsupported tensor dtype '" + name + "' (supported: F32, BF16)");
}

float bf16_to_f32(uint16_t bits) {
    uint32_t word = static_cast<uint32_t>(bits) << 16;
    float out;
    std::memcpy(&out, &word, sizeof(out));
    return out;
}

uint16_t f32_to_bf16(float value) {
    uint32_t word;
    std::memcpy(&word, &value, sizeof(word));
    if (std::isnan(value)) {
        // Keep the sign, force a quiet NaN payload that survives truncation.
        return static_cast<uint16_t>((word >> 16) | 0x0040);
    }
    // Round to nearest even on the 16 dropped mantissa bits.
    const uint32_t rounding = 0x7FFFu + ((word >> 16) & 1u);
    word += rounding;
    return static_cast<uint16_t>(word >> 16);
}

uint64_t Tensor::numel() const {
    uint64_t n = 1;
    for (uint64_t dim : shape) n *= dim;
    return n;
}

double Tensor::get(uint64_t index) const {
    if (dtype == Dtype::kF32) {
        float v;
        std::memcpy(&v, data.data() + index * 4, 4);
        return static_cast<double>(v);
    }
    uint16_t bits;
    std::memcpy(&bits, data.data() + index * 2, 2);
    return static_cast<double>(bf16_to_f32(bits));
}

void Tensor::set(uint64_t index, double value) {
    if (dtype == Dtype::kF32) {
        const float v = static_cast<float>(value);
        std::memcpy(data.data() + index * 4, &v, 4);
        return;
    }
    const uint16_t bits = f32_to_bf16(static_cast<float>(value));
    std::memcpy(data.data() + index * 2, &bits, 2);
}

Tensor Tensor::zeros(Dtype dtype, std::vector<uint64_t> shape) {
    Tensor t;
    t.dtype = dtype;
    t.shape = std::move(shape);
    t.data.assign(t.numel() * dtype_width(dtype), 0);
    return t;
}

}  // namespace cptk::merge
