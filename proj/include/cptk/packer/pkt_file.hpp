#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cptk/packer/pack.hpp"

namespace cptk::packer {

// Fixed-width packed-token container.
//
//   magic   : "PKT1" (4 bytes)
//   capacity: u32 little-endian   tokens per row
//   pad_id  : u32 little-endian
//   eot_id  : u32 little-endian
//   rows    : u64 little-endian   row count
//   data    : rows x capacity u32 little-endian token ids
//
// Every row is exactly `capacity` ids long; bucket fills shorter than the
// capacity are completed with pad_id.
struct PktData {
    uint32_t capacity = 0;
    uint32_t pad_id = 0;
    uint32_t eot_id = 0;
    std::vector<std::vector<uint32_t>> rows;
};

void write_pkt(const std::string& path, const PackResult& result, uint32_t pad_id,
               uint32_t eot_id);

// Validates magic, header sanity, and that the payload length matches the
// declared geometry; throws DataError otherwise.
PktData read_pkt(const std::string& path);

}  // namespace cptk::packer
