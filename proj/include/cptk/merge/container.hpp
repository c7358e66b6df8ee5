#pragma once

#include <string>

#include "cptk/merge/tensor.hpp"

namespace cptk::merge {

// Tensor container file:
//
//   u64 little-endian header length N
//   N bytes of JSON: { "__metadata__"?: {str: str},
//                      "<name>": {"dtype": "F32"|"BF16",
//                                 "shape": [u64...],
//                                 "data_offsets": [begin, end]} }
//   raw tensor bytes addressed by the offsets (relative to the byte after
//   the header)
//
// Writing is canonical: names sorted, offsets contiguous from zero, header
// space-padded so the payload starts 8-byte aligned. write(read(f)) then
// re-serializes byte-identically.
void write_container(const TensorMap& map, const std::string& path);

// Validates the header and every tensor record: unknown dtypes, negative
// or inverted offsets, offsets outside the payload, overlapping ranges,
// and byte counts that disagree with dtype x shape all raise DataError.
// Reading is lenient about gaps between tensors; writing never makes them.
TensorMap read_container(const std::string& path);

}  // namespace cptk::merge
