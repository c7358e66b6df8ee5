#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cptk::uni {

// Byte offset of the first invalid UTF-8 sequence, or nullopt if valid.
// Strict: rejects overlong encodings, surrogates, and values > U+10FFFF.
std::optional<size_t> find_invalid_utf8(std::string_view text);

// Decode one codepoint starting at `pos`. Advances `pos` past it.
// Returns nullopt (and leaves pos at the error) on invalid input.
std::optional<uint32_t> decode_next(std::string_view text, size_t& pos);

// All codepoints of a valid UTF-8 string. Throws DataError naming the byte
// offset on invalid input.
std::vector<uint32_t> decode(std::string_view text);

void append_utf8(std::string& out, uint32_t cp);

size_t codepoint_count(std::string_view text);  // throws on invalid UTF-8

// Unicode NFKC normalization. Idempotent. Throws DataError naming the byte
// offset of the first invalid UTF-8 sequence.
std::string nfkc(std::string_view text);

// Character classes used by the corpus filters and shingling.
bool is_whitespace(uint32_t cp);  // Unicode White_Space
bool is_alphabetic(uint32_t cp);  // Unicode Alphabetic
uint32_t to_lower(uint32_t cp);   // simple lowercase mapping

// Maximal runs of non-whitespace codepoints.
std::vector<std::string_view> split_words(std::string_view text);

// Lowercase + collapse runs of whitespace to single spaces + trim.
std::string fold_for_shingling(std::string_view text);

}  // namespace cptk::uni
