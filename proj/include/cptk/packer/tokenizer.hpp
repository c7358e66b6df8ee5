#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cptk::packer {

// Minimal tokenizer surface the toolkit needs. Real subword vocabularies
// plug in behind this interface; the toolkit itself only ships the byte
// tokenizer, which keeps every pipeline hermetic and exactly invertible.
class TokenizerAdapter {
public:
    virtual ~TokenizerAdapter() = default;

    virtual std::string id() const = 0;
    // Token ids for the text, *without* the end-of-text delimiter.
    virtual std::vector<uint32_t> encode(std::string_view text) const = 0;
    // Inverse of encode; delimiter and padding ids are skipped.
    virtual std::string decode(std::span<const uint32_t> ids) const = 0;
    virtual uint32_t eot_id() const = 0;
    virtual uint32_t pad_id() const = 0;

    // Length of the tokenized document *including* its end-of-text
    // delimiter — the unit all token budgets in this toolkit count.
    virtual uint64_t count_tokens(std::string_view text) const;
};

// ids 0..255 are the raw bytes; 256 is end-of-text, 257 is padding.
class ByteTokenizer final : public TokenizerAdapter {
public:
    static constexpr uint32_t kEot = 256;
    static constexpr uint32_t kPad = 257;

    std::string id() const override { return "byte"; }
    std::vector<uint32_t> encode(std::string_view text) const override;
    std::string decode(std::span<const uint32_t> ids) const override;
    uint32_t eot_id() const override { return kEot; }
    uint32_t pad_id() const override { return kPad; }
    uint64_t count_tokens(std::string_view text) const override;
};

// Throws ConfigError for unknown names; "byte" is the only built-in.
std::unique_ptr<TokenizerAdapter> make_tokenizer(const std::string& name);

}  // namespace cptk::packer
