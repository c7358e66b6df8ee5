#include "cptk/packer/tokenizer.hpp"

#include "cptk/error.hpp"

namespace cptk::packer {

uint64_t TokenizerAdapter::count_tokens(std::string_view text) const {
    return encode(text).size() + 1;  // + end-of-text delimiter
}

std::vector<uint32_t> ByteTokenizer::encode(std::string_view text) const {
    std::vector<uint32_t> ids;
    ids.reserve(text.size());
    for (unsigned char c : text) ids.push_back(c);
    return ids;
}

std::string ByteTokenizer::decode(std::span<const uint32_t> ids) const {
    std::string out;
    out.reserve(ids.size());
    for (uint32_t id : ids) {
        if (id < 256) {
            out.push_back(static_cast<char>(id));
        } else if (id == kEot || id == kPad) {
            continue;
        } else {
            throw DataError("byte tokenizer cannot decode id " + std::to_string(id));
        }
    }
    return out;
}

uint64_t ByteTokenizer::count_tokens(std::string_view text) const {
    return text.size() + 1;
}

std::unique_ptr<TokenizerAdapter> make_tokenizer(const std::string& name) {
    if (name == "byte") return std::make_unique<ByteTokenizer>();
    throw ConfigError("unknown tokenizer '" + name + "' (built in: byte)");
}

}  // namespace cptk::packer
