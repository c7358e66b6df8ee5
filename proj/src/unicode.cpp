#include "cptk/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/utypes.h>

#include "cptk/error.hpp"

namespace cptk::uni {

namespace {

// Decodes the codepoint at text[pos]; returns false on malformed input.
bool decode_at(std::string_view text, size_t pos, uint32_t& cp, size_t& len) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
    const size_t n = text.size();
    const unsigned char b0 = bytes[pos];
    if (b0 < 0x80) {
        cp = b0;
        len = 1;
        return true;
    }
    int need;
    uint32_t v;
    if ((b0 & 0xE0) == 0xC0) {
        need = 1;
        v = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        need = 2;
        v = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        need = 3;
        v = b0 & 0x07;
    } else {
        return false;
    }
    if (pos + static_cast<size_t>(need) >= n) return false;
    for (int i = 1; i <= need; ++i) {
        const unsigned char b = bytes[pos + i];
        if ((b & 0xC0) != 0x80) return false;
        v = (v << 6) | (b & 0x3F);
    }
    // Overlong forms, surrogates, out of range.
    static const uint32_t min_for[4] = {0, 0x80, 0x800, 0x10000};
    if (v < min_for[need]) return false;
    if (v >= 0xD800 && v <= 0xDFFF) return false;
    if (v > 0x10FFFF) return false;
    cp = v;
    len = static_cast<size_t>(need) + 1;
    return true;
}

const icu::Normalizer2& nfkc_normalizer() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status) || !norm) {
        throw Error("ICU NFKC normalizer unavailable");
    }
    return *norm;
}

}  // namespace

std::optional<size_t> find_invalid_utf8(std::string_view text) {
    size_t pos = 0;
    while (pos < text.size()) {
        uint32_t cp;
        size_t len;
        if (!decode_at(text, pos, cp, len)) return pos;
        pos += len;
    }
    return std::nullopt;
}

std::optional<uint32_t> decode_next(std::string_view text, size_t& pos) {
    if (pos >= text.size()) return std::nullopt;
    uint32_t cp;
    size_t len;
    if (!decode_at(text, pos, cp, len)) return std::nullopt;
    pos += len;
    return cp;
}

std::vector<uint32_t> decode(std::string_view text) {
    std::vector<uint32_t> out;
    out.reserve(text.size());
    size_t pos = 0;
    while (pos < text.size()) {
        uint32_t cp;
        size_t len;
        if (!decode_at(text, pos, cp, len)) {
            throw DataError("invalid UTF-8 at byte offset " + std::to_string(pos));
        }
        out.push_back(cp);
        pos += len;
    }
    return out;
}

void append_utf8(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

size_t codepoint_count(std::string_view text) {
    size_t pos = 0, count = 0;
    while (pos < text.size()) {
        uint32_t cp;
        size_t len;
        if (!decode_at(text, pos, cp, len)) {
            throw DataError("invalid UTF-8 at byte offset " + std::to_string(pos));
        }
        pos += len;
        ++count;
    }
    return count;
}

std::string nfkc(std::string_view text) {
    if (auto bad = find_invalid_utf8(text)) {
        throw DataError("invalid UTF-8 at byte offset " + std::to_string(*bad));
    }
    // ASCII is closed under NFKC.
    bool ascii = true;
    for (const char c : text) {
        if (static_cast<unsigned char>(c) >= 0x80) {
            ascii = false;
            break;
        }
    }
    if (ascii) return std::string(text);

    const icu::Normalizer2& norm = nfkc_normalizer();
    UErrorCode status = U_ZERO_ERROR;
    std::string out;
    icu::StringByteSink<std::string> sink(&out);
    norm.normalizeUTF8(0, icu::StringPiece(text.data(), static_cast<int32_t>(text.size())),
                       sink, nullptr, status);
    if (U_FAILURE(status)) {
        throw Error("NFKC normalization failed: " + std::string(u_errorName(status)));
    }
    return out;
}

bool is_whitespace(uint32_t cp) {
    return u_isUWhiteSpace(static_cast<UChar32>(cp)) != 0;
}

bool is_alphabetic(uint32_t cp) {
    return u_hasBinaryProperty(static_cast<UChar32>(cp), UCHAR_ALPHABETIC) != 0;
}

uint32_t to_lower(uint32_t cp) {
    return static_cast<uint32_t>(u_tolower(static_cast<UChar32>(cp)));
}

std::vector<std::string_view> split_words(std::string_view text) {
    std::vector<std::string_view> words;
    size_t pos = 0;
    size_t word_start = 0;
    bool in_word = false;
    while (pos < text.size()) {
        const size_t cp_start = pos;
        uint32_t cp;
        size_t len;
        if (!decode_at(text, pos, cp, len)) {
            throw DataError("invalid UTF-8 at byte offset " + std::to_string(pos));
        }
        pos += len;
        if (is_whitespace(cp)) {
            if (in_word) {
                words.push_back(text.substr(word_start, cp_start - word_start));
                in_word = false;
            }
        } else if (!in_word) {
            word_start = cp_start;
            in_word = true;
        }
    }
    if (in_word) words.push_back(text.substr(word_start));
    return words;
}

std::string fold_for_shingling(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    size_t pos = 0;
    bool pending_space = false;
    bool seen_any = false;
    while (pos < text.size()) {
        uint32_t cp;
        size_t len;
        if (!decode_at(text, pos, cp, len)) {
            throw DataError("invalid UTF-8 at byte offset " + std::to_string(pos));
        }
        pos += len;
        if (is_whitespace(cp)) {
            pending_space = seen_any;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        append_utf8(out, to_lower(cp));
        seen_any = true;
    }
    return out;
}

}  // namespace cptk::uni
