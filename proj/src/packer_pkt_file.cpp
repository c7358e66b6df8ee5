#include "cptk/packer/pkt_file.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include "cptk/error.hpp"

namespace cptk::packer {

namespace {

constexpr char kMagic[4] = {'P', 'K', 'T', '1'};

void put_u32(std::string& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& buf, uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

uint32_t get_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint64_t get_u64(const unsigned char* p) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace

void write_pkt(const std::string& path, const PackResult& result, uint32_t pad_id,
               uint32_t eot_id) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write packed tokens: " + path);

    std::string header;
    header.append(kMagic, 4);
    put_u32(header, result.capacity);
    put_u32(header, pad_id);
    put_u32(header, eot_id);
    put_u64(header, result.buckets.size());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));

    std::string row;
    for (const auto& bucket : result.buckets) {
        row.clear();
        for (uint32_t id : bucket.tokens) put_u32(row, id);
        for (uint32_t i = bucket.fill(); i < result.capacity; ++i) put_u32(row, pad_id);
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    out.flush();
    if (!out) throw DataError("failed writing packed tokens: " + path);
}

PktData read_pkt(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open packed tokens: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 24) throw DataError(path + ": truncated header (need 24 bytes)");

    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (std::memcmp(p, kMagic, 4) != 0) {
        throw DataError(path + ": bad magic, not a PKT1 file");
    }
    PktData data;
    data.capacity = get_u32(p + 4);
    data.pad_id = get_u32(p + 8);
    data.eot_id = get_u32(p + 12);
    const uint64_t rows = get_u64(p + 16);
    if (data.capacity == 0) throw DataError(path + ": capacity must be positive");

    const uint64_t payload = bytes.size() - 24;
    const uint64_t expected = rows * static_cast<uint64_t>(data.capacity) * 4;
    if (payload != expected) {
        throw DataError(path + ": payload is " + std::to_string(payload) + " bytes, header implies " +
                        std::to_string(expected));
    }

    data.rows.reserve(rows);
    const unsigned char* cursor = p + 24;
    for (uint64_t r = 0; r < rows; ++r) {
        std::vector<uint32_t> row(data.capacity);
        for (uint32_t c = 0; c < data.capacity; ++c, cursor += 4) row[c] = get_u32(cursor);
        data.rows.push_back(std::move(row));
    }
    return data;
}

}  // namespace cptk::packer
