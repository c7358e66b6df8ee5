#include "cptk/merge/container.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include "cptk/error.hpp"
#include "json.hpp"

namespace cptk::merge {

namespace {

constexpr uint64_t kMaxHeaderBytes = 100ull * 1024 * 1024;

uint64_t expected_bytes(const Tensor& t) {
    return t.numel() * dtype_width(t.dtype);
}

}  // namespace

void write_container(const TensorMap& map, const std::string& path) {
    nlohmann::json header = nlohmann::json::object();
    if (!map.metadata.empty()) {
        header["__metadata__"] = map.metadata;
    }
    uint64_t cursor = 0;
    for (const auto& [name, tensor] : map.tensors) {
        if (name.empty() || name == "__metadata__") {
            throw DataError("tensor name '" + name + "' is reserved or empty");
        }
        const uint64_t bytes = expected_bytes(tensor);
        if (tensor.data.size() != bytes) {
            throw DataError("tensor '" + name + "' holds " + std::to_string(tensor.data.size()) +
                            " bytes but dtype and shape imply " + std::to_string(bytes));
        }
        nlohmann::json entry;
        entry["dtype"] = dtype_name(tensor.dtype);
        entry["shape"] = tensor.shape;
        entry["data_offsets"] = {cursor, cursor + bytes};
        header[name] = std::move(entry);
        cursor += bytes;
    }

    std::string text = header.dump();
    // Space-pad so the payload begins on an 8-byte boundary; JSON parsers
    // ignore the trailing whitespace.
    while ((8 + text.size()) % 8 != 0) text.push_back(' ');

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write tensor container: " + path);
    const uint64_t len = text.size();
    char len_bytes[8];
    for (int i = 0; i < 8; ++i) len_bytes[i] = static_cast<char>((len >> (8 * i)) & 0xFF);
    out.write(len_bytes, 8);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, tensor] : map.tensors) {
        out.write(reinterpret_cast<const char*>(tensor.data.data()),
                  static_cast<std::streamsize>(tensor.data.size()));
    }
    out.flush();
    if (!out) throw DataError("failed writing tensor container: " + path);
}

TensorMap read_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open tensor container: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 8) throw DataError(path + ": too short for a header length");

    uint64_t header_len = 0;
    for (int i = 7; i >= 0; --i) {
        header_len = (header_len << 8) | static_cast<unsigned char>(bytes[static_cast<size_t>(i)]);
    }
    if (header_len > kMaxHeaderBytes) {
        throw DataError(path + ": header length " + std::to_string(header_len) +
                        " is implausibly large");
    }
    if (8 + header_len > bytes.size()) {
        throw DataError(path + ": header length " + std::to_string(header_len) +
                        " overruns the file");
    }

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(bytes.begin() + 8,
                                       bytes.begin() + 8 + static_cast<ptrdiff_t>(header_len));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": header is not valid JSON: " + e.what());
    }
    if (!header.is_object()) throw DataError(path + ": header must be a JSON object");

    const uint64_t payload_size = bytes.size() - 8 - header_len;
    const char* payload = bytes.data() + 8 + header_len;

    TensorMap map;
    std::vector<std::tuple<uint64_t, uint64_t, std::string>> ranges;
    for (const auto& [name, entry] : header.items()) {
        if (name == "__metadata__") {
            if (!entry.is_object()) throw DataError(path + ": __metadata__ must be an object");
            for (const auto& [k, v] : entry.items()) {
                if (!v.is_string()) {
                    throw DataError(path + ": metadata value for '" + k + "' must be a string");
                }
                map.metadata[k] = v.get<std::string>();
            }
            continue;
        }
        if (!entry.is_object()) {
            throw DataError(path + ": tensor '" + name + "' record must be an object");
        }
        Tensor tensor;
        tensor.dtype = dtype_from_name(entry.value("dtype", std::string()));
        if (!entry.contains("shape") || !entry.at("shape").is_array()) {
            throw DataError(path + ": tensor '" + name + "' needs a shape array");
        }
        for (const auto& dim : entry.at("shape")) {
            if (!dim.is_number_integer() || dim.get<int64_t>() < 0) {
                throw DataError(path + ": tensor '" + name + "' has a bad shape entry");
            }
            tensor.shape.push_back(dim.get<uint64_t>());
        }
        const auto& offsets = entry.contains("data_offsets") ? entry.at("data_offsets") : nlohmann::json();
        if (!offsets.is_array() || offsets.size() != 2 || !offsets[0].is_number_integer() ||
            !offsets[1].is_number_integer() || offsets[0].get<int64_t>() < 0 ||
            offsets[1].get<int64_t>() < 0) {
            throw DataError(path + ": tensor '" + name + "' needs data_offsets [begin, end]");
        }
        const uint64_t begin = offsets[0].get<uint64_t>();
        const uint64_t end = offsets[1].get<uint64_t>();
        if (begin > end || end > payload_size) {
            throw DataError(path + ": tensor '" + name + "' offsets [" + std::to_string(begin) +
                            ", " + std::to_string(end) + ") leave the payload (size " +
                            std::to_string(payload_size) + ")");
        }
        const uint64_t want = expected_bytes(tensor);
        if (end - begin != want) {
            throw DataError(path + ": tensor '" + name + "' spans " + std::to_string(end - begin) +
                            " bytes but dtype and shape imply " + std::to_string(want));
        }
        tensor.data.assign(payload + begin, payload + end);
        ranges.emplace_back(begin, end, name);
        map.tensors.emplace(name, std::move(tensor));
    }

    std::sort(ranges.begin(), ranges.end());
    for (size_t i = 1; i < ranges.size(); ++i) {
        if (std::get<0>(ranges[i]) < std::get<1>(ranges[i - 1])) {
            throw DataError(path + ": tensors '" + std::get<2>(ranges[i - 1]) + "' and '" +
                            std::get<2>(ranges[i]) + "' overlap");
        }
    }
    return map;
}

}  // namespace cptk::merge
