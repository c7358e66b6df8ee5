#include "cptk/manifest.hpp"

#include <fstream>

#include "cptk/digest.hpp"
#include "cptk/error.hpp"

namespace cptk {

namespace {

const char* const kIgnoredKeys[] = {"wall_time_ms", "cached"};

bool ignored_key(const std::string& key) {
    for (const char* k : kIgnoredKeys) {
        if (key == k) return true;
    }
    return false;
}

void diff_values(const nlohmann::json& a, const nlohmann::json& b, const std::string& path,
                 std::vector<std::string>& out) {
    if (a.is_object() && b.is_object()) {
        for (const auto& [key, value] : a.items()) {
            if (ignored_key(key)) continue;
            if (!b.contains(key)) {
                out.push_back(path + "/" + key + " (only in first)");
            } else {
                diff_values(value, b.at(key), path + "/" + key, out);
            }
        }
        for (const auto& [key, value] : b.items()) {
            if (ignored_key(key)) continue;
            if (!a.contains(key)) out.push_back(path + "/" + key + " (only in second)");
        }
        return;
    }
    if (a.is_array() && b.is_array()) {
        const size_t common = std::min(a.size(), b.size());
        for (size_t i = 0; i < common; ++i) {
            diff_values(a[i], b[i], path + "/" + std::to_string(i), out);
        }
        for (size_t i = common; i < a.size(); ++i) {
            out.push_back(path + "/" + std::to_string(i) + " (only in first)");
        }
        for (size_t i = common; i < b.size(); ++i) {
            out.push_back(path + "/" + std::to_string(i) + " (only in second)");
        }
        return;
    }
    if (a != b) out.push_back(path.empty() ? "/" : path);
}

}  // namespace

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open JSON file: " + path);
    try {
        nlohmann::json value;
        in >> value;
        return value;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
}

void write_json_file(const std::string& path, const nlohmann::json& value) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write JSON file: " + path);
    out << value.dump(2) << '\n';
    if (!out) throw DataError("failed writing JSON file: " + path);
}

std::string json_digest(const nlohmann::json& value) {
    return sha256_hex(value.dump());
}

ManifestDiff compare_manifests(const nlohmann::json& a, const nlohmann::json& b) {
    ManifestDiff diff;
    diff_values(a, b, "", diff.differences);
    diff.equal = diff.differences.empty();
    return diff;
}

}  // namespace cptk
