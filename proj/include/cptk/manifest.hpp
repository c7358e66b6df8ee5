#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace cptk {

// Reads/writes JSON with a stable on-disk form: two-space indent, sorted
// object keys (nlohmann's default map ordering), trailing newline. Equal
// JSON values therefore serialize to identical bytes.
nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& value);

// SHA-256 of the compact serialization; object keys are sorted, so the
// digest identifies the JSON value, not its formatting.
std::string json_digest(const nlohmann::json& value);

struct ManifestDiff {
    bool equal = true;
    std::vector<std::string> differences;  // JSON-pointer-style paths
};

// Structural comparison of two run manifests. Timing and cache-status
// fields ("wall_time_ms", "cached") are ignored at any depth: a rerun that
// produced identical artifacts compares equal even though it was faster.
ManifestDiff compare_manifests(const nlohmann::json& a, const nlohmann::json& b);

}  // namespace cptk
