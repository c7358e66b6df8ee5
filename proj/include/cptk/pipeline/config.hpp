#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace cptk::pipeline {

// One step of a pipeline. `inputs` maps logical names to paths; both there
// and inside `params`, a string starting with '@' is a reference
// "@stage/relative.file" to an earlier stage's output under the work
// directory.
struct StageConfig {
    std::string name;
    std::string module;  // filter | dedup | mix | pack
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json params = nlohmann::json::object();
};

struct PipelineConfig {
    uint64_t seed = 0;
    std::string work_dir = "work";
    std::string tokenizer = "byte";
    std::vector<StageConfig> stages;

    // Directory the config file lives in; relative paths (work_dir and
    // external inputs) resolve against it, so a pipeline is relocatable.
    std::string base_dir = ".";

    // The config exactly as loaded; its digest identifies the run.
    nlohmann::json raw = nlohmann::json::object();

    static PipelineConfig from_file(const std::string& path);
    static PipelineConfig from_json(const nlohmann::json& doc, const std::string& base_dir);

    // Stage names unique and filesystem-safe, modules known, every '@'
    // reference points to an earlier stage (a forward or unknown reference
    // is a cycle or typo — both ConfigError).
    void validate() const;
};

// Splits "@stage/rel/path" into (stage, rel/path); rel may be empty.
// Returns false when the string is not a reference.
bool parse_stage_ref(const std::string& value, std::string& stage, std::string& rel);

}  // namespace cptk::pipeline
