#include "cptk/pipeline/config.hpp"

#include <filesystem>
#include <set>

#include "cptk/error.hpp"
#include "cptk/manifest.hpp"

namespace cptk::pipeline {

namespace {

const std::set<std::string>& known_modules() {
    static const std::set<std::string> modules = {"filter", "dedup", "mix", "pack"};
    return modules;
}

bool safe_stage_name(const std::string& name) {
    if (name.empty() || name.size() > 64) return false;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

// Collects every '@stage' reference appearing in a JSON value.
void collect_refs(const nlohmann::json& value, std::vector<std::string>& stages) {
    if (value.is_string()) {
        std::string stage, rel;
        if (parse_stage_ref(value.get<std::string>(), stage, rel)) stages.push_back(stage);
        return;
    }
    if (value.is_object() || value.is_array()) {
        for (const auto& item : value) collect_refs(item, stages);
    }
}

}  // namespace

bool parse_stage_ref(const std::string& value, std::string& stage, std::string& rel) {
    if (value.empty() || value[0] != '@') return false;
    const size_t slash = value.find('/');
    if (slash == std::string::npos) {
        stage = value.substr(1);
        rel.clear();
    } else {
        stage = value.substr(1, slash - 1);
        rel = value.substr(slash + 1);
    }
    return !stage.empty();
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    nlohmann::json doc = load_json_file(path);
    std::string dir = std::filesystem::path(path).parent_path().string();
    if (dir.empty()) dir = ".";
    try {
        return from_json(doc, dir);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& doc, const std::string& base_dir) {
    if (!doc.is_object()) throw ConfigError("pipeline config must be a JSON object");
    PipelineConfig cfg;
    cfg.raw = doc;
    cfg.base_dir = base_dir.empty() ? "." : base_dir;
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_integer() || doc.at("seed").get<int64_t>() < 0) {
            throw ConfigError("\"seed\" must be a non-negative integer");
        }
        cfg.seed = doc.at("seed").get<uint64_t>();
    }
    cfg.work_dir = doc.value("work_dir", std::string("work"));
    if (cfg.work_dir.empty()) throw ConfigError("\"work_dir\" must be non-empty");
    cfg.tokenizer = doc.value("tokenizer", std::string("byte"));

    if (!doc.contains("stages") || !doc.at("stages").is_array() || doc.at("stages").empty()) {
        throw ConfigError("pipeline config needs a non-empty \"stages\" array");
    }
    for (const auto& entry : doc.at("stages")) {
        if (!entry.is_object()) throw ConfigError("each stage must be a JSON object");
        StageConfig stage;
        stage.name = entry.value("name", std::string());
        stage.module = entry.value("module", std::string());
        stage.inputs = entry.value("inputs", nlohmann::json::object());
        stage.params = entry.value("params", nlohmann::json::object());
        if (!stage.inputs.is_object()) {
            throw ConfigError("stage '" + stage.name + "': \"inputs\" must be an object");
        }
        for (const auto& [name, value] : stage.inputs.items()) {
            if (!value.is_string() || value.get<std::string>().empty()) {
                throw ConfigError("stage '" + stage.name + "': input '" + name +
                                  "' must be a non-empty path string");
            }
        }
        if (!stage.params.is_object()) {
            throw ConfigError("stage '" + stage.name + "': \"params\" must be an object");
        }
        cfg.stages.push_back(std::move(stage));
    }
    cfg.validate();
    return cfg;
}

void PipelineConfig::validate() const {
    std::set<std::string> seen;
    for (size_t i = 0; i < stages.size(); ++i) {
        const StageConfig& stage = stages[i];
        if (!safe_stage_name(stage.name)) {
            throw ConfigError("stage " + std::to_string(i) + " has an invalid name '" +
                              stage.name + "' (use letters, digits, '-', '_')");
        }
        if (!known_modules().count(stage.module)) {
            std::string known;
            for (const auto& m : known_modules()) {
                if (!known.empty()) known += ", ";
                known += m;
            }
            throw ConfigError("stage '" + stage.name + "' uses unknown module '" + stage.module +
                              "' (known: " + known + ")");
        }
        if (seen.count(stage.name)) {
            throw ConfigError("duplicate stage name '" + stage.name + "'");
        }
        std::vector<std::string> refs;
        collect_refs(stage.inputs, refs);
        for (const auto& ref : refs) {
            if (ref == stage.name) {
                throw ConfigError("stage '" + stage.name + "' references itself");
            }
            if (!seen.count(ref)) {
                throw ConfigError("stage '" + stage.name + "' references '@" + ref +
                                  "' which is not an earlier stage (forward references "
                                  "make a cycle)");
            }
        }
        seen.insert(stage.name);
    }
}

}  // namespace cptk::pipeline
