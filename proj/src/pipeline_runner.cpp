#include "cptk/pipeline/runner.hpp"

#include <chrono>
#include <filesystem>
#include <set>

#include "cptk/digest.hpp"
#include "cptk/error.hpp"
#include "cptk/manifest.hpp"
#include "cptk/pipeline/stages.hpp"
#include "cptk/version.hpp"

namespace cptk::pipeline {

namespace {

namespace fs = std::filesystem;

std::string join_under(const std::string& base, const std::string& maybe_relative) {
    fs::path p(maybe_relative);
    if (p.is_absolute()) return p.lexically_normal().string();
    return (fs::path(base) / p).lexically_normal().string();
}

struct PreparedInputs {
    // logical name -> filesystem path
    std::map<std::string, std::string> resolved;
    // logical name -> {path as written, sha256} for existing files
    nlohmann::json digests = nlohmann::json::object();
    std::set<std::string> upstream;  // stage names referenced via '@'
    std::string missing;             // first missing path as written, or empty
    bool missing_is_ref = false;
};

PreparedInputs prepare_inputs(const StageConfig& stage, const std::string& work_abs,
                              const std::string& base_dir) {
    PreparedInputs prep;
    for (const auto& [logical, value] : stage.inputs.items()) {
        const std::string raw = value.get<std::string>();
        std::string ref_stage, ref_rel;
        std::string path;
        bool is_ref = false;
        if (parse_stage_ref(raw, ref_stage, ref_rel)) {
            is_ref = true;
            prep.upstream.insert(ref_stage);
            path = join_under(join_under(work_abs, ref_stage), ref_rel);
        } else {
            path = join_under(base_dir, raw);
        }
        prep.resolved[logical] = path;
        if (!fs::exists(path)) {
            if (prep.missing.empty()) {
                prep.missing = raw;
                prep.missing_is_ref = is_ref;
            }
            continue;
        }
        prep.digests[logical] = {{"path", raw}, {"sha256", sha256_file_hex(path)}};
    }
    return prep;
}

std::string stage_param_digest(const StageConfig& stage, const PipelineConfig& config) {
    nlohmann::json identity;
    identity["module"] = stage.module;
    identity["params"] = stage.params;
    identity["seed"] = config.seed;
    identity["tokenizer"] = config.tokenizer;
    identity["version"] = kVersion;
    return json_digest(identity);
}

constexpr const char* kRecordFile = "stage_record.json";

// Cache verdict for one stage: record must exist, match the would-be
// execution exactly, and every recorded output must still be on disk with
// its recorded digest.
std::pair<bool, std::string> check_cache(const std::string& stage_dir,
                                         const StageConfig& stage,
                                         const std::string& param_digest,
                                         const nlohmann::json& input_digests,
                                         nlohmann::json* record_out) {
    const std::string record_path = join_under(stage_dir, kRecordFile);
    if (!fs::exists(record_path)) return {false, "no cached record"};
    nlohmann::json record;
    try {
        record = load_json_file(record_path);
    } catch (const Error&) {
        return {false, "cached record unreadable"};
    }
    if (record.value("module", std::string()) != stage.module) {
        return {false, "module changed"};
    }
    if (record.value("param_digest", std::string()) != param_digest) {
        return {false, "parameters changed"};
    }
    if (record.value("input_digests", nlohmann::json::object()) != input_digests) {
        return {false, "inputs changed"};
    }
    if (!record.contains("outputs") || !record.at("outputs").is_object()) {
        return {false, "cached record unreadable"};
    }
    for (const auto& [rel, digest] : record.at("outputs").items()) {
        const std::string path = join_under(stage_dir, rel);
        if (!fs::exists(path) || sha256_file_hex(path) != digest.get<std::string>()) {
            return {false, "outputs missing or modified"};
        }
    }
    if (record_out) *record_out = record;
    return {true, "inputs, parameters and outputs unchanged"};
}

std::vector<const StageConfig*> select_stages(const PipelineConfig& config,
                                              const RunnerOptions& options) {
    if (options.only_stages.empty()) {
        std::vector<const StageConfig*> all;
        for (const auto& stage : config.stages) all.push_back(&stage);
        return all;
    }
    std::set<std::string> wanted(options.only_stages.begin(), options.only_stages.end());
    std::vector<const StageConfig*> subset;
    for (const auto& stage : config.stages) {
        if (wanted.erase(stage.name)) subset.push_back(&stage);
    }
    if (!wanted.empty()) {
        throw ConfigError("unknown stage '" + *wanted.begin() + "' requested");
    }
    return subset;
}

}  // namespace

nlohmann::json run_pipeline(const PipelineConfig& config, const RunnerOptions& options) {
    config.validate();
    const std::string work_abs = join_under(config.base_dir, config.work_dir);
    fs::create_directories(work_abs);

    StageGlobals globals;
    globals.seed = config.seed;
    globals.tokenizer = config.tokenizer;
    globals.jobs = options.jobs;

    nlohmann::json manifest;
    manifest["config_digest"] = json_digest(config.raw);
    manifest["version"] = kVersion;
    manifest["seed"] = config.seed;
    manifest["tokenizer"] = config.tokenizer;
    manifest["stages"] = nlohmann::json::array();
    manifest["artifacts"] = nlohmann::json::object();

    const std::string manifest_path = join_under(work_abs, "run_manifest.json");
    auto flush_manifest = [&]() { write_json_file(manifest_path, manifest); };

    for (const StageConfig* stage_ptr : select_stages(config, options)) {
        const StageConfig& stage = *stage_ptr;
        const std::string stage_dir = join_under(work_abs, stage.name);
        try {
            PreparedInputs prep = prepare_inputs(stage, work_abs, config.base_dir);
            if (!prep.missing.empty()) {
                const std::string msg = "stage '" + stage.name + "': input '" + prep.missing +
                                        "' does not exist";
                if (prep.missing_is_ref) {
                    throw DataError(msg + " (was it produced by the referenced stage?)");
                }
                throw ConfigError(msg);
            }
            const std::string param_digest = stage_param_digest(stage, config);

            nlohmann::json entry;
            entry["name"] = stage.name;
            entry["module"] = stage.module;
            entry["param_digest"] = param_digest;
            entry["input_digests"] = prep.digests;

            nlohmann::json record;
            bool cached = false;
            std::string reason;
            if (!options.no_cache) {
                std::tie(cached, reason) =
                    check_cache(stage_dir, stage, param_digest, prep.digests, &record);
            }

            if (cached) {
                entry["cached"] = true;
                entry["outputs"] = record.at("outputs");
                entry["summary"] = record.value("summary", nlohmann::json::object());
                entry["wall_time_ms"] = record.value("wall_time_ms", 0.0);
            } else {
                // Stale partial outputs must never satisfy a later cache
                // check, so the stage directory starts from scratch.
                fs::remove_all(stage_dir);
                fs::create_directories(stage_dir);

                const auto started = std::chrono::steady_clock::now();
                StageResult result =
                    run_stage(stage.module, stage.params, prep.resolved, stage_dir, globals);
                const auto elapsed = std::chrono::duration<double, std::milli>(
                                         std::chrono::steady_clock::now() - started)
                                         .count();

                nlohmann::json outputs = nlohmann::json::object();
                for (const auto& [rel, path] : result.outputs) {
                    outputs[rel] = sha256_file_hex(path);
                }
                record = nlohmann::json{{"name", stage.name},
                                        {"module", stage.module},
                                        {"param_digest", param_digest},
                                        {"input_digests", prep.digests},
                                        {"outputs", outputs},
                                        {"summary", result.summary},
                                        {"wall_time_ms", elapsed},
                                        {"version", kVersion}};
                write_json_file(join_under(stage_dir, kRecordFile), record);

                entry["cached"] = false;
                entry["outputs"] = outputs;
                entry["summary"] = result.summary;
                entry["wall_time_ms"] = elapsed;
            }

            for (const auto& [rel, digest] : entry.at("outputs").items()) {
                manifest["artifacts"][stage.name + "/" + rel] = digest;
            }
            manifest["stages"].push_back(std::move(entry));
        } catch (const std::exception& e) {
            manifest["failed_stage"] = stage.name;
            manifest["error"] = e.what();
            flush_manifest();
            throw;
        }
    }

    flush_manifest();
    return manifest;
}

std::vector<StagePlan> explain_pipeline(const PipelineConfig& config,
                                        const RunnerOptions& options) {
    config.validate();
    const std::string work_abs = join_under(config.base_dir, config.work_dir);

    std::set<std::string> will_run;
    std::vector<StagePlan> plans;
    for (const StageConfig* stage_ptr : select_stages(config, options)) {
        const StageConfig& stage = *stage_ptr;
        StagePlan plan;
        plan.name = stage.name;
        plan.module = stage.module;

        PreparedInputs prep = prepare_inputs(stage, work_abs, config.base_dir);
        std::string upstream_runner;
        for (const auto& up : prep.upstream) {
            if (will_run.count(up)) {
                upstream_runner = up;
                break;
            }
        }

        if (options.no_cache) {
            plan.will_run = true;
            plan.reason = "cache disabled";
        } else if (!upstream_runner.empty()) {
            plan.will_run = true;
            plan.reason = "upstream stage '" + upstream_runner + "' will run";
        } else if (!prep.missing.empty()) {
            plan.will_run = true;
            plan.reason = "input '" + prep.missing + "' is missing";
        } else {
            const std::string stage_dir = join_under(work_abs, stage.name);
            auto [cached, reason] = check_cache(stage_dir, stage,
                                                stage_param_digest(stage, config),
                                                prep.digests, nullptr);
            plan.will_run = !cached;
            plan.reason = reason;
        }
        if (plan.will_run) will_run.insert(stage.name);
        plans.push_back(std::move(plan));
    }
    return plans;
}

}  // namespace cptk::pipeline
