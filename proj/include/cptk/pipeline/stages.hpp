#pragma once

#include <map>
#include <string>

#include "json.hpp"

namespace cptk::pipeline {

// Settings shared by every stage of a run.
struct StageGlobals {
    uint64_t seed = 0;
    std::string tokenizer = "byte";
    int jobs = 1;
};

struct StageResult {
    // output file name (relative to the stage directory) -> absolute path
    std::map<std::string, std::string> outputs;
    nlohmann::json summary = nlohmann::json::object();
};

// Stage contract: every file a stage reads arrives through `inputs`
// (logical name -> resolved path); `params` is pure configuration and
// never contains paths. Outputs land in out_dir. The stage functions are
// used both by the pipeline runner and by the standalone CLI subcommands.

// Normalize -> clean markup -> quality gate -> optional language gate.
// inputs: docs (JSONL); optional profile / lang_model / language seed
// files as referenced by params. outputs: filtered.jsonl, verdicts.jsonl.
StageResult run_filter_stage(const nlohmann::json& params,
                             const std::map<std::string, std::string>& inputs,
                             const std::string& out_dir, const StageGlobals& globals);

// Near-duplicate clustering; keeps one representative per cluster.
// inputs: docs. outputs: deduped.jsonl, clusters.jsonl, unsignable.txt.
StageResult run_dedup_stage(const nlohmann::json& params,
                            const std::map<std::string, std::string>& inputs,
                            const std::string& out_dir, const StageGlobals& globals);

// Seeded mixture sampling under token budgets. inputs: one entry per
// corpus, referenced from params.sources[].input. outputs: <source>.jsonl
// per source plus slices.json.
StageResult run_mix_stage(const nlohmann::json& params,
                          const std::map<std::string, std::string>& inputs,
                          const std::string& out_dir, const StageGlobals& globals);

// Tokenize, chunk and bin-pack into fixed-capacity rows. inputs: docs.
// outputs: packed.pkt, packed.json, optional placements.jsonl.
StageResult run_pack_stage(const nlohmann::json& params,
                           const std::map<std::string, std::string>& inputs,
                           const std::string& out_dir, const StageGlobals& globals);

// Dispatch by module name; ConfigError for unknown modules.
StageResult run_stage(const std::string& module, const nlohmann::json& params,
                      const std::map<std::string, std::string>& inputs,
                      const std::string& out_dir, const StageGlobals& globals);

}  // namespace cptk::pipeline
