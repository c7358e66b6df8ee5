#pragma once

#include <string>
#include <vector>

#include "cptk/pipeline/config.hpp"
#include "json.hpp"

namespace cptk::pipeline {

struct RunnerOptions {
    bool no_cache = false;     // force every stage to execute
    int jobs = 1;              // intra-stage parallelism
    std::vector<std::string> only_stages;  // non-empty: run just these
};

// Executes the pipeline in config order with content-addressed caching.
// A stage is skipped when its recorded input digests, parameter digest and
// output digests all still match; -- everything else reruns. Returns the
// run manifest (also written to <work_dir>/run_manifest.json). On stage
// failure the partial manifest is written before the error propagates.
nlohmann::json run_pipeline(const PipelineConfig& config, const RunnerOptions& options);

struct StagePlan {
    std::string name;
    std::string module;
    bool will_run = false;
    std::string reason;  // "cached", "no cached record", "inputs changed", ...
};

// Same cache decision logic as run_pipeline, with no side effects.
std::vector<StagePlan> explain_pipeline(const PipelineConfig& config,
                                        const RunnerOptions& options);

}  // namespace cptk::pipeline
