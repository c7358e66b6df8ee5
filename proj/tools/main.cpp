// cptk: batch toolkit for corpus preparation, mixture sampling, token
// packing, LR schedules, model merging and pairwise-preference rating.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cptk/arena/rating.hpp"
#include "cptk/arena/votes.hpp"
#include "cptk/corpus/clean.hpp"
#include "cptk/error.hpp"
#include "cptk/manifest.hpp"
#include "cptk/merge/container.hpp"
#include "cptk/merge/ops.hpp"
#include "cptk/pipeline/config.hpp"
#include "cptk/pipeline/runner.hpp"
#include "cptk/pipeline/stages.hpp"
#include "cptk/schedule/schedule.hpp"
#include "cptk/version.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalFlags {
    std::string config;
    uint64_t seed = 0;
    std::string work_dir;
    bool no_cache = false;
    int jobs = 1;
    std::string tokenizer = "byte";
};

std::string resolve_against(const std::string& base, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return p.lexically_normal().string();
    return (fs::path(base) / p).lexically_normal().string();
}

cptk::pipeline::StageGlobals stage_globals(const GlobalFlags& g) {
    cptk::pipeline::StageGlobals sg;
    sg.seed = g.seed;
    sg.tokenizer = g.tokenizer;
    sg.jobs = g.jobs;
    return sg;
}

void print_summary(const cptk::pipeline::StageResult& result) {
    json out = result.summary;
    json outputs = json::object();
    for (const auto& [rel, path] : result.outputs) outputs[rel] = path;
    out["outputs"] = outputs;
    std::cout << out.dump(2) << '\n';
}

// ---------------------------------------------------------------- filter --

struct FilterArgs {
    std::string input;
    std::string out_dir = ".";
    std::string profile = "web";
    std::string profile_file;
    std::string dump_profile;
    bool no_normalize = false;
    bool no_verdicts = false;
    std::string lang;
    double lang_threshold = 0.5;
    std::string lang_model;
    std::vector<std::string> lang_seeds;  // label=path
    json quality_overrides = json::object();
};

void run_filter_command(const FilterArgs& a, const GlobalFlags& g) {
    if (!a.dump_profile.empty()) {
        std::cout << cptk::corpus::CleaningProfile::builtin(a.dump_profile).definition_json()
                  << '\n';
        return;
    }
    if (a.input.empty()) throw cptk::ConfigError("filter: --input is required");

    std::map<std::string, std::string> inputs;
    inputs["docs"] = a.input;
    json params = a.quality_overrides;
    if (!a.profile_file.empty()) {
        inputs["profile"] = a.profile_file;
        params["profile"] = {{"input", "profile"}};
    } else {
        params["profile"] = a.profile;
    }
    params["normalize"] = !a.no_normalize;
    params["emit_verdicts"] = !a.no_verdicts;

    if (!a.lang.empty()) {
        params["lang_label"] = a.lang;
        params["lang_threshold"] = a.lang_threshold;
        if (!a.lang_model.empty() && !a.lang_seeds.empty()) {
            throw cptk::ConfigError("filter: pass --lang-model or --lang-seed, not both");
        }
        if (!a.lang_model.empty()) {
            inputs["lang_model"] = a.lang_model;
            params["lang_model_input"] = "lang_model";
        } else if (!a.lang_seeds.empty()) {
            json train = json::object();
            for (const auto& spec : a.lang_seeds) {
                const size_t eq = spec.find('=');
                if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
                    throw cptk::ConfigError("filter: --lang-seed expects label=path, got '" +
                                            spec + "'");
                }
                const std::string label = spec.substr(0, eq);
                inputs["seed_" + label] = spec.substr(eq + 1);
                train[label] = "seed_" + label;
            }
            params["lang_train_inputs"] = train;
        } else {
            throw cptk::ConfigError("filter: --lang needs --lang-model or --lang-seed");
        }
    } else if (!a.lang_model.empty() || !a.lang_seeds.empty()) {
        throw cptk::ConfigError("filter: language options need --lang LABEL");
    }

    print_summary(cptk::pipeline::run_filter_stage(params, inputs, a.out_dir, stage_globals(g)));
}

// ----------------------------------------------------------------- dedup --

struct DedupArgs {
    std::string input;
    std::string out_dir = ".";
    uint32_t ngram = 5;
    uint32_t bands = 14;
    uint32_t rows = 32;
    double verify_jaccard = -1.0;
    bool seed_given = false;
    uint64_t seed = 0;
};

void run_dedup_command(const DedupArgs& a, const GlobalFlags& g) {
    if (a.input.empty()) throw cptk::ConfigError("dedup: --input is required");
    std::map<std::string, std::string> inputs{{"docs", a.input}};
    json params;
    params["ngram"] = a.ngram;
    params["bands"] = a.bands;
    params["rows"] = a.rows;
    params["seed"] = a.seed_given ? a.seed : g.seed;
    if (a.verify_jaccard >= 0.0) params["verify_jaccard"] = a.verify_jaccard;
    print_summary(cptk::pipeline::run_dedup_stage(params, inputs, a.out_dir, stage_globals(g)));
}

// ------------------------------------------------------------------- mix --

struct MixArgs {
    std::string spec_path;
    std::string out_dir = ".";
};

void run_mix_command(const MixArgs& a, const GlobalFlags& g) {
    if (a.spec_path.empty()) throw cptk::ConfigError("mix: --spec is required");
    json spec = cptk::load_json_file(a.spec_path);
    if (!spec.is_object() || !spec.contains("sources") || !spec.at("sources").is_array()) {
        throw cptk::ConfigError(a.spec_path + ": mixture spec needs a \"sources\" array");
    }
    std::string spec_dir = fs::path(a.spec_path).parent_path().string();
    if (spec_dir.empty()) spec_dir = ".";

    GlobalFlags effective = g;
    if (spec.contains("tokenizer")) {
        effective.tokenizer = spec.at("tokenizer").get<std::string>();
    }

    std::map<std::string, std::string> inputs;
    json sources = json::array();
    for (const auto& entry : spec.at("sources")) {
        if (!entry.is_object() || !entry.contains("name") || !entry.contains("path")) {
            throw cptk::ConfigError(a.spec_path + ": each source needs \"name\" and \"path\"");
        }
        json src = entry;
        const std::string name = entry.at("name").get<std::string>();
        inputs[name] = resolve_against(spec_dir, entry.at("path").get<std::string>());
        src.erase("path");
        src["input"] = name;
        sources.push_back(std::move(src));
    }
    json params{{"sources", sources}};
    print_summary(cptk::pipeline::run_mix_stage(params, inputs, a.out_dir,
                                                stage_globals(effective)));
}

// ------------------------------------------------------------------ pack --

struct PackArgs {
    std::string input;
    std::string out_dir = ".";
    uint32_t capacity = 0;
    uint32_t max_len = 0;
    bool placement_log = false;
};

void run_pack_command(const PackArgs& a, const GlobalFlags& g) {
    if (a.input.empty()) throw cptk::ConfigError("pack: --input is required");
    std::map<std::string, std::string> inputs{{"docs", a.input}};
    json params;
    params["capacity"] = a.capacity;
    if (a.max_len > 0) params["max_len"] = a.max_len;
    params["placement_log"] = a.placement_log;
    print_summary(cptk::pipeline::run_pack_stage(params, inputs, a.out_dir, stage_globals(g)));
}

// -------------------------------------------------------------- schedule --

struct ScheduleArgs {
    double peak = 0.0;
    double final_lr = 0.0;
    uint64_t warmup = 0;
    uint64_t decay = 0;
    uint64_t total = 0;
    uint64_t retarget = 0;
    bool retarget_given = false;
    uint64_t at_step = 0;
    bool at_given = false;
    uint64_t table_stride = 0;
    std::string out_path;
};

void run_schedule_command(const ScheduleArgs& a) {
    cptk::schedule::ScheduleConfig cfg;
    cfg.peak_lr = a.peak;
    cfg.final_lr = a.final_lr;
    cfg.warmup_steps = a.warmup;
    cfg.decay_steps = a.decay;
    cfg.total_steps = a.total;
    cfg.validate();
    if (a.retarget_given) cfg = cptk::schedule::retarget_total_steps(cfg, a.retarget);

    if (a.at_given) {
        std::printf("%.17g\n", cptk::schedule::lr_at(cfg, a.at_step));
        return;
    }
    if (a.table_stride > 0) {
        std::ostream* out = &std::cout;
        std::ofstream file;
        if (!a.out_path.empty()) {
            file.open(a.out_path, std::ios::binary | std::ios::trunc);
            if (!file) throw cptk::DataError("cannot write " + a.out_path);
            out = &file;
        }
        (*out) << "step,lr\n";
        char buf[64];
        for (const auto& [step, lr] : cptk::schedule::schedule_table(cfg, a.table_stride)) {
            std::snprintf(buf, sizeof(buf), "%llu,%.17g\n",
                          static_cast<unsigned long long>(step), lr);
            (*out) << buf;
        }
        return;
    }
    json out;
    out["peak_lr"] = cfg.peak_lr;
    out["final_lr"] = cfg.final_lr;
    out["warmup_steps"] = cfg.warmup_steps;
    out["decay_steps"] = cfg.decay_steps;
    out["total_steps"] = cfg.total_steps;
    out["stable_end"] = cfg.stable_end();
    out["lr_at_stable_end"] = cptk::schedule::lr_at(cfg, cfg.stable_end());
    std::cout << out.dump(2) << '\n';
}

// ----------------------------------------------------------------- merge --

std::string sweep_output_name(const std::string& pattern, const std::string& key, double value) {
    char num[32];
    std::snprintf(num, sizeof(num), "%.6g", value);
    const std::string placeholder = "{" + key + "}";
    std::string out = pattern;
    const size_t pos = out.find(placeholder);
    if (pos != std::string::npos) {
        out.replace(pos, placeholder.size(), num);
        return out;
    }
    // No placeholder: insert "-<key><value>" before the extension.
    fs::path p(pattern);
    const std::string stem = p.stem().string();
    const std::string ext = p.extension().string();
    return (p.parent_path() / (stem + "-" + key + num + ext)).string();
}

struct MergeDeltaArgs {
    std::string instruct, base, out;
};

void run_merge_delta(const MergeDeltaArgs& a) {
    const auto instruct = cptk::merge::read_container(a.instruct);
    const auto base = cptk::merge::read_container(a.base);
    cptk::merge::write_container(cptk::merge::tensor_delta(instruct, base), a.out);
    std::cout << a.out << '\n';
}

struct MergeChatVectorArgs {
    std::string model, delta, out;
    std::string alpha = "1.0";
    std::vector<std::string> exclude;
    bool no_default_exclude = false;
};

void run_merge_chat_vector(const MergeChatVectorArgs& a) {
    cptk::merge::ChatVectorConfig cfg;
    cfg.exclude = a.exclude;
    if (cfg.exclude.empty() && !a.no_default_exclude) {
        // Token-embedding rows correspond to vocabulary entries; shifting
        // them with a delta computed on a different data mix usually hurts,
        // so they stay put unless explicitly included.
        cfg.exclude = {"*embed_tokens*"};
    }
    const auto values = cptk::merge::parse_value_sweep(a.alpha);
    const auto model = cptk::merge::read_container(a.model);
    const auto delta = cptk::merge::read_container(a.delta);
    for (const double alpha : values) {
        cfg.alpha = alpha;
        const std::string out_path =
            values.size() == 1 ? a.out : sweep_output_name(a.out, "alpha", alpha);
        cptk::merge::write_container(cptk::merge::apply_chat_vector(model, delta, cfg), out_path);
        std::cout << out_path << '\n';
    }
}

struct MergeSlerpArgs {
    std::string a, b, out;
    std::string t = "0.5";
};

void run_merge_slerp(const MergeSlerpArgs& args) {
    const auto values = cptk::merge::parse_value_sweep(args.t);
    const auto ma = cptk::merge::read_container(args.a);
    const auto mb = cptk::merge::read_container(args.b);
    for (const double t : values) {
        cptk::merge::SlerpConfig cfg;
        cfg.t = t;
        const std::string out_path =
            values.size() == 1 ? args.out : sweep_output_name(args.out, "t", t);
        cptk::merge::write_container(cptk::merge::slerp_merge(ma, mb, cfg), out_path);
        std::cout << out_path << '\n';
    }
}

// ----------------------------------------------------------------- arena --

struct ArenaArgs {
    std::string votes_path;
    std::string protocol = "bt";
    uint64_t resamples = 1000;
    bool seed_given = false;
    uint64_t seed = 0;
    double k = 32.0;
    double initial = 1000.0;
    std::string csv_path;
    std::string json_path;
};

void run_arena_rate(const ArenaArgs& a, const GlobalFlags& g) {
    using namespace cptk::arena;
    if (a.protocol != "bt" && a.protocol != "elo") {
        throw cptk::ConfigError("arena: --protocol must be bt or elo");
    }
    VoteSet votes = read_votes(a.votes_path);
    for (const auto& rejected : votes.rejected) {
        std::cerr << a.votes_path << ":" << rejected.line_number << ": rejected vote: "
                  << rejected.reason << '\n';
    }
    if (votes.records.empty()) {
        throw cptk::DataError(a.votes_path + ": no usable votes");
    }

    std::map<std::string, uint64_t> counts;
    for (const auto& model : votes.models) counts[model] = votes_for_model(votes, model);

    std::vector<LeaderboardRow> rows;
    json extra = json::object();
    if (a.protocol == "bt") {
        BradleyTerryFit fit = fit_bradley_terry(votes);
        const uint64_t seed = a.seed_given ? a.seed : g.seed;
        auto intervals = bootstrap_intervals(votes, a.resamples, seed);
        rows = assign_ranks(fit.ratings, intervals, counts, fit.regularized);
        extra["components"] = fit.components;
        extra["resamples"] = a.resamples;
        extra["seed"] = seed;
    } else {
        auto ratings = online_elo(votes, EloOptions{a.k, a.initial});
        rows = assign_ranks(ratings, {}, counts, {});
        extra["k"] = a.k;
        extra["initial"] = a.initial;
    }

    std::string csv = "rank,model,score,ci_low,ci_high,votes,flags\n";
    for (const auto& row : rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%llu,%s,%.1f,%.1f,%.1f,%llu,%s\n",
                      static_cast<unsigned long long>(row.rank), row.model.c_str(), row.score,
                      row.ci_low, row.ci_high, static_cast<unsigned long long>(row.votes),
                      row.regularized ? "regularized" : "");
        csv += buf;
    }
    if (!a.csv_path.empty()) {
        std::ofstream out(a.csv_path, std::ios::binary | std::ios::trunc);
        if (!out) throw cptk::DataError("cannot write " + a.csv_path);
        out << csv;
    }
    if (!a.json_path.empty()) {
        json doc;
        doc["protocol"] = a.protocol;
        doc["rejected_lines"] = votes.rejected.size();
        doc["details"] = extra;
        json models = json::array();
        for (const auto& row : rows) {
            models.push_back({{"rank", row.rank},
                              {"model", row.model},
                              {"score", row.score},
                              {"ci_low", row.ci_low},
                              {"ci_high", row.ci_high},
                              {"votes", row.votes},
                              {"regularized", row.regularized}});
        }
        doc["models"] = models;
        cptk::write_json_file(a.json_path, doc);
    }
    if (a.csv_path.empty() && a.json_path.empty()) std::cout << csv;
}

// ------------------------------------------------------------- run/explain --

void run_run_command(const GlobalFlags& g, const std::vector<std::string>& only) {
    if (g.config.empty()) throw cptk::ConfigError("run: --config is required");
    auto config = cptk::pipeline::PipelineConfig::from_file(g.config);
    if (!g.work_dir.empty()) config.work_dir = g.work_dir;
    if (g.seed != 0) config.seed = g.seed;

    cptk::pipeline::RunnerOptions options;
    options.no_cache = g.no_cache;
    options.jobs = g.jobs;
    options.only_stages = only;
    json manifest = cptk::pipeline::run_pipeline(config, options);
    for (const auto& stage : manifest.at("stages")) {
        std::cout << "stage " << stage.at("name").get<std::string>() << ": "
                  << (stage.at("cached").get<bool>() ? "cached" : "executed") << '\n';
    }
    const std::string work_abs = resolve_against(config.base_dir, config.work_dir);
    std::cout << "manifest: " << resolve_against(work_abs, "run_manifest.json") << '\n';
}

void run_explain_command(const GlobalFlags& g, const std::vector<std::string>& only) {
    if (g.config.empty()) throw cptk::ConfigError("explain: --config is required");
    auto config = cptk::pipeline::PipelineConfig::from_file(g.config);
    if (!g.work_dir.empty()) config.work_dir = g.work_dir;
    if (g.seed != 0) config.seed = g.seed;

    cptk::pipeline::RunnerOptions options;
    options.no_cache = g.no_cache;
    options.jobs = g.jobs;
    options.only_stages = only;
    for (const auto& plan : cptk::pipeline::explain_pipeline(config, options)) {
        std::cout << plan.name << " (" << plan.module << "): "
                  << (plan.will_run ? "will run" : "cached") << " — " << plan.reason << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"batch toolkit for continued-pretraining data and evaluation plumbing"};
    app.set_version_flag("--version", cptk::kVersion);
    app.require_subcommand(1);

    GlobalFlags g;
    app.add_option("--config", g.config, "pipeline config file")->envname("CPTK_CONFIG");
    app.add_option("--seed", g.seed, "global seed")->envname("CPTK_SEED");
    app.add_option("--work-dir", g.work_dir, "override the pipeline work directory")
        ->envname("CPTK_WORK_DIR");
    app.add_flag("--no-cache", g.no_cache, "ignore cached stage results")
        ->envname("CPTK_NO_CACHE");
    app.add_option("--jobs", g.jobs, "worker threads for parallel stages")
        ->envname("CPTK_JOBS");
    app.add_option("--tokenizer", g.tokenizer, "tokenizer id (default: byte)")
        ->envname("CPTK_TOKENIZER");

    // filter
    FilterArgs filter_args;
    auto* filter = app.add_subcommand("filter", "normalize, clean and quality-filter a corpus");
    filter->fallthrough();
    filter->add_option("--input", filter_args.input, "input JSONL corpus");
    filter->add_option("--output-dir", filter_args.out_dir, "output directory");
    filter->add_option("--profile", filter_args.profile, "built-in cleaning profile name");
    filter->add_option("--profile-file", filter_args.profile_file, "cleaning profile JSON file");
    filter->add_option("--dump-profile", filter_args.dump_profile,
                       "print a built-in profile definition and exit");
    filter->add_flag("--no-normalize", filter_args.no_normalize, "skip Unicode normalization");
    filter->add_flag("--no-verdicts", filter_args.no_verdicts, "do not write verdicts.jsonl");
    filter->add_option("--lang", filter_args.lang, "keep only documents in this language");
    filter->add_option("--lang-threshold", filter_args.lang_threshold,
                       "minimum language probability (default 0.5)");
    filter->add_option("--lang-model", filter_args.lang_model, "language model JSON file");
    filter->add_option("--lang-seed", filter_args.lang_seeds,
                       "label=path seed text to train the language model (repeatable)");
    for (const char* key :
         {"min_words", "max_symbol_word_ratio", "max_non_alpha_frac", "max_bullet_line_frac",
          "max_ellipsis_line_frac"}) {
        std::string flag = "--" + std::string(key);
        for (auto& c : flag) {
            if (c == '_') c = '-';
        }
        filter->add_option_function<double>(
            flag, [&filter_args, key = std::string(key)](double v) {
                if (key == "min_words") {
                    filter_args.quality_overrides[key] = static_cast<uint32_t>(v);
                } else {
                    filter_args.quality_overrides[key] = v;
                }
            });
    }
    filter->add_option_function<std::vector<double>>(
        "--avg-word-len-range",
        [&filter_args](const std::vector<double>& range) {
            filter_args.quality_overrides["avg_word_len_range"] = range;
        })
        ->expected(2);
    filter->add_flag_function("--keep-curly", [&filter_args](int64_t) {
        filter_args.quality_overrides["reject_curly_markup"] = false;
    });
    filter->callback([&] { run_filter_command(filter_args, g); });

    // dedup
    DedupArgs dedup_args;
    auto* dedup = app.add_subcommand("dedup", "remove near-duplicate documents");
    dedup->fallthrough();
    dedup->add_option("--input", dedup_args.input, "input JSONL corpus");
    dedup->add_option("--output-dir", dedup_args.out_dir, "output directory");
    dedup->add_option("--ngram", dedup_args.ngram, "shingle width in words (default 5)");
    dedup->add_option("--bands", dedup_args.bands, "LSH bands (default 14)");
    dedup->add_option("--rows", dedup_args.rows, "rows per band (default 32)");
    dedup->add_option("--verify-jaccard", dedup_args.verify_jaccard,
                      "confirm candidates with exact Jaccard at this threshold");
    auto* dedup_seed =
        dedup->add_option("--seed", dedup_args.seed, "hash seed (default: global seed)");
    dedup->callback([&] {
        dedup_args.seed_given = dedup_seed->count() > 0;
        run_dedup_command(dedup_args, g);
    });

    // mix
    MixArgs mix_args;
    auto* mix = app.add_subcommand("mix", "draw a seeded mixture under token budgets");
    mix->fallthrough();
    mix->add_option("--spec", mix_args.spec_path, "mixture spec JSON file");
    mix->add_option("--output-dir", mix_args.out_dir, "output directory");
    mix->callback([&] { run_mix_command(mix_args, g); });

    // pack
    PackArgs pack_args;
    auto* pack = app.add_subcommand("pack", "tokenize and pack documents into fixed rows");
    pack->fallthrough();
    pack->add_option("--input", pack_args.input, "input JSONL corpus");
    pack->add_option("--output-dir", pack_args.out_dir, "output directory");
    pack->add_option("--capacity", pack_args.capacity, "tokens per output row")->required();
    pack->add_option("--max-len", pack_args.max_len, "chunk length (default: capacity)");
    pack->add_flag("--placement-log", pack_args.placement_log, "write placements.jsonl");
    pack->callback([&] { run_pack_command(pack_args, g); });

    // schedule
    ScheduleArgs sched_args;
    auto* sched = app.add_subcommand("schedule", "trapezoidal learning-rate schedule");
    sched->fallthrough();
    sched->add_option("--peak", sched_args.peak, "peak learning rate")->required();
    sched->add_option("--final", sched_args.final_lr, "final learning rate (default 0)");
    sched->add_option("--warmup", sched_args.warmup, "warmup steps")->required();
    sched->add_option("--decay", sched_args.decay, "decay steps")->required();
    sched->add_option("--total", sched_args.total, "total steps")->required();
    auto* retarget_opt = sched->add_option("--retarget", sched_args.retarget,
                                           "recompute for a new total step count");
    auto* at_opt = sched->add_option("--at", sched_args.at_step, "print the rate at one step");
    sched->add_option("--table", sched_args.table_stride,
                      "print a step,lr CSV sampled at this stride");
    sched->add_option("--out", sched_args.out_path, "write the CSV here instead of stdout");
    sched->callback([&] {
        sched_args.retarget_given = retarget_opt->count() > 0;
        sched_args.at_given = at_opt->count() > 0;
        run_schedule_command(sched_args);
    });

    // merge
    auto* merge = app.add_subcommand("merge", "weight-space model operations");
    merge->require_subcommand(1);

    MergeDeltaArgs delta_args;
    auto* mdelta = merge->add_subcommand("delta", "instruct minus base, tensor by tensor");
    mdelta->add_option("--instruct", delta_args.instruct, "instruct model container")->required();
    mdelta->add_option("--base", delta_args.base, "base model container")->required();
    mdelta->add_option("--out", delta_args.out, "output container")->required();
    mdelta->callback([&] { run_merge_delta(delta_args); });

    MergeChatVectorArgs cv_args;
    auto* mcv = merge->add_subcommand("chat-vector", "add a scaled delta onto a model");
    mcv->add_option("--model", cv_args.model, "model container to improve")->required();
    mcv->add_option("--delta", cv_args.delta, "delta container")->required();
    mcv->add_option("--alpha", cv_args.alpha, "scale, or sweep start..stop:step");
    mcv->add_option("--exclude", cv_args.exclude,
                    "glob of tensor names to copy unchanged (repeatable; default "
                    "*embed_tokens*)");
    mcv->add_flag("--no-default-exclude", cv_args.no_default_exclude,
                  "shift every tensor, including embeddings");
    mcv->add_option("--out", cv_args.out, "output container (supports {alpha})")->required();
    mcv->callback([&] { run_merge_chat_vector(cv_args); });

    MergeSlerpArgs slerp_args;
    auto* mslerp = merge->add_subcommand("slerp", "spherical interpolation of two models");
    mslerp->add_option("--a", slerp_args.a, "first model container")->required();
    mslerp->add_option("--b", slerp_args.b, "second model container")->required();
    mslerp->add_option("--t", slerp_args.t, "interpolation point, or sweep start..stop:step");
    mslerp->add_option("--out", slerp_args.out, "output container (supports {t})")->required();
    mslerp->callback([&] { run_merge_slerp(slerp_args); });

    // arena
    auto* arena = app.add_subcommand("arena", "pairwise-preference rating");
    arena->require_subcommand(1);
    ArenaArgs arena_args;
    auto* rate = arena->add_subcommand("rate", "fit ratings from a votes JSONL file");
    rate->fallthrough();
    rate->add_option("votes", arena_args.votes_path, "votes JSONL file")->required();
    rate->add_option("--protocol", arena_args.protocol, "bt (default) or elo");
    rate->add_option("--resamples", arena_args.resamples,
                     "bootstrap resamples for confidence intervals (default 1000)");
    auto* arena_seed = rate->add_option("--seed", arena_args.seed,
                                        "bootstrap seed (default: global seed)");
    rate->add_option("--k", arena_args.k, "Elo K-factor (default 32)");
    rate->add_option("--initial", arena_args.initial, "Elo initial rating (default 1000)");
    rate->add_option("--csv", arena_args.csv_path, "write the leaderboard CSV here");
    rate->add_option("--json", arena_args.json_path, "write the full report JSON here");
    rate->callback([&] {
        arena_args.seed_given = arena_seed->count() > 0;
        run_arena_rate(arena_args, g);
    });

    // run / explain
    std::vector<std::string> only_stages;
    auto* run = app.add_subcommand("run", "execute a pipeline config with caching");
    run->fallthrough();
    run->add_option("--stage", only_stages, "run only these stages (repeatable)");
    run->callback([&] { run_run_command(g, only_stages); });

    auto* explain = app.add_subcommand("explain", "show which stages a run would execute");
    explain->fallthrough();
    explain->add_option("--stage", only_stages, "consider only these stages (repeatable)");
    explain->callback([&] { run_explain_command(g, only_stages); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const cptk::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
