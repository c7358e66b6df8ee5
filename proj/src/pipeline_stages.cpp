#include "cptk/pipeline/stages.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "cptk/corpus/clean.hpp"
#include "cptk/corpus/langid.hpp"
#include "cptk/corpus/quality.hpp"
#include "cptk/dedup/cluster.hpp"
#include "cptk/document.hpp"
#include "cptk/error.hpp"
#include "cptk/mixer/mixture.hpp"
#include "cptk/packer/pack.hpp"
#include "cptk/packer/pkt_file.hpp"
#include "cptk/packer/tokenizer.hpp"
#include "cptk/parallel.hpp"
#include "cptk/unicode.hpp"

namespace cptk::pipeline {

namespace {

namespace fs = std::filesystem;

constexpr size_t kWaveDocs = 2048;  // documents processed per parallel wave

std::string out_path(const std::string& out_dir, const std::string& name) {
    return (fs::path(out_dir) / name).string();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write output: " + path);
    return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw DataError("failed writing output: " + path);
}

const std::string& required_input(const std::map<std::string, std::string>& inputs,
                                  const std::string& name, const char* module) {
    auto it = inputs.find(name);
    if (it == inputs.end()) {
        throw ConfigError(std::string(module) + " stage needs input '" + name + "'");
    }
    return it->second;
}

void check_keys(const nlohmann::json& params, std::initializer_list<const char*> allowed,
                const char* where) {
    for (const auto& [key, value] : params.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end()) {
            std::string known;
            for (const char* k : allowed) {
                if (!known.empty()) known += ", ";
                known += k;
            }
            throw ConfigError(std::string(where) + ": unknown parameter '" + key +
                              "' (known: " + known + ")");
        }
    }
}

template <typename T>
T param_or(const nlohmann::json& params, const std::string& key, T fallback) {
    if (!params.contains(key)) return fallback;
    try {
        return params.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("parameter '" + key + "' has the wrong type");
    }
}

std::string read_text_file(const std::string& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + what + ": " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

corpus::FilterConfig filter_config_from(const nlohmann::json& params) {
    corpus::FilterConfig cfg;
    cfg.min_words = param_or<uint32_t>(params, "min_words", cfg.min_words);
    if (params.contains("avg_word_len_range")) {
        const auto& range = params.at("avg_word_len_range");
        if (!range.is_array() || range.size() != 2 || !range.at(0).is_number() ||
            !range.at(1).is_number()) {
            throw ConfigError("filter: avg_word_len_range must be [low, high]");
        }
        cfg.min_avg_word_len = range.at(0).get<double>();
        cfg.max_avg_word_len = range.at(1).get<double>();
    }
    cfg.max_symbol_word_ratio =
        param_or<double>(params, "max_symbol_word_ratio", cfg.max_symbol_word_ratio);
    cfg.max_non_alpha_frac =
        param_or<double>(params, "max_non_alpha_frac", cfg.max_non_alpha_frac);
    cfg.max_bullet_line_frac =
        param_or<double>(params, "max_bullet_line_frac", cfg.max_bullet_line_frac);
    cfg.max_ellipsis_line_frac =
        param_or<double>(params, "max_ellipsis_line_frac", cfg.max_ellipsis_line_frac);
    cfg.reject_curly_markup =
        param_or<bool>(params, "reject_curly_markup", cfg.reject_curly_markup);
    cfg.lang_label = param_or<std::string>(params, "lang_label", cfg.lang_label);
    cfg.lang_threshold = param_or<double>(params, "lang_threshold", cfg.lang_threshold);
    return cfg;
}

}  // namespace

StageResult run_filter_stage(const nlohmann::json& params,
                             const std::map<std::string, std::string>& inputs,
                             const std::string& out_dir, const StageGlobals& globals) {
    check_keys(params,
               {"profile", "normalize", "min_words", "avg_word_len_range",
                "max_symbol_word_ratio", "max_non_alpha_frac", "max_bullet_line_frac",
                "max_ellipsis_line_frac", "reject_curly_markup", "lang_label", "lang_threshold",
                "lang_model_input", "lang_train_inputs", "emit_verdicts"},
               "filter");
    const std::string& docs_path = required_input(inputs, "docs", "filter");
    const bool normalize = param_or<bool>(params, "normalize", true);
    const bool emit_verdicts = param_or<bool>(params, "emit_verdicts", true);

    corpus::FilterConfig cfg = filter_config_from(params);

    // Markup profile: a built-in name, or {"input": "<name>"} to load a
    // profile JSON supplied through the stage inputs.
    const corpus::CleaningProfile* profile = nullptr;
    corpus::CleaningProfile loaded_profile;
    if (params.contains("profile") && params.at("profile").is_object()) {
        check_keys(params.at("profile"), {"input"}, "filter.profile");
        const auto logical = param_or<std::string>(params.at("profile"), "input", "");
        loaded_profile =
            corpus::CleaningProfile::from_file(required_input(inputs, logical, "filter"));
        profile = &loaded_profile;
    } else {
        profile = &corpus::CleaningProfile::builtin(
            param_or<std::string>(params, "profile", "web"));
    }

    // Optional language gate, active when lang_label is set. The scorer
    // comes from a prebuilt model file or from per-label seed texts.
    std::unique_ptr<corpus::NgramLanguageScorer> scorer;
    if (!cfg.lang_label.empty()) {
        const bool has_model = params.contains("lang_model_input");
        const bool has_seeds = params.contains("lang_train_inputs");
        if (has_model == has_seeds) {
            throw ConfigError(
                "filter: language gate needs exactly one of lang_model_input / "
                "lang_train_inputs");
        }
        if (has_model) {
            const auto logical = param_or<std::string>(params, "lang_model_input", "");
            scorer = std::make_unique<corpus::NgramLanguageScorer>(
                corpus::NgramLanguageScorer::load(required_input(inputs, logical, "filter")));
        } else {
            scorer = std::make_unique<corpus::NgramLanguageScorer>();
            const auto& train = params.at("lang_train_inputs");
            if (!train.is_object() || train.empty()) {
                throw ConfigError("filter: lang_train_inputs must be a non-empty object");
            }
            for (const auto& [label, logical] : train.items()) {
                if (!logical.is_string()) {
                    throw ConfigError("filter: lang_train_inputs values must be input names");
                }
                const std::string& path =
                    required_input(inputs, logical.get<std::string>(), "filter");
                try {
                    scorer->train(label, read_text_file(path, "language seed text"));
                } catch (const Error& e) {
                    throw DataError("language seed '" + label + "': " + e.what());
                }
            }
            const auto labels = scorer->labels();
            if (!std::count(labels.begin(), labels.end(), cfg.lang_label)) {
                throw ConfigError("filter: lang_train_inputs has no seed for target language '" +
                                  cfg.lang_label + "'");
            }
        }
    } else if (params.contains("lang_model_input") || params.contains("lang_train_inputs")) {
        throw ConfigError("filter: language scorer options need lang_label");
    }
    cfg.validate();

    fs::create_directories(out_dir);
    const std::string filtered_path = out_path(out_dir, "filtered.jsonl");
    const std::string verdicts_path = out_path(out_dir, "verdicts.jsonl");
    std::ofstream filtered = open_output(filtered_path);
    std::ofstream verdicts;
    if (emit_verdicts) verdicts = open_output(verdicts_path);

    struct Processed {
        std::string doc_line;
        std::string verdict_line;
        bool kept = false;
        corpus::FilterReason reason = corpus::FilterReason::kPass;
    };

    uint64_t input_docs = 0;
    uint64_t kept = 0;
    std::map<std::string, uint64_t> rejected;

    DocumentReader reader(docs_path);
    std::vector<Document> wave;
    wave.reserve(kWaveDocs);
    bool more = true;
    while (more) {
        wave.clear();
        Document doc;
        while (wave.size() < kWaveDocs && (more = reader.next(doc))) wave.push_back(doc);
        if (wave.empty()) break;

        std::vector<Processed> results(wave.size());
        parallel_for(wave.size(), globals.jobs, [&](size_t i) {
            Document d = wave[i];
            try {
                std::string text = normalize ? uni::nfkc(d.text) : d.text;
                text = profile->apply(text);
                corpus::FilterVerdict verdict = corpus::quality_filter(text, cfg);
                if (verdict.kept && scorer) {
                    verdict = corpus::language_filter(text, *scorer, cfg);
                }
                Processed& p = results[i];
                p.kept = verdict.kept;
                p.reason = verdict.reason;
                if (verdict.kept) {
                    d.text = std::move(text);
                    p.doc_line = document_to_json(d);
                }
                nlohmann::json v;
                v["id"] = d.id;
                v["kept"] = verdict.kept;
                v["reason"] = corpus::filter_reason_name(verdict.reason);
                if (verdict.score) v["score"] = *verdict.score;
                p.verdict_line = v.dump();
            } catch (const Error& e) {
                throw DataError("document '" + d.id + "': " + e.what());
            }
        });

        for (const auto& p : results) {
            ++input_docs;
            if (p.kept) {
                ++kept;
                filtered << p.doc_line << '\n';
            } else {
                ++rejected[std::string(corpus::filter_reason_name(p.reason))];
            }
            if (emit_verdicts) verdicts << p.verdict_line << '\n';
        }
    }
    finish_output(filtered, filtered_path);
    if (emit_verdicts) finish_output(verdicts, verdicts_path);

    StageResult result;
    result.outputs["filtered.jsonl"] = filtered_path;
    if (emit_verdicts) result.outputs["verdicts.jsonl"] = verdicts_path;
    result.summary["input_docs"] = input_docs;
    result.summary["kept"] = kept;
    result.summary["rejected"] = rejected;
    result.summary["profile"] = {{"name", profile->name()}, {"version", profile->version()}};
    result.summary["normalize"] = normalize;
    if (scorer) {
        result.summary["language"] = {{"label", cfg.lang_label},
                                      {"threshold", cfg.lang_threshold}};
    }
    return result;
}

StageResult run_dedup_stage(const nlohmann::json& params,
                            const std::map<std::string, std::string>& inputs,
                            const std::string& out_dir, const StageGlobals& globals) {
    check_keys(params, {"ngram", "seed", "bands", "rows", "verify_jaccard"}, "dedup");
    const std::string& docs_path = required_input(inputs, "docs", "dedup");

    dedup::DedupOptions options;
    options.ngram = param_or<uint32_t>(params, "ngram", 5);
    options.scheme.bands = param_or<uint32_t>(params, "bands", options.scheme.bands);
    options.scheme.rows = param_or<uint32_t>(params, "rows", options.scheme.rows);
    options.scheme.seed = param_or<uint64_t>(params, "seed", globals.seed);
    if (options.ngram == 0 || options.scheme.bands == 0 || options.scheme.rows == 0) {
        throw ConfigError("dedup: ngram, bands and rows must all be at least 1");
    }
    if (params.contains("verify_jaccard")) {
        const double threshold = param_or<double>(params, "verify_jaccard", 0.0);
        if (!(threshold >= 0.0 && threshold <= 1.0)) {
            throw ConfigError("dedup: verify_jaccard must lie in [0, 1]");
        }
        options.verify_jaccard = threshold;
    }

    // Pass 1: per-document fingerprints (parallel per wave), then the
    // order-insensitive closure.
    std::vector<dedup::DocBands> all;
    {
        DocumentReader reader(docs_path);
        std::vector<Document> wave;
        wave.reserve(kWaveDocs);
        bool more = true;
        while (more) {
            wave.clear();
            Document doc;
            while (wave.size() < kWaveDocs && (more = reader.next(doc))) wave.push_back(doc);
            if (wave.empty()) break;
            const size_t base = all.size();
            all.resize(base + wave.size());
            parallel_for(wave.size(), globals.jobs, [&](size_t i) {
                all[base + i] = dedup::compute_doc_bands(wave[i].id, wave[i].text, options);
            });
        }
    }
    dedup::DedupReport report = dedup::cluster_from_bands(all, options);
    const std::unordered_set<std::string> removed = dedup::removed_ids(report);

    fs::create_directories(out_dir);
    const std::string deduped_path = out_path(out_dir, "deduped.jsonl");
    const std::string clusters_path = out_path(out_dir, "clusters.jsonl");
    const std::string unsignable_path = out_path(out_dir, "unsignable.txt");

    // Pass 2: rewrite survivors preserving input order and bytes.
    uint64_t kept = 0;
    {
        std::ofstream out = open_output(deduped_path);
        DocumentReader reader(docs_path);
        Document doc;
        while (reader.next(doc)) {
            if (removed.count(doc.id)) continue;
            out << reader.raw_line() << '\n';
            ++kept;
        }
        finish_output(out, deduped_path);
    }
    {
        std::ofstream out = open_output(clusters_path);
        for (const auto& cluster : report.clusters) {
            nlohmann::json line;
            line["survivor"] = cluster.survivor;
            line["members"] = cluster.members;
            out << line.dump() << '\n';
        }
        finish_output(out, clusters_path);
    }
    {
        std::ofstream out = open_output(unsignable_path);
        for (const auto& id : report.unsignable_ids) out << id << '\n';
        finish_output(out, unsignable_path);
    }

    StageResult result;
    result.outputs["deduped.jsonl"] = deduped_path;
    result.outputs["clusters.jsonl"] = clusters_path;
    result.outputs["unsignable.txt"] = unsignable_path;
    result.summary["input_docs"] = report.doc_count;
    result.summary["kept"] = kept;
    result.summary["removed"] = removed.size();
    result.summary["clusters"] = report.clusters.size();
    result.summary["unsignable"] = report.unsignable_ids.size();
    return result;
}

StageResult run_mix_stage(const nlohmann::json& params,
                          const std::map<std::string, std::string>& inputs,
                          const std::string& out_dir, const StageGlobals& globals) {
    check_keys(params, {"sources"}, "mix");
    if (!params.contains("sources") || !params.at("sources").is_array() ||
        params.at("sources").empty()) {
        throw ConfigError("mix: needs a non-empty \"sources\" array");
    }

    mixer::MixtureSpec spec;
    spec.tokenizer = globals.tokenizer;
    std::map<std::string, std::string> source_input;  // source name -> logical input
    for (const auto& entry : params.at("sources")) {
        if (!entry.is_object()) throw ConfigError("mix: each source must be an object");
        check_keys(entry, {"name", "input", "token_budget", "seed", "disjoint_from"},
                   "mix.sources");
        mixer::MixtureSource src;
        src.name = param_or<std::string>(entry, "name", "");
        const auto logical = param_or<std::string>(entry, "input", "");
        if (logical.empty()) {
            throw ConfigError("mix: source '" + src.name + "' needs an \"input\" name");
        }
        src.path = required_input(inputs, logical, "mix");
        if (!entry.contains("token_budget")) {
            throw ConfigError("mix: source '" + src.name + "' needs a token_budget");
        }
        src.token_budget = param_or<uint64_t>(entry, "token_budget", 0);
        src.seed = param_or<uint64_t>(entry, "seed", globals.seed);
        if (entry.contains("disjoint_from")) {
            src.disjoint_from = param_or<std::string>(entry, "disjoint_from", "");
        }
        source_input[src.name] = logical;
        spec.sources.push_back(std::move(src));
    }
    spec.validate();

    const auto tokenizer = packer::make_tokenizer(globals.tokenizer);
    std::map<std::string, mixer::CorpusIndex> indexes;
    for (const auto& src : spec.sources) {
        if (!indexes.count(src.path)) {
            indexes.emplace(src.path, mixer::index_corpus(src.path, *tokenizer));
        }
    }

    const std::vector<mixer::SampleSlice> slices = mixer::plan_samples(spec, indexes);

    fs::create_directories(out_dir);
    StageResult result;
    nlohmann::json slice_records = nlohmann::json::array();
    nlohmann::json tokens = nlohmann::json::object();
    nlohmann::json docs = nlohmann::json::object();
    std::vector<std::string> shortfalls;
    for (const auto& slice : slices) {
        const std::string file = slice.source_name + ".jsonl";
        const std::string path = out_path(out_dir, file);
        mixer::draw_slice(indexes.at(slice.corpus_path), slice, path);
        result.outputs[file] = path;

        nlohmann::json rec;
        rec["source"] = slice.source_name;
        rec["input"] = source_input.at(slice.source_name);
        rec["corpus_sha256"] = slice.corpus_sha256;
        rec["corpus_docs"] = slice.corpus_docs;
        rec["permutation_seed"] = slice.permutation_seed;
        rec["start"] = slice.start;
        rec["end"] = slice.end;
        rec["token_count"] = slice.token_count;
        rec["token_budget"] = slice.token_budget;
        rec["shortfall"] = slice.shortfall;
        slice_records.push_back(std::move(rec));

        tokens[slice.source_name] = slice.token_count;
        docs[slice.source_name] = slice.end - slice.start;
        if (slice.shortfall) shortfalls.push_back(slice.source_name);
    }
    const std::string slices_path = out_path(out_dir, "slices.json");
    {
        std::ofstream out = open_output(slices_path);
        out << nlohmann::json{{"slices", slice_records}}.dump(2) << '\n';
        finish_output(out, slices_path);
    }
    result.outputs["slices.json"] = slices_path;
    result.summary["tokens"] = tokens;
    result.summary["docs"] = docs;
    result.summary["shortfall"] = shortfalls;
    return result;
}

StageResult run_pack_stage(const nlohmann::json& params,
                           const std::map<std::string, std::string>& inputs,
                           const std::string& out_dir, const StageGlobals& globals) {
    check_keys(params, {"capacity", "max_len", "placement_log"}, "pack");
    const std::string& docs_path = required_input(inputs, "docs", "pack");
    if (!params.contains("capacity")) throw ConfigError("pack: needs a capacity");
    const auto capacity = param_or<uint32_t>(params, "capacity", 0);
    if (capacity < 2) throw ConfigError("pack: capacity must be at least 2");
    const auto max_len = param_or<uint32_t>(params, "max_len", capacity);
    if (max_len > capacity) {
        throw ConfigError("pack: max_len must not exceed capacity");
    }
    const bool placement_log = param_or<bool>(params, "placement_log", false);

    const auto tokenizer = packer::make_tokenizer(globals.tokenizer);
    std::vector<packer::Chunk> chunks;
    uint64_t input_docs = 0;
    for_each_document(docs_path, [&](const Document& doc) {
        ++input_docs;
        packer::TokenSequence seq = packer::tokenize(doc, *tokenizer);
        for (auto& c : packer::chunk(seq, max_len)) chunks.push_back(std::move(c));
    });

    packer::PackResult packed = packer::pack_best_fit(chunks, capacity);
    packer::PackStats stats = packing_stats(packed);

    fs::create_directories(out_dir);
    const std::string pkt_path = out_path(out_dir, "packed.pkt");
    packer::write_pkt(pkt_path, packed, tokenizer->pad_id(), tokenizer->eot_id());

    nlohmann::json sidecar;
    sidecar["format"] = "PKT1";
    sidecar["capacity"] = capacity;
    sidecar["max_len"] = max_len;
    sidecar["tokenizer"] = tokenizer->id();
    sidecar["pad_id"] = tokenizer->pad_id();
    sidecar["eot_id"] = tokenizer->eot_id();
    sidecar["input_docs"] = input_docs;
    sidecar["rows"] = stats.bucket_count;
    sidecar["tokens"] = stats.token_count;
    sidecar["chunks"] = stats.chunk_count;
    sidecar["utilization"] = stats.utilization;
    sidecar["padding_fraction"] = stats.padding_fraction;
    const std::string sidecar_path = out_path(out_dir, "packed.json");
    {
        std::ofstream out = open_output(sidecar_path);
        out << sidecar.dump(2) << '\n';
        finish_output(out, sidecar_path);
    }

    StageResult result;
    result.outputs["packed.pkt"] = pkt_path;
    result.outputs["packed.json"] = sidecar_path;
    if (placement_log) {
        const std::string log_path = out_path(out_dir, "placements.jsonl");
        std::ofstream out = open_output(log_path);
        for (const auto& rec : packed.log) {
            nlohmann::json line;
            line["doc_id"] = rec.doc_id;
            line["chunk_index"] = rec.chunk_index;
            line["chunk_len"] = rec.chunk_len;
            line["bucket"] = rec.bucket_index;
            line["residual_before"] = rec.residual_before;
            line["opened_new"] = rec.opened_new;
            out << line.dump() << '\n';
        }
        finish_output(out, log_path);
        result.outputs["placements.jsonl"] = log_path;
    }
    result.summary = sidecar;
    return result;
}

StageResult run_stage(const std::string& module, const nlohmann::json& params,
                      const std::map<std::string, std::string>& inputs,
                      const std::string& out_dir, const StageGlobals& globals) {
    if (module == "filter") return run_filter_stage(params, inputs, out_dir, globals);
    if (module == "dedup") return run_dedup_stage(params, inputs, out_dir, globals);
    if (module == "mix") return run_mix_stage(params, inputs, out_dir, globals);
    if (module == "pack") return run_pack_stage(params, inputs, out_dir, globals);
    throw ConfigError("unknown stage module '" + module + "'");
}

}  // namespace cptk::pipeline
