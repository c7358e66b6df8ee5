#include "cptk/mixer/mixture.hpp"

#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "cptk/digest.hpp"
#include "cptk/document.hpp"
#include "cptk/error.hpp"

namespace cptk::mixer {

CorpusIndex index_corpus(const std::string& path, const packer::TokenizerAdapter& tok) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus: " + path);

    CorpusIndex index;
    index.path = path;
    index.file_sha256 = sha256_file_hex(path);
    index.tokenizer_id = tok.id();

    std::unordered_set<std::string> seen;
    std::string line;
    uint64_t offset = 0;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // getline consumed the '\n' unless this was an unterminated final line.
        const uint64_t consumed = line.size() + (in.eof() ? 0 : 1);
        if (!line.empty() && line != "\r") {
            Document doc = parse_document(line, path + ":" + std::to_string(line_no));
            if (!seen.insert(doc.id).second) {
                throw DataError(path + ": duplicate document id '" + doc.id + "'");
            }
            IndexedDoc entry;
            entry.id = doc.id;
            entry.byte_offset = offset;
            entry.byte_length = line.size();
            entry.token_count = tok.count_tokens(doc.text);
            index.total_tokens += entry.token_count;
            index.docs.push_back(std::move(entry));
        }
        offset += consumed;
    }
    return index;
}

void MixtureSpec::validate() const {
    if (sources.empty()) throw ConfigError("mixture needs at least one source");
    std::unordered_map<std::string, size_t> by_name;
    for (size_t i = 0; i < sources.size(); ++i) {
        const auto& src = sources[i];
        if (src.name.empty()) throw ConfigError("mixture source " + std::to_string(i) + " has no name");
        if (src.path.empty()) {
            throw ConfigError("mixture source '" + src.name + "' has no corpus path");
        }
        if (!by_name.emplace(src.name, i).second) {
            throw ConfigError("duplicate mixture source name '" + src.name + "'");
        }
    }
    for (size_t i = 0; i < sources.size(); ++i) {
        const auto& src = sources[i];
        if (!src.disjoint_from) continue;
        auto it = by_name.find(*src.disjoint_from);
        if (it == by_name.end()) {
            throw ConfigError("source '" + src.name + "' is disjoint_from unknown source '" +
                              *src.disjoint_from + "'");
        }
        if (it->second >= i) {
            throw ConfigError("source '" + src.name + "' must come after '" +
                              *src.disjoint_from + "' to be disjoint from it");
        }
        const auto& ref = sources[it->second];
        if (ref.path != src.path || ref.seed != src.seed) {
            throw ConfigError("disjoint sources '" + src.name + "' and '" + ref.name +
                              "' must draw from the same corpus with the same seed");
        }
    }
}

std::vector<SampleSlice> plan_samples(const MixtureSpec& spec,
                                      const std::map<std::string, CorpusIndex>& indexes) {
    spec.validate();
    std::vector<SampleSlice> slices;
    std::unordered_map<std::string, size_t> planned;

    for (const auto& src : spec.sources) {
        auto idx_it = indexes.find(src.path);
        if (idx_it == indexes.end()) {
            throw ConfigError("no corpus index for path '" + src.path + "'");
        }
        const CorpusIndex& index = idx_it->second;
        if (index.tokenizer_id != spec.tokenizer) {
            throw ConfigError("corpus '" + src.path + "' was indexed with tokenizer '" +
                              index.tokenizer_id + "', mixture expects '" + spec.tokenizer + "'");
        }

        SampleSlice slice;
        slice.source_name = src.name;
        slice.corpus_path = src.path;
        slice.corpus_sha256 = index.file_sha256;
        slice.corpus_docs = index.docs.size();
        slice.permutation_seed = src.seed;
        slice.token_budget = src.token_budget;

        uint64_t start = 0;
        if (src.disjoint_from) {
            start = slices[planned.at(*src.disjoint_from)].end;
        }
        const uint64_t n = index.docs.size();
        slice.start = start;
        uint64_t pos = start;
        uint64_t tokens = 0;
        if (n > 0 && pos < n && src.token_budget > 0) {
            // The first document to reach or cross the budget is included,
            // so realized token counts land at or just above the budget.
            FeistelPermutation perm(n, src.seed);
            while (pos < n && tokens < src.token_budget) {
                tokens += index.docs[perm.apply(pos)].token_count;
                ++pos;
            }
        }
        slice.end = pos;
        slice.token_count = tokens;
        slice.shortfall = tokens < src.token_budget;

        planned.emplace(src.name, slices.size());
        slices.push_back(std::move(slice));
    }
    return slices;
}

void draw_slice(const CorpusIndex& index, const SampleSlice& slice,
                const std::string& out_path) {
    if (slice.corpus_docs != index.docs.size() || slice.corpus_path != index.path) {
        throw DataError("slice '" + slice.source_name + "' was planned against a different corpus");
    }
    const std::string digest = sha256_file_hex(index.path);
    if (digest != index.file_sha256 || digest != slice.corpus_sha256) {
        throw DataError("corpus '" + index.path + "' changed since it was indexed; refusing to draw");
    }
    if (slice.end > index.docs.size() || slice.start > slice.end) {
        throw DataError("slice '" + slice.source_name + "' is out of range for corpus '" +
                        index.path + "'");
    }

    std::ifstream in(index.path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus: " + index.path);
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write sample: " + out_path);

    uint64_t tokens = 0;
    if (slice.start < slice.end) {
        FeistelPermutation perm(index.docs.size(), slice.permutation_seed);
        std::string buf;
        for (uint64_t i = slice.start; i < slice.end; ++i) {
            const IndexedDoc& doc = index.docs[perm.apply(i)];
            buf.resize(doc.byte_length);
            in.seekg(static_cast<std::streamoff>(doc.byte_offset));
            in.read(buf.data(), static_cast<std::streamsize>(doc.byte_length));
            if (!in) {
                throw DataError("corpus '" + index.path + "' truncated while drawing '" +
                                doc.id + "'");
            }
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            out.put('\n');
            tokens += doc.token_count;
        }
    }
    out.flush();
    if (!out) throw DataError("failed writing sample: " + out_path);
    if (tokens != slice.token_count) {
        throw DataError("slice '" + slice.source_name + "' drew " + std::to_string(tokens) +
                        " tokens, plan says " + std::to_string(slice.token_count));
    }
}

}  // namespace cptk::mixer
