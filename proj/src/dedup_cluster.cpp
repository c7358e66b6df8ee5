#include "cptk/dedup/cluster.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "cptk/error.hpp"

namespace cptk::dedup {

namespace {

class UnionFind {
public:
    explicit UnionFind(size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), size_t{0});
    }

    size_t find(size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<size_t> parent_;
};

}  // namespace

DocBands compute_doc_bands(std::string_view doc_id, std::string_view text,
                           const DedupOptions& options) {
    DocBands out;
    out.id = std::string(doc_id);
    ShingleSet set = shingle(doc_id, text, options.ngram);
    if (set.empty()) {
        out.unsignable = true;
        return out;
    }
    out.keys = band_keys(minhash_signature(set, options.scheme), options.scheme);
    if (options.verify_jaccard) out.shingles = std::move(set);
    return out;
}

DedupReport cluster_from_bands(const std::vector<DocBands>& docs, const DedupOptions& options) {
    DedupReport report;
    report.doc_count = docs.size();

    {
        std::unordered_set<std::string> seen;
        seen.reserve(docs.size() * 2);
        for (const auto& doc : docs) {
            if (!seen.insert(doc.id).second) {
                throw DataError("duplicate document id '" + doc.id + "' in dedup input");
            }
        }
    }

    std::unordered_map<uint64_t, std::vector<size_t>> buckets;
    for (size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].unsignable) {
            report.unsignable_ids.push_back(docs[i].id);
            continue;
        }
        for (uint64_t key : docs[i].keys) buckets[key].push_back(i);
    }

    UnionFind uf(docs.size());
    for (const auto& [key, members] : buckets) {
        if (members.size() < 2) continue;
        if (!options.verify_jaccard) {
            for (size_t i = 1; i < members.size(); ++i) uf.unite(members[0], members[i]);
            continue;
        }
        // Confirm each colliding pair before linking; already-linked pairs
        // are skipped, which keeps pathological buckets affordable.
        for (size_t i = 0; i < members.size(); ++i) {
            for (size_t j = i + 1; j < members.size(); ++j) {
                if (uf.find(members[i]) == uf.find(members[j])) continue;
                double sim = jaccard_exact(docs[members[i]].shingles, docs[members[j]].shingles);
                if (sim >= *options.verify_jaccard) uf.unite(members[i], members[j]);
            }
        }
    }

    std::map<size_t, std::vector<std::string>> components;
    for (size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].unsignable) continue;
        components[uf.find(i)].push_back(docs[i].id);
    }
    for (auto& [root, ids] : components) {
        if (ids.size() < 2) continue;
        std::sort(ids.begin(), ids.end());
        report.clusters.push_back(DuplicateCluster{ids.front(), std::move(ids)});
    }
    std::sort(report.clusters.begin(), report.clusters.end(),
              [](const DuplicateCluster& a, const DuplicateCluster& b) {
                  return a.survivor < b.survivor;
              });
    return report;
}

std::unordered_set<std::string> removed_ids(const DedupReport& report) {
    std::unordered_set<std::string> removed;
    for (const auto& cluster : report.clusters) {
        for (const auto& id : cluster.members) {
            if (id != cluster.survivor) removed.insert(id);
        }
    }
    return removed;
}

}  // namespace cptk::dedup
