#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "cptk/digest.hpp"
#include "cptk/error.hpp"
#include "cptk/mixer/mixture.hpp"
#include "cptk/mixer/permutation.hpp"
#include "cptk/packer/tokenizer.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cptk;
using mixer::CorpusIndex;
using mixer::FeistelPermutation;
using mixer::MixtureSource;
using mixer::MixtureSpec;

TEST_CASE("permutation is a bijection on every tested domain") {
    for (uint64_t domain : {1ULL, 2ULL, 3ULL, 10ULL, 100ULL, 1000ULL, 4096ULL, 10001ULL}) {
        for (uint64_t seed : {0ULL, 1ULL, 42ULL}) {
            FeistelPermutation perm(domain, seed);
            std::vector<uint64_t> image;
            image.reserve(domain);
            for (uint64_t i = 0; i < domain; ++i) {
                const uint64_t v = perm.apply(i);
                REQUIRE(v < domain);
                image.push_back(v);
            }
            std::sort(image.begin(), image.end());
            for (uint64_t i = 0; i < domain; ++i) REQUIRE(image[i] == i);
        }
    }
}

TEST_CASE("permutation is deterministic and seed-sensitive") {
    FeistelPermutation a(1000, 7), b(1000, 7), c(1000, 8);
    bool any_differs = false;
    for (uint64_t i = 0; i < 1000; ++i) {
        CHECK(a.apply(i) == b.apply(i));
        if (a.apply(i) != c.apply(i)) any_differs = true;
    }
    CHECK(any_differs);
    // A real shuffle, not the identity.
    uint64_t moved = 0;
    for (uint64_t i = 0; i < 1000; ++i) {
        if (a.apply(i) != i) ++moved;
    }
    CHECK(moved > 900);
}

TEST_CASE("permutation rejects bad arguments") {
    CHECK_THROWS_AS(FeistelPermutation(0, 1), ConfigError);
    FeistelPermutation perm(10, 1);
    CHECK_THROWS_AS(perm.apply(10), ConfigError);
}

namespace {

// A corpus whose documents have known token counts (byte tokenizer:
// text bytes + 1 for the end-of-text id).
std::string build_corpus(const std::string& path, int docs, int text_len) {
    std::string content;
    for (int i = 0; i < docs; ++i) {
        content += testsup::doc_line("doc" + std::to_string(i),
                                     std::string(text_len, 'a' + (i % 26)));
    }
    testsup::write_file(path, content);
    return content;
}

}  // namespace

TEST_CASE("index_corpus records byte-accurate line geometry") {
    testsup::TempDir dir("index");
    const std::string path = dir.file("corpus.jsonl");
    const std::string l1 = testsup::doc_line("a", "tere");
    const std::string l2 = testsup::doc_line("b", "õhtust");  // multi-byte text
    const std::string l3 = testsup::doc_line("c", "");
    testsup::write_file(path, l1 + "\n" + l2 + "\r\n" + l3);  // blank + CR lines between

    auto tok = packer::make_tokenizer("byte");
    auto index = mixer::index_corpus(path, *tok);
    REQUIRE(index.docs.size() == 3);
    CHECK(index.path == path);
    CHECK(index.tokenizer_id == "byte");

    const std::string raw = testsup::read_file(path);
    // Slicing the file at the recorded offsets must reproduce each line.
    CHECK(raw.substr(index.docs[0].byte_offset, index.docs[0].byte_length) ==
          l1.substr(0, l1.size() - 1));
    CHECK(raw.substr(index.docs[1].byte_offset, index.docs[1].byte_length) ==
          l2.substr(0, l2.size() - 1));
    CHECK(raw.substr(index.docs[2].byte_offset, index.docs[2].byte_length) ==
          l3.substr(0, l3.size() - 1));

    // Byte tokenizer: tokens = UTF-8 bytes + 1.
    CHECK(index.docs[0].token_count == 5);           // "tere" + EOT
    CHECK(index.docs[1].token_count == 8);           // "õhtust" is 7 bytes + EOT
    CHECK(index.docs[2].token_count == 1);           // empty text + EOT
    CHECK(index.total_tokens == 14);
    CHECK(index.file_sha256 == sha256_hex(raw));
}

TEST_CASE("index_corpus rejects duplicate ids") {
    testsup::TempDir dir("dupindex");
    const std::string path = dir.file("corpus.jsonl");
    testsup::write_file(path, testsup::doc_line("x", "a") + testsup::doc_line("x", "b"));
    auto tok = packer::make_tokenizer("byte");
    CHECK_THROWS_AS(mixer::index_corpus(path, *tok), DataError);
}

TEST_CASE("planning walks the permutation and includes the crossing document") {
    testsup::TempDir dir("plan");
    const std::string path = dir.file("c.jsonl");
    build_corpus(path, 50, 9);  // every doc costs exactly 10 tokens

    auto tok = packer::make_tokenizer("byte");
    std::map<std::string, CorpusIndex> indexes;
    indexes[path] = mixer::index_corpus(path, *tok);

    MixtureSpec spec;
    spec.sources.push_back({"src", path, 95, 4, std::nullopt});
    auto slices = mixer::plan_samples(spec, indexes);
    REQUIRE(slices.size() == 1);
    const auto& s = slices[0];
    // 9 docs give 90 < 95, so the tenth crosses the budget and is included.
    CHECK(s.start == 0);
    CHECK(s.end == 10);
    CHECK(s.token_count == 100);
    CHECK(s.token_budget == 95);
    CHECK(!s.shortfall);
    CHECK(s.corpus_docs == 50);
    CHECK(s.permutation_seed == 4);

    // Exact-fit budget stops at the boundary without an extra document.
    spec.sources[0].token_budget = 90;
    CHECK(mixer::plan_samples(spec, indexes)[0].end == 9);

    // A budget beyond the corpus is a flagged shortfall, not an error.
    spec.sources[0].token_budget = 10000;
    auto short_slice = mixer::plan_samples(spec, indexes)[0];
    CHECK(short_slice.shortfall);
    CHECK(short_slice.end == 50);
    CHECK(short_slice.token_count == 500);
}

TEST_CASE("disjoint sources continue where the referenced slice stopped") {
    testsup::TempDir dir("disjoint");
    const std::string path = dir.file("c.jsonl");
    build_corpus(path, 40, 9);  // 10 tokens per doc

    auto tok = packer::make_tokenizer("byte");
    std::map<std::string, CorpusIndex> indexes;
    indexes[path] = mixer::index_corpus(path, *tok);
    

    MixtureSpec spec;
    spec.sources.push_back({"train", path, 100, 9, std::nullopt});
    spec.sources.push_back({"heldout", path, 50, 9, std::string("train")});
    auto slices = mixer::plan_samples(spec, indexes);
    REQUIRE(slices.size() == 2);
    CHECK(slices[0].start == 0);
    CHECK(slices[0].end == 10);
    CHECK(slices[1].start == 10);  // continues, never overlaps
    CHECK(slices[1].end == 15);

    // The two slices contain disjoint documents drawn from one permutation.
    FeistelPermutation perm(40, 9);
    std::vector<uint64_t> first, second;
    for (uint64_t i = slices[0].start; i < slices[0].end; ++i) first.push_back(perm.apply(i));
    for (uint64_t i = slices[1].start; i < slices[1].end; ++i) second.push_back(perm.apply(i));
    for (uint64_t doc : second) {
        CHECK(std::find(first.begin(), first.end(), doc) == first.end());
    }
}

TEST_CASE("mixture spec validation catches inconsistent references") {
    testsup::TempDir dir("spec");
    const std::string path = dir.file("c.jsonl");

    MixtureSpec spec;
    spec.sources.push_back({"a", path, 10, 1, std::nullopt});
    spec.sources.push_back({"b", path, 10, 1, std::string("a")});
    CHECK_NOTHROW(spec.validate());

    // duplicate name
    MixtureSpec dup = spec;
    dup.sources[1].name = "a";
    CHECK_THROWS_AS(dup.validate(), ConfigError);

    // unknown reference
    MixtureSpec unknown = spec;
    unknown.sources[1].disjoint_from = "zzz";
    CHECK_THROWS_AS(unknown.validate(), ConfigError);

    // reference to a later source
    MixtureSpec later = spec;
    later.sources[0].disjoint_from = "b";
    later.sources[1].disjoint_from = std::nullopt;
    CHECK_THROWS_AS(later.validate(), ConfigError);

    // disjointness across different seeds cannot be guaranteed
    MixtureSpec seeds = spec;
    seeds.sources[1].seed = 2;
    CHECK_THROWS_AS(seeds.validate(), ConfigError);

    // ... or across different files
    MixtureSpec paths = spec;
    paths.sources[1].path = dir.file("other.jsonl");
    CHECK_THROWS_AS(paths.validate(), ConfigError);

    // self-reference
    MixtureSpec self = spec;
    self.sources[0].disjoint_from = "a";
    CHECK_THROWS_AS(self.validate(), ConfigError);
}

TEST_CASE("draw_slice copies document lines verbatim in permuted order") {
    testsup::TempDir dir("draw");
    const std::string path = dir.file("c.jsonl");
    std::vector<std::string> lines;
    std::string content;
    for (int i = 0; i < 12; ++i) {
        // Distinct lengths so any off-by-one in offsets would corrupt JSON.
        std::string line = testsup::doc_line("doc" + std::to_string(i),
                                             "tekst " + std::string(i, 'x'));
        lines.push_back(line.substr(0, line.size() - 1));
        content += line;
    }
    testsup::write_file(path, content);

    auto tok = packer::make_tokenizer("byte");
    std::map<std::string, CorpusIndex> indexes;
    indexes[path] = mixer::index_corpus(path, *tok);

    MixtureSpec spec;
    spec.sources.push_back({"s", path, 60, 31, std::nullopt});
    auto slice = mixer::plan_samples(spec, indexes)[0];

    const std::string out = dir.file("out.jsonl");
    mixer::draw_slice(indexes[path], slice, out);

    // Expected: raw input lines, ordered by the permutation.
    FeistelPermutation perm(12, 31);
    std::string expected;
    for (uint64_t i = slice.start; i < slice.end; ++i) {
        expected += lines[perm.apply(i)] + "\n";
    }
    CHECK(testsup::read_file(out) == expected);
}

TEST_CASE("draw_slice refuses a corpus that changed since indexing") {
    testsup::TempDir dir("stale");
    const std::string path = dir.file("c.jsonl");
    build_corpus(path, 5, 4);

    auto tok = packer::make_tokenizer("byte");
    std::map<std::string, CorpusIndex> indexes;
    indexes[path] = mixer::index_corpus(path, *tok);
    MixtureSpec spec;
    spec.sources.push_back({"s", path, 10, 0, std::nullopt});
    auto slice = mixer::plan_samples(spec, indexes)[0];

    testsup::write_file(path, build_corpus(path, 5, 5));  // corpus changes
    CHECK_THROWS_AS(mixer::draw_slice(indexes[path], slice, dir.file("out.jsonl")), DataError);
}
