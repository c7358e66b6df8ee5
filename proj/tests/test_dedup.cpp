#include <algorithm>
#include <string>
#include <vector>

#include "cptk/dedup/cluster.hpp"
#include "cptk/dedup/minhash.hpp"
#include "cptk/digest.hpp"
#include "cptk/error.hpp"
#include "doctest.h"

using namespace cptk;
using dedup::DedupOptions;
using dedup::DocBands;
using dedup::MinHashScheme;
using dedup::ShingleSet;

namespace {

// A shingle set with synthetic 64-bit elements [first, first + count).
ShingleSet synthetic_set(const std::string& id, uint64_t first, uint64_t count) {
    ShingleSet s;
    s.doc_id = id;
    for (uint64_t i = 0; i < count; ++i) s.shingles.push_back(first + i);
    return s;
}

// Two sets over a 200-element universe with exactly `shared` common
// elements and (200 - shared) / 2 private ones each: Jaccard = shared/200.
std::pair<ShingleSet, ShingleSet> pair_with_jaccard(uint64_t tag, uint64_t shared) {
    const uint64_t unique = (200 - shared) / 2;
    ShingleSet a, b;
    a.doc_id = "a";
    b.doc_id = "b";
    // Values are mixed so they look hash-like rather than sequential.
    for (uint64_t i = 0; i < shared; ++i) {
        const uint64_t v = mix64(tag * 1000003 + i);
        a.shingles.push_back(v);
        b.shingles.push_back(v);
    }
    for (uint64_t i = 0; i < unique; ++i) {
        a.shingles.push_back(mix64(tag * 1000003 + 500 + i));
        b.shingles.push_back(mix64(tag * 1000003 + 900 + i));
    }
    std::sort(a.shingles.begin(), a.shingles.end());
    std::sort(b.shingles.begin(), b.shingles.end());
    return {a, b};
}

}  // namespace

TEST_CASE("shingle builds hashed word 5-grams over folded text") {
    auto set = dedup::shingle("doc", "Üks KAKS kolm neli viis kuus", 5);
    CHECK(set.doc_id == "doc");
    // Windows over the folded text: two 5-word grams.
    std::vector<uint64_t> expected = {sha1_u64("üks kaks kolm neli viis"),
                                      sha1_u64("kaks kolm neli viis kuus")};
    std::sort(expected.begin(), expected.end());
    CHECK(set.shingles == expected);

    // Case and whitespace do not matter.
    auto set2 = dedup::shingle("doc2", "  üks  kaks\tkolm \n neli VIIS kuus ", 5);
    CHECK(set2.shingles == set.shingles);
}

TEST_CASE("shingle edge cases") {
    CHECK(dedup::shingle("d", "üks kaks kolm neli", 5).empty());  // fewer words than n
    CHECK(dedup::shingle("d", "", 5).empty());
    CHECK(dedup::shingle("d", "a b c", 3).shingles.size() == 1);
    // Repeated windows collapse: the set is sorted and unique.
    auto rep = dedup::shingle("d", "a a a a a a a", 5);
    CHECK(rep.shingles.size() == 1);
    CHECK_THROWS_AS(dedup::shingle("d", "a b c", 0), ConfigError);
}

TEST_CASE("jaccard_exact on hand-built sets") {
    auto a = synthetic_set("a", 0, 3);   // {0,1,2}
    auto b = synthetic_set("b", 1, 3);   // {1,2,3}
    CHECK(dedup::jaccard_exact(a, b) == doctest::Approx(0.5));
    CHECK(dedup::jaccard_exact(a, a) == doctest::Approx(1.0));
    auto c = synthetic_set("c", 100, 3);
    CHECK(dedup::jaccard_exact(a, c) == 0.0);
    ShingleSet empty1, empty2;
    CHECK(dedup::jaccard_exact(empty1, empty2) == 0.0);  // by convention
    CHECK(dedup::jaccard_exact(a, empty1) == 0.0);

    auto [p, q] = pair_with_jaccard(7, 180);
    CHECK(dedup::jaccard_exact(p, q) == doctest::Approx(0.9));
}

TEST_CASE("minhash signatures are deterministic and sized by the scheme") {
    MinHashScheme scheme;
    scheme.seed = 99;
    CHECK(scheme.num_hashes() == 448);
    auto set = synthetic_set("x", 1000, 50);
    auto sig1 = dedup::minhash_signature(set, scheme);
    auto sig2 = dedup::minhash_signature(set, scheme);
    CHECK(sig1.values.size() == 448);
    CHECK(sig1.values == sig2.values);

    MinHashScheme other = scheme;
    other.seed = 100;
    CHECK(dedup::minhash_signature(set, other).values != sig1.values);

    ShingleSet empty;
    empty.doc_id = "e";
    CHECK_THROWS_AS(dedup::minhash_signature(empty, scheme), DataError);
}

TEST_CASE("signature agreement estimates Jaccard similarity") {
    MinHashScheme scheme;
    scheme.seed = 2024;
    // Mean agreement over 50 pairs at J=0.9: per-hash agreement probability
    // equals the Jaccard index, so the mean settles near 0.9.
    double total = 0.0;
    for (uint64_t tag = 0; tag < 50; ++tag) {
        auto [a, b] = pair_with_jaccard(tag, 180);
        auto sa = dedup::minhash_signature(a, scheme);
        auto sb = dedup::minhash_signature(b, scheme);
        uint32_t agree = 0;
        for (size_t k = 0; k < sa.values.size(); ++k) {
            if (sa.values[k] == sb.values[k]) ++agree;
        }
        total += static_cast<double>(agree) / static_cast<double>(sa.values.size());
    }
    CHECK(total / 50.0 == doctest::Approx(0.9).epsilon(0.02));
}

TEST_CASE("band keys collide exactly for equal row blocks") {
    MinHashScheme scheme;
    scheme.seed = 3;
    auto set = synthetic_set("x", 5000, 80);
    auto sig = dedup::minhash_signature(set, scheme);
    auto keys = dedup::band_keys(sig, scheme);
    REQUIRE(keys.size() == 14);
    // Identical signatures -> identical keys (exact duplicates always collide).
    auto keys2 = dedup::band_keys(dedup::minhash_signature(set, scheme), scheme);
    CHECK(keys == keys2);
    // A different document should not share band keys by chance.
    auto other = dedup::band_keys(
        dedup::minhash_signature(synthetic_set("y", 900000, 80), scheme), scheme);
    for (auto k : other) {
        CHECK(std::find(keys.begin(), keys.end(), k) == keys.end());
    }
}

TEST_CASE("analytic LSH candidate probability matches independent values") {
    MinHashScheme scheme;  // 14 x 32
    // Constants computed independently from 1 - (1 - s^32)^14.
    CHECK(dedup::lsh_candidate_probability(0.80, scheme) ==
          doctest::Approx(0.011035001758073482).epsilon(1e-9));
    CHECK(dedup::lsh_candidate_probability(0.90, scheme) ==
          doctest::Approx(0.386860494828306).epsilon(1e-9));
    CHECK(dedup::lsh_candidate_probability(0.95, scheme) ==
          doctest::Approx(0.9509242850881048).epsilon(1e-9));
    CHECK(dedup::lsh_candidate_probability(0.0, scheme) == 0.0);
    CHECK(dedup::lsh_candidate_probability(1.0, scheme) == doctest::Approx(1.0));
}

TEST_CASE("clustering links documents through shared band keys") {
    DocBands a{"a", false, {1, 2, 3}, {}};
    DocBands b{"b", false, {3, 40, 50}, {}};   // shares key 3 with a
    DocBands c{"c", false, {50, 60, 70}, {}};  // shares key 50 with b
    DocBands d{"d", false, {100, 200, 300}, {}};
    DedupOptions options;

    auto report = dedup::cluster_from_bands({a, b, c, d}, options);
    REQUIRE(report.clusters.size() == 1);
    CHECK(report.clusters[0].survivor == "a");
    CHECK(report.clusters[0].members == std::vector<std::string>{"a", "b", "c"});
    CHECK(report.doc_count == 4);

    auto removed = dedup::removed_ids(report);
    CHECK(removed.size() == 2);
    CHECK(removed.count("b"));
    CHECK(removed.count("c"));
    CHECK(!removed.count("a"));
    CHECK(!removed.count("d"));
}

TEST_CASE("clustering is insensitive to input order") {
    DocBands a{"a", false, {1, 2}, {}};
    DocBands b{"b", false, {2, 3}, {}};
    DocBands c{"c", false, {9, 10}, {}};
    DedupOptions options;
    auto r1 = dedup::cluster_from_bands({a, b, c}, options);
    auto r2 = dedup::cluster_from_bands({c, b, a}, options);
    REQUIRE(r1.clusters.size() == 1);
    REQUIRE(r2.clusters.size() == 1);
    CHECK(r1.clusters[0].members == r2.clusters[0].members);
    CHECK(r1.clusters[0].survivor == r2.clusters[0].survivor);
}

TEST_CASE("verification rejects band collisions between dissimilar documents") {
    // Same band key, completely different shingles: a pure LSH false
    // positive that exact-Jaccard confirmation must reject.
    DocBands a{"a", false, {77}, synthetic_set("a", 0, 100)};
    DocBands b{"b", false, {77}, synthetic_set("b", 1000, 100)};

    DedupOptions plain;
    CHECK(dedup::cluster_from_bands({a, b}, plain).clusters.size() == 1);

    DedupOptions verified;
    verified.verify_jaccard = 0.8;
    CHECK(dedup::cluster_from_bands({a, b}, verified).clusters.empty());

    // Near-identical shingle sets pass the confirmation.
    DocBands c{"c", false, {88}, synthetic_set("c", 0, 100)};
    DocBands d{"d", false, {88}, synthetic_set("d", 0, 99)};  // J = 99/100
    CHECK(dedup::cluster_from_bands({c, d}, verified).clusters.size() == 1);
}

TEST_CASE("unsignable documents are reported and never clustered") {
    DocBands a{"tiny2", true, {}, {}};
    DocBands b{"b", false, {5}, {}};
    DocBands c{"tiny1", true, {}, {}};
    auto report = dedup::cluster_from_bands({a, b, c}, DedupOptions{});
    CHECK(report.clusters.empty());
    CHECK(report.unsignable_ids == std::vector<std::string>{"tiny2", "tiny1"});  // input order
}

TEST_CASE("duplicate document ids are a data error") {
    DocBands a{"same", false, {1}, {}};
    DocBands b{"same", false, {2}, {}};
    CHECK_THROWS_AS(dedup::cluster_from_bands({a, b}, DedupOptions{}), DataError);
}

TEST_CASE("compute_doc_bands ties the pieces together") {
    DedupOptions options;
    options.scheme.seed = 11;
    auto bands = dedup::compute_doc_bands(
        "doc", "üks kaks kolm neli viis kuus seitse kaheksa", options);
    CHECK(!bands.unsignable);
    CHECK(bands.keys.size() == 14);
    CHECK(bands.shingles.shingles.empty());  // not retained without verification

    options.verify_jaccard = 0.9;
    auto verified = dedup::compute_doc_bands(
        "doc", "üks kaks kolm neli viis kuus seitse kaheksa", options);
    CHECK(verified.shingles.shingles.size() == 4);  // 8 words -> 4 five-grams

    auto tiny = dedup::compute_doc_bands("tiny", "üks kaks", options);
    CHECK(tiny.unsignable);
    CHECK(tiny.keys.empty());
}

TEST_CASE("exact duplicates always end up in one cluster") {
    const std::string text =
        "korduv dokument millel on täpselt sama sisu igas koopias ja piisavalt sõnu";
    DedupOptions options;
    options.scheme.seed = 123;
    std::vector<DocBands> docs;
    for (int i = 0; i < 6; ++i) {
        docs.push_back(dedup::compute_doc_bands("copy" + std::to_string(i), text, options));
    }
    docs.push_back(dedup::compute_doc_bands(
        "other", "hoopis teistsugune tekst mis ei sarnane eelmisega üldse mitte kuidagi",
        options));
    auto report = dedup::cluster_from_bands(docs, options);
    REQUIRE(report.clusters.size() == 1);
    CHECK(report.clusters[0].members.size() == 6);
    CHECK(report.clusters[0].survivor == "copy0");
}
