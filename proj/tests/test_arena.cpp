#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cptk/arena/rating.hpp"
#include "cptk/arena/votes.hpp"
#include "cptk/error.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cptk;
using arena::VoteRecord;
using arena::VoteSet;
using arena::VoteWinner;

namespace {

std::string vote_line(const std::string& prompt, const std::string& a, const std::string& b,
                      const std::string& winner, const std::string& ts = "") {
    std::ostringstream os;
    os << R"({"prompt_id":")" << prompt << R"(","model_a":")" << a << R"(","model_b":")" << b
       << R"(","winner":")" << winner << '"';
    if (!ts.empty()) os << R"(,"ts":")" << ts << '"';
    os << "}\n";
    return os.str();
}

VoteRecord rec(const std::string& a, const std::string& b, VoteWinner w,
               int64_t ts = -1) {
    VoteRecord r;
    r.prompt_id = "p";
    r.model_a = a;
    r.model_b = b;
    r.winner = w;
    if (ts >= 0) r.ts_nanos = ts;
    return r;
}

VoteSet set_of(std::vector<VoteRecord> records) {
    VoteSet s;
    s.records = std::move(records);
    for (const auto& r : s.records) {
        s.models.push_back(r.model_a);
        s.models.push_back(r.model_b);
    }
    std::sort(s.models.begin(), s.models.end());
    s.models.erase(std::unique(s.models.begin(), s.models.end()), s.models.end());
    s.total_lines = s.records.size();
    return s;
}

}  // namespace

TEST_CASE("vote files parse good lines and catalogue the bad ones") {
    testsup::TempDir dir("votes");
    std::string content;
    content += vote_line("p1", "alpha", "beta", "model_a", "2026-01-05T10:00:00Z");
    content += "\n";  // blank lines are fine, not rejected
    content += vote_line("p2", "beta", "gamma", "tie");
    content += "{not json}\n";
    content += R"({"prompt_id":"p3","model_a":"x","model_b":"x","winner":"tie"})" "\n";
    content += R"({"prompt_id":"p4","model_a":"x","model_b":"y","winner":"draw"})" "\n";
    content += R"({"prompt_id":"p5","model_a":"x","model_b":"y"})" "\n";
    content += R"({"prompt_id":"p6","model_a":"","model_b":"y","winner":"tie"})" "\n";
    content += vote_line("p7", "x", "y", "model_b", "not-a-time");
    const std::string path = dir.file("votes.jsonl");
    testsup::write_file(path, content);

    auto votes = arena::read_votes(path);
    REQUIRE(votes.records.size() == 2);
    CHECK(votes.records[0].model_a == "alpha");
    CHECK(votes.records[0].winner == VoteWinner::kModelA);
    CHECK(votes.records[0].ts_nanos.has_value());
    CHECK(votes.records[0].ts_text == "2026-01-05T10:00:00Z");
    CHECK(votes.records[1].winner == VoteWinner::kTie);
    CHECK(!votes.records[1].ts_nanos.has_value());

    CHECK(votes.models == std::vector<std::string>{"alpha", "beta", "gamma"});
    REQUIRE(votes.rejected.size() == 6);
    // Line numbers point at the original file, reasons say what was wrong.
    CHECK(votes.rejected[0].line_number == 4);
    for (const auto& r : votes.rejected) CHECK(!r.reason.empty());

    CHECK(arena::votes_for_model(votes, "beta") == 2);
    CHECK(arena::votes_for_model(votes, "alpha") == 1);
    CHECK(arena::votes_for_model(votes, "nobody") == 0);

    CHECK_THROWS_AS(arena::read_votes(dir.file("absent.jsonl")), DataError);
}

TEST_CASE("timestamps parse as strict RFC 3339") {
    using arena::parse_rfc3339_nanos;
    CHECK(parse_rfc3339_nanos("1970-01-01T00:00:00Z") == int64_t{0});
    CHECK(parse_rfc3339_nanos("1970-01-01T00:00:01Z") == int64_t{1000000000});
    CHECK(parse_rfc3339_nanos("1970-01-01T00:00:00.5Z") == int64_t{500000000});
    CHECK(parse_rfc3339_nanos("1970-01-01T00:00:00.000000001Z") == int64_t{1});
    // Offsets shift back to UTC.
    CHECK(parse_rfc3339_nanos("1970-01-01T02:00:00+02:00") == int64_t{0});
    CHECK(parse_rfc3339_nanos("1969-12-31T19:00:00-05:00") == int64_t{0});
    CHECK(parse_rfc3339_nanos("1970-01-01T00:00:00+00:00") == int64_t{0});
    // A known round-trip: 2026-01-05T10:00:00Z.
    CHECK(parse_rfc3339_nanos("2026-01-05T10:00:00Z") == int64_t{1767607200} * 1000000000);
    // Leap days and leap seconds are accepted.
    CHECK(parse_rfc3339_nanos("2024-02-29T00:00:00Z").has_value());
    CHECK(parse_rfc3339_nanos("2016-12-31T23:59:60Z").has_value());

    CHECK(!parse_rfc3339_nanos("2023-02-29T00:00:00Z").has_value());  // not a leap year
    CHECK(!parse_rfc3339_nanos("2026-13-01T00:00:00Z").has_value());
    CHECK(!parse_rfc3339_nanos("2026-00-01T00:00:00Z").has_value());
    CHECK(!parse_rfc3339_nanos("2026-01-32T00:00:00Z").has_value());
    CHECK(!parse_rfc3339_nanos("2026-01-05T24:00:00Z").has_value());
    CHECK(!parse_rfc3339_nanos("2026-01-05T10:00:00").has_value());   // missing zone
    CHECK(!parse_rfc3339_nanos("2026-01-05 10:00:00Z").has_value());  // space separator
    CHECK(!parse_rfc3339_nanos("2026-01-05T10:00:00.Z").has_value()); // empty fraction
    CHECK(!parse_rfc3339_nanos("2026-01-05T10:00:00+0200").has_value());
    CHECK(!parse_rfc3339_nanos("garbage").has_value());
    CHECK(!parse_rfc3339_nanos("").has_value());
}

TEST_CASE("two-model fit matches the closed-form odds") {
    // alpha beats beta 3 times out of 4: odds 3:1, so the rating gap must be
    // 400 * log10(3) and the pair is centered on the anchor.
    auto votes = set_of({rec("alpha", "beta", VoteWinner::kModelA),
                         rec("alpha", "beta", VoteWinner::kModelA),
                         rec("alpha", "beta", VoteWinner::kModelA),
                         rec("alpha", "beta", VoteWinner::kModelB)});
    auto fit = arena::fit_bradley_terry(votes);
    const double gap = 400.0 * std::log10(3.0);
    CHECK(fit.ratings.at("alpha") == doctest::Approx(1000.0 + gap / 2).epsilon(1e-7));
    CHECK(fit.ratings.at("beta") == doctest::Approx(1000.0 - gap / 2).epsilon(1e-7));
    CHECK(fit.regularized.empty());
    REQUIRE(fit.components.size() == 1);
    CHECK(fit.components[0] == std::vector<std::string>{"alpha", "beta"});

    // A tie is half a win for each side: one win plus one tie equals
    // effective 1.5 : 0.5, the same 3:1 odds as above.
    auto tied = set_of({rec("alpha", "beta", VoteWinner::kModelA),
                        rec("alpha", "beta", VoteWinner::kTie)});
    auto tfit = arena::fit_bradley_terry(tied);
    CHECK(tfit.ratings.at("alpha") == doctest::Approx(1000.0 + gap / 2).epsilon(1e-7));
    CHECK(tfit.ratings.at("beta") == doctest::Approx(1000.0 - gap / 2).epsilon(1e-7));

    // Side labels must not matter: same data with columns swapped.
    auto swapped = set_of({rec("beta", "alpha", VoteWinner::kModelB),
                           rec("beta", "alpha", VoteWinner::kModelB),
                           rec("beta", "alpha", VoteWinner::kModelB),
                           rec("beta", "alpha", VoteWinner::kModelA)});
    auto sfit = arena::fit_bradley_terry(swapped);
    CHECK(sfit.ratings.at("alpha") == doctest::Approx(fit.ratings.at("alpha")).epsilon(1e-9));
}

TEST_CASE("undefeated models are regularized to a finite rating") {
    auto votes = set_of({rec("champ", "chump", VoteWinner::kModelA),
                         rec("champ", "chump", VoteWinner::kModelA),
                         rec("champ", "chump", VoteWinner::kModelA)});
    auto fit = arena::fit_bradley_terry(votes);
    CHECK(std::isfinite(fit.ratings.at("champ")));
    CHECK(std::isfinite(fit.ratings.at("chump")));
    CHECK(fit.ratings.at("champ") > fit.ratings.at("chump"));
    CHECK(fit.regularized.count("champ") == 1);
    CHECK(fit.regularized.count("chump") == 1);
}

TEST_CASE("disconnected comparison graphs anchor each component separately") {
    auto votes = set_of({rec("a1", "a2", VoteWinner::kModelA),
                         rec("a1", "a2", VoteWinner::kModelB),
                         rec("b1", "b2", VoteWinner::kModelA),
                         rec("b1", "b2", VoteWinner::kModelB)});
    auto fit = arena::fit_bradley_terry(votes);
    REQUIRE(fit.components.size() == 2);
    CHECK((fit.ratings.at("a1") + fit.ratings.at("a2")) / 2 ==
          doctest::Approx(1000.0).epsilon(1e-9));
    CHECK((fit.ratings.at("b1") + fit.ratings.at("b2")) / 2 ==
          doctest::Approx(1000.0).epsilon(1e-9));

    arena::BradleyTerryOptions opts;
    opts.anchor = 1500.0;
    auto shifted = arena::fit_bradley_terry(votes, opts);
    CHECK((shifted.ratings.at("a1") + shifted.ratings.at("a2")) / 2 ==
          doctest::Approx(1500.0).epsilon(1e-9));

    auto empty = arena::fit_bradley_terry(set_of({}));
    CHECK(empty.ratings.empty());
}

TEST_CASE("permuting the vote order does not move the fit") {
    std::mt19937_64 rng(5);
    std::vector<VoteRecord> records;
    const std::vector<std::string> models = {"m0", "m1", "m2", "m3"};
    for (int i = 0; i < 300; ++i) {
        const auto& a = models[rng() % 4];
        std::string b = a;
        while (b == a) b = models[rng() % 4];
        const uint64_t w = rng() % 3;
        records.push_back(
            rec(a, b, w == 0 ? VoteWinner::kModelA : w == 1 ? VoteWinner::kModelB : VoteWinner::kTie));
    }
    auto base = arena::fit_bradley_terry(set_of(records));
    for (int shuffle = 0; shuffle < 20; ++shuffle) {
        std::shuffle(records.begin(), records.end(), rng);
        auto fit = arena::fit_bradley_terry(set_of(records));
        for (const auto& m : models) {
            REQUIRE(fit.ratings.at(m) == doctest::Approx(base.ratings.at(m)).epsilon(1e-8));
        }
    }
}

TEST_CASE("bootstrap intervals are deterministic and bracket the estimate") {
    std::mt19937_64 rng(9);
    std::vector<VoteRecord> records;
    for (int i = 0; i < 400; ++i) {
        // strong > middle > weak with plenty of signal
        const uint64_t pick = rng() % 3;
        const std::string a = pick == 0 ? "strong" : pick == 1 ? "middle" : "weak";
        std::string b = a;
        while (b == a) b = (rng() % 3) == 0 ? "strong" : (rng() % 2) == 0 ? "middle" : "weak";
        const bool a_is_better = (a == "strong") || (a == "middle" && b == "weak");
        const bool upset = rng() % 10 == 0;
        records.push_back(rec(a, b, (a_is_better != upset) ? VoteWinner::kModelA
                                                           : VoteWinner::kModelB));
    }
    auto votes = set_of(records);
    auto fit = arena::fit_bradley_terry(votes);
    auto ci1 = arena::bootstrap_intervals(votes, 200, 31);
    auto ci2 = arena::bootstrap_intervals(votes, 200, 31);
    for (const auto& [model, interval] : ci1) {
        CHECK(interval.low == ci2.at(model).low);
        CHECK(interval.high == ci2.at(model).high);
        CHECK(interval.low <= interval.high);
        CHECK(interval.low <= fit.ratings.at(model));
        CHECK(interval.high >= fit.ratings.at(model));
    }
    // Another seed gives a different (but overlapping) picture.
    auto ci3 = arena::bootstrap_intervals(votes, 200, 32);
    bool any_difference = false;
    for (const auto& [model, interval] : ci3) {
        if (interval.low != ci1.at(model).low || interval.high != ci1.at(model).high) {
            any_difference = true;
        }
    }
    CHECK(any_difference);
}

TEST_CASE("ranks come from interval dominance, not raw scores") {
    // "steady" has a lower score than "flashy" but a far tighter interval;
    // "top" dominates flashy's interval but not steady's. Result: steady
    // outranks flashy despite the lower score.
    std::map<std::string, double> scores{{"top", 1300.0}, {"steady", 1000.0}, {"flashy", 1010.0}};
    std::map<std::string, arena::ConfidenceInterval> intervals{
        {"top", {1020.0, 1400.0}},
        {"steady", {950.0, 1400.0}},
        {"flashy", {900.0, 1010.0}},
    };
    std::map<std::string, uint64_t> counts{{"top", 50}, {"steady", 40}, {"flashy", 60}};
    auto rows = arena::assign_ranks(scores, intervals, counts, {"flashy"});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].model == "top");
    CHECK(rows[0].rank == 1);
    CHECK(rows[1].model == "steady");
    CHECK(rows[1].rank == 1);  // nothing lies entirely above [950, 1400]
    CHECK(rows[2].model == "flashy");
    CHECK(rows[2].rank == 2);  // top's whole interval sits above 1010
    CHECK(rows[2].regularized);
    CHECK(rows[2].votes == 60);
    CHECK(!rows[1].regularized);

    // Overlapping intervals share a rank; ties order by score then name.
    std::map<std::string, double> s2{{"a", 1000.0}, {"b", 1000.0}, {"c", 1100.0}};
    std::map<std::string, arena::ConfidenceInterval> i2{
        {"a", {990.0, 1010.0}}, {"b", {990.0, 1010.0}}, {"c", {1090.0, 1110.0}}};
    auto r2 = arena::assign_ranks(s2, i2, {}, {});
    CHECK(r2[0].model == "c");
    CHECK(r2[0].rank == 1);
    CHECK(r2[1].model == "a");  // same rank and score as b: name breaks the tie
    CHECK(r2[1].rank == 2);
    CHECK(r2[2].model == "b");
    CHECK(r2[2].rank == 2);
    CHECK(r2[1].votes == 0);  // absent from the count map
}

TEST_CASE("sequential rating updates match the textbook single step") {
    auto votes = set_of({rec("x", "y", VoteWinner::kModelA, 1000)});
    auto ratings = arena::online_elo(votes);
    CHECK(ratings.at("x") == 1016.0);  // 1000 + 32 * (1 - 0.5)
    CHECK(ratings.at("y") == 984.0);

    // A tie between equals moves nothing.
    auto tie = set_of({rec("x", "y", VoteWinner::kTie, 1000)});
    auto t = arena::online_elo(tie);
    CHECK(t.at("x") == 1000.0);
    CHECK(t.at("y") == 1000.0);

    // Custom K and initial rating feed straight through.
    arena::EloOptions opts;
    opts.k = 10.0;
    opts.initial = 1500.0;
    auto custom = arena::online_elo(votes, opts);
    CHECK(custom.at("x") == 1505.0);
    CHECK(custom.at("y") == 1495.0);
}

TEST_CASE("sequential rating follows timestamps, not input order") {
    auto a = rec("x", "y", VoteWinner::kModelA, 1000);
    auto b = rec("y", "z", VoteWinner::kModelB, 2000);
    auto c = rec("x", "z", VoteWinner::kModelA, 3000);
    auto in_order = arena::online_elo(set_of({a, b, c}));
    auto scrambled = arena::online_elo(set_of({c, a, b}));
    for (const auto& [model, rating] : in_order) {
        CHECK(scrambled.at(model) == rating);
    }
    // Processing order genuinely matters for this data, so the agreement
    // above proves sorting happened.
    auto reversed_ts = arena::online_elo(set_of(
        {rec("x", "y", VoteWinner::kModelA, 3000), rec("y", "z", VoteWinner::kModelB, 2000),
         rec("x", "z", VoteWinner::kModelA, 1000)}));
    bool differs = false;
    for (const auto& [model, rating] : in_order) {
        if (reversed_ts.at(model) != rating) differs = true;
    }
    CHECK(differs);

    auto missing = set_of({rec("x", "y", VoteWinner::kModelA)});
    CHECK_THROWS_AS(arena::online_elo(missing), DataError);
}

TEST_CASE("simulated strengths are recovered within a tolerance") {
    // Strengths 1100 / 1000 / 900 on the 400*log10 scale; vote outcomes are
    // drawn from the implied Bradley-Terry win probabilities.
    const std::map<std::string, double> truth{{"big", 1100.0}, {"mid", 1000.0}, {"small", 900.0}};
    const std::vector<std::string> names{"big", "mid", "small"};
    std::mt19937_64 rng(20260817);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<VoteRecord> records;
    for (int i = 0; i < 2000; ++i) {
        const auto& a = names[rng() % 3];
        std::string b = a;
        while (b == a) b = names[rng() % 3];
        const double pa = 1.0 / (1.0 + std::pow(10.0, (truth.at(b) - truth.at(a)) / 400.0));
        records.push_back(rec(a, b, unit(rng) < pa ? VoteWinner::kModelA : VoteWinner::kModelB));
    }
    auto fit = arena::fit_bradley_terry(set_of(records));
    for (const auto& [model, strength] : truth) {
        CHECK(std::abs(fit.ratings.at(model) - strength) < 30.0);
    }
}
