#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cptk/arena/votes.hpp"

namespace cptk::arena {

// Ratings live on the Elo-like scale R = 400 * log10(pi): a 400-point gap
// means 10:1 expected odds. Each connected component of the comparison
// graph is shifted so its mean rating is `anchor`.
struct BradleyTerryOptions {
    double anchor = 1000.0;
    double tolerance = 1e-10;  // max |delta log pi| declaring convergence
    uint64_t max_iterations = 20000;
};

struct BradleyTerryFit {
    std::map<std::string, double> ratings;
    // Models whose raw record was all-wins or all-losses within their
    // component; their maximum-likelihood rating is infinite, so a single
    // virtual tie (spread across the component) pulls them back to a
    // finite, flagged value.
    std::set<std::string> regularized;
    std::vector<std::vector<std::string>> components;  // each sorted
};

// Maximum-likelihood Bradley-Terry fit via the standard minorize-maximize
// iteration. Ties count as half a win for each side. Deterministic: no
// randomness, fixed iteration order.
BradleyTerryFit fit_bradley_terry(const VoteSet& votes, const BradleyTerryOptions& opts = {});

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
};

// Percentile bootstrap over vote resamples: `resamples` refits on N votes
// drawn with replacement, per-model 2.5th/97.5th percentiles with linear
// interpolation. Resample r uses its own generator seeded from
// (seed, r), so results do not depend on evaluation order. Models absent
// from a resample simply contribute no draw to their percentile pool.
std::map<std::string, ConfidenceInterval> bootstrap_intervals(
    const VoteSet& votes, uint64_t resamples, uint64_t seed,
    const BradleyTerryOptions& opts = {});

struct LeaderboardRow {
    uint64_t rank = 0;
    std::string model;
    double score = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    uint64_t votes = 0;
    bool regularized = false;
};

// rank(m) = 1 + number of models whose interval lies entirely above m's
// (ci_low > m.ci_high). Rows are ordered by (rank asc, score desc, name),
// so ranks never decrease down the table even when a wide interval puts a
// higher-scoring model below a lower-scoring one.
std::vector<LeaderboardRow> assign_ranks(
    const std::map<std::string, double>& scores,
    const std::map<std::string, ConfidenceInterval>& intervals,
    const std::map<std::string, uint64_t>& vote_counts,
    const std::set<std::string>& regularized);

struct EloOptions {
    double k = 32.0;
    double initial = 1000.0;
};

// Classic sequential Elo over votes in timestamp order (ties broken by
// input order). Every record must carry a timestamp; otherwise the
// processing order would be undefined and results irreproducible.
std::map<std::string, double> online_elo(const VoteSet& votes, const EloOptions& opts = {});

}  // namespace cptk::arena
