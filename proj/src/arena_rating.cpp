#include "cptk/arena/rating.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cptk/digest.hpp"
#include "cptk/error.hpp"

namespace cptk::arena {

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

double percentile_linear(const std::vector<double>& sorted, double q) {
    const size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = q * static_cast<double>(n - 1);
    const auto lo = static_cast<size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

BradleyTerryFit fit_bradley_terry(const VoteSet& votes, const BradleyTerryOptions& opts) {
    BradleyTerryFit fit;
    const std::vector<std::string>& names = votes.models;
    const size_t m = names.size();
    if (m == 0) return fit;

    std::map<std::string, size_t> index;
    for (size_t i = 0; i < m; ++i) index.emplace(names[i], i);

    // Sparse win mass: wins[i][j] = (possibly fractional) wins of i over j.
    std::vector<std::map<size_t, double>> wins(m);
    UnionFind uf(m);
    for (const auto& rec : votes.records) {
        const size_t a = index.at(rec.model_a);
        const size_t b = index.at(rec.model_b);
        uf.unite(a, b);
        switch (rec.winner) {
            case VoteWinner::kModelA: wins[a][b] += 1.0; break;
            case VoteWinner::kModelB: wins[b][a] += 1.0; break;
            case VoteWinner::kTie:
                wins[a][b] += 0.5;
                wins[b][a] += 0.5;
                break;
        }
    }

    std::map<size_t, std::vector<size_t>> components;
    for (size_t i = 0; i < m; ++i) components[uf.find(i)].push_back(i);

    for (auto& [root, members] : components) {
        const size_t cm = members.size();

        // Total wins/losses per member decide who sits on the likelihood
        // boundary (undefeated or winless -> infinite MLE). Flags come from
        // the raw mass first; virtual ties are added afterwards so one
        // member's fix cannot hide another's boundary.
        if (cm >= 2) {
            std::vector<size_t> boundary;
            for (size_t i : members) {
                double won = 0.0, lost = 0.0;
                for (const auto& [j, v] : wins[i]) won += v;
                for (size_t j : members) {
                    if (j == i) continue;
                    auto it = wins[j].find(i);
                    if (it != wins[j].end()) lost += it->second;
                }
                if (won == 0.0 || lost == 0.0) boundary.push_back(i);
            }
            for (size_t i : boundary) {
                fit.regularized.insert(names[i]);
                // One virtual tie, spread evenly over the rest of the
                // component, keeps its total weight independent of size.
                const double share = 0.5 / static_cast<double>(cm - 1);
                for (size_t j : members) {
                    if (j == i) continue;
                    wins[i][j] += share;
                    wins[j][i] += share;
                }
            }
        }

        // Minorize-maximize iteration for pi, then normalize so the
        // component's geometric mean stays 1 (the gauge freedom).
        std::map<size_t, double> pi;
        for (size_t i : members) pi[i] = 1.0;
        for (uint64_t iter = 0; iter < opts.max_iterations; ++iter) {
            double max_delta = 0.0;
            std::map<size_t, double> next = pi;
            for (size_t i : members) {
                double total_wins = 0.0;
                for (const auto& [j, v] : wins[i]) total_wins += v;
                if (total_wins == 0.0) continue;  // isolated member, keep pi = 1
                double denom = 0.0;
                for (size_t j : members) {
                    if (j == i) continue;
                    double nij = 0.0;
                    auto it = wins[i].find(j);
                    if (it != wins[i].end()) nij += it->second;
                    auto jt = wins[j].find(i);
                    if (jt != wins[j].end()) nij += jt->second;
                    if (nij > 0.0) denom += nij / (pi[i] + pi[j]);
                }
                next[i] = total_wins / denom;
            }
            double log_sum = 0.0;
            for (size_t i : members) log_sum += std::log(next[i]);
            const double scale = std::exp(log_sum / static_cast<double>(cm));
            for (size_t i : members) {
                next[i] /= scale;
                max_delta = std::max(max_delta, std::abs(std::log(next[i]) - std::log(pi[i])));
            }
            pi = std::move(next);
            if (max_delta < opts.tolerance) break;
        }

        // Elo-like scale, component mean anchored.
        double mean = 0.0;
        std::map<size_t, double> rating;
        for (size_t i : members) {
            rating[i] = 400.0 * std::log10(pi[i]);
            mean += rating[i];
        }
        mean /= static_cast<double>(cm);
        std::vector<std::string> comp_names;
        for (size_t i : members) {
            fit.ratings[names[i]] = rating[i] - mean + opts.anchor;
            comp_names.push_back(names[i]);
        }
        std::sort(comp_names.begin(), comp_names.end());
        fit.components.push_back(std::move(comp_names));
    }
    std::sort(fit.components.begin(), fit.components.end());
    return fit;
}

std::map<std::string, ConfidenceInterval> bootstrap_intervals(
    const VoteSet& votes, uint64_t resamples, uint64_t seed,
    const BradleyTerryOptions& opts) {
    if (resamples == 0) throw ConfigError("bootstrap needs at least one resample");
    if (votes.records.empty()) return {};

    std::map<std::string, std::vector<double>> draws;
    const size_t n = votes.records.size();
    for (uint64_t r = 0; r < resamples; ++r) {
        // Each resample owns an independent generator, so any evaluation
        // order (or future parallelism) yields identical intervals.
        SplitMix64 rng(derive_seed(seed, r));
        VoteSet sample;
        sample.records.reserve(n);
        std::set<std::string> models;
        for (size_t i = 0; i < n; ++i) {
            const auto& rec = votes.records[rng.next_below(n)];
            sample.records.push_back(rec);
            models.insert(rec.model_a);
            models.insert(rec.model_b);
        }
        sample.models.assign(models.begin(), models.end());
        BradleyTerryFit fit = fit_bradley_terry(sample, opts);
        for (const auto& [model, rating] : fit.ratings) draws[model].push_back(rating);
    }

    std::map<std::string, ConfidenceInterval> intervals;
    for (auto& [model, values] : draws) {
        std::sort(values.begin(), values.end());
        intervals[model] = ConfidenceInterval{percentile_linear(values, 0.025),
                                              percentile_linear(values, 0.975)};
    }
    return intervals;
}

std::vector<LeaderboardRow> assign_ranks(
    const std::map<std::string, double>& scores,
    const std::map<std::string, ConfidenceInterval>& intervals,
    const std::map<std::string, uint64_t>& vote_counts,
    const std::set<std::string>& regularized) {
    std::vector<LeaderboardRow> rows;
    rows.reserve(scores.size());
    for (const auto& [model, score] : scores) {
        LeaderboardRow row;
        row.model = model;
        row.score = score;
        auto ci = intervals.find(model);
        if (ci != intervals.end()) {
            row.ci_low = ci->second.low;
            row.ci_high = ci->second.high;
        } else {
            row.ci_low = row.ci_high = score;  // no uncertainty information
        }
        auto vc = vote_counts.find(model);
        row.votes = vc == vote_counts.end() ? 0 : vc->second;
        row.regularized = regularized.count(model) > 0;
        rows.push_back(std::move(row));
    }

    for (auto& row : rows) {
        uint64_t better = 0;
        for (const auto& other : rows) {
            if (other.model != row.model && other.ci_low > row.ci_high) ++better;
        }
        row.rank = 1 + better;
    }

    std::sort(rows.begin(), rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
        if (a.rank != b.rank) return a.rank < b.rank;
        if (a.score != b.score) return a.score > b.score;
        return a.model < b.model;
    });
    return rows;
}

std::map<std::string, double> online_elo(const VoteSet& votes, const EloOptions& opts) {
    std::vector<size_t> order(votes.records.size());
    std::iota(order.begin(), order.end(), size_t{0});
    for (const auto& rec : votes.records) {
        if (!rec.ts_nanos) {
            throw DataError("sequential rating needs a timestamp on every vote (prompt '" +
                            rec.prompt_id + "' between '" + rec.model_a + "' and '" +
                            rec.model_b + "' has none)");
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return *votes.records[a].ts_nanos < *votes.records[b].ts_nanos;
    });

    std::map<std::string, double> rating;
    for (const auto& model : votes.models) rating[model] = opts.initial;
    for (size_t idx : order) {
        const auto& rec = votes.records[idx];
        double& ra = rating[rec.model_a];
        double& rb = rating[rec.model_b];
        const double ea = 1.0 / (1.0 + std::pow(10.0, (rb - ra) / 400.0));
        const double eb = 1.0 - ea;
        double sa = 0.5;
        if (rec.winner == VoteWinner::kModelA) sa = 1.0;
        if (rec.winner == VoteWinner::kModelB) sa = 0.0;
        const double sb = 1.0 - sa;
        ra += opts.k * (sa - ea);
        rb += opts.k * (sb - eb);
    }
    return rating;
}

}  // namespace cptk::arena
