#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cptk::arena {

enum class VoteWinner { kModelA, kModelB, kTie };

struct VoteRecord {
    std::string prompt_id;
    std::string model_a;
    std::string model_b;
    VoteWinner winner = VoteWinner::kTie;
    // Nanoseconds since the Unix epoch, UTC. Absent when the vote line had
    // no timestamp; only the sequential protocol requires one.
    std::optional<int64_t> ts_nanos;
    std::string ts_text;  // original RFC 3339 string, for reports
};

struct RejectedLine {
    uint64_t line_number = 0;
    std::string reason;
};

struct VoteSet {
    std::vector<VoteRecord> records;
    std::vector<std::string> models;  // sorted unique
    std::vector<RejectedLine> rejected;
    uint64_t total_lines = 0;
};

// Parses one JSONL vote file. Expected fields: "prompt_id" (string),
// "model_a"/"model_b" (distinct non-empty strings), "winner"
// ("model_a" | "model_b" | "tie"), optional "ts" (RFC 3339 UTC).
// Malformed lines are collected in `rejected`, never silently dropped.
VoteSet read_votes(const std::string& path);

// Votes mentioning the model on either side.
uint64_t votes_for_model(const VoteSet& votes, const std::string& model);

// Strict RFC 3339 parse: "YYYY-MM-DDTHH:MM:SS[.fraction](Z|±HH:MM)".
// Returns nanoseconds since the epoch, or nullopt when malformed.
std::optional<int64_t> parse_rfc3339_nanos(const std::string& text);

}  // namespace cptk::arena
