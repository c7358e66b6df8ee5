#include "cptk/arena/votes.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "cptk/error.hpp"
#include "json.hpp"

namespace cptk::arena {

namespace {

// Days between 1970-01-01 and y-m-d in the proleptic Gregorian calendar
// (Howard Hinnant's civil-days algorithm).
int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<uint64_t>(y - era * 400);
    const uint64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const uint64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

bool leap_year(int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(int64_t y, unsigned m) {
    static const unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && leap_year(y)) return 29;
    return lengths[m - 1];
}

bool read_digits(const std::string& s, size_t& pos, int count, int64_t& out) {
    int64_t v = 0;
    for (int i = 0; i < count; ++i) {
        if (pos >= s.size() || s[pos] < '0' || s[pos] > '9') return false;
        v = v * 10 + (s[pos] - '0');
        ++pos;
    }
    out = v;
    return true;
}

}  // namespace

std::optional<int64_t> parse_rfc3339_nanos(const std::string& text) {
    size_t pos = 0;
    int64_t year, month, day, hour, minute, second;
    if (!read_digits(text, pos, 4, year)) return std::nullopt;
    if (pos >= text.size() || text[pos++] != '-') return std::nullopt;
    if (!read_digits(text, pos, 2, month)) return std::nullopt;
    if (pos >= text.size() || text[pos++] != '-') return std::nullopt;
    if (!read_digits(text, pos, 2, day)) return std::nullopt;
    if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't')) return std::nullopt;
    ++pos;
    if (!read_digits(text, pos, 2, hour)) return std::nullopt;
    if (pos >= text.size() || text[pos++] != ':') return std::nullopt;
    if (!read_digits(text, pos, 2, minute)) return std::nullopt;
    if (pos >= text.size() || text[pos++] != ':') return std::nullopt;
    if (!read_digits(text, pos, 2, second)) return std::nullopt;

    if (month < 1 || month > 12) return std::nullopt;
    if (day < 1 || day > days_in_month(year, static_cast<unsigned>(month))) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;  // 60 = leap second

    int64_t nanos = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        int digits = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9' && digits < 9) {
            nanos = nanos * 10 + (text[pos] - '0');
            ++pos;
            ++digits;
        }
        if (digits == 0) return std::nullopt;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;  // beyond ns
        for (int i = digits; i < 9; ++i) nanos *= 10;
    }

    int64_t offset_minutes = 0;
    if (pos >= text.size()) return std::nullopt;
    if (text[pos] == 'Z' || text[pos] == 'z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        const bool negative = text[pos] == '-';
        ++pos;
        int64_t oh, om;
        if (!read_digits(text, pos, 2, oh)) return std::nullopt;
        if (pos >= text.size() || text[pos++] != ':') return std::nullopt;
        if (!read_digits(text, pos, 2, om)) return std::nullopt;
        if (oh > 23 || om > 59) return std::nullopt;
        offset_minutes = (negative ? -1 : 1) * (oh * 60 + om);
    } else {
        return std::nullopt;
    }
    if (pos != text.size()) return std::nullopt;

    const int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                         static_cast<unsigned>(day));
    int64_t seconds = days * 86400 + hour * 3600 + minute * 60 + second;
    seconds -= offset_minutes * 60;  // normalize to UTC
    return seconds * 1000000000 + nanos;
}

VoteSet read_votes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open votes: " + path);

    VoteSet set;
    std::set<std::string> models;
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        ++set.total_lines;

        auto reject = [&](const std::string& reason) {
            set.rejected.push_back(RejectedLine{line_no, reason});
        };

        nlohmann::json v = nlohmann::json::parse(line, nullptr, false);
        if (v.is_discarded() || !v.is_object()) {
            reject("not a JSON object");
            continue;
        }
        VoteRecord rec;
        rec.prompt_id = v.value("prompt_id", std::string());
        rec.model_a = v.value("model_a", std::string());
        rec.model_b = v.value("model_b", std::string());
        if (rec.model_a.empty() || rec.model_b.empty()) {
            reject("model_a and model_b must be non-empty strings");
            continue;
        }
        if (rec.model_a == rec.model_b) {
            reject("model_a and model_b must differ");
            continue;
        }
        const std::string winner = v.value("winner", std::string());
        if (winner == "model_a") {
            rec.winner = VoteWinner::kModelA;
        } else if (winner == "model_b") {
            rec.winner = VoteWinner::kModelB;
        } else if (winner == "tie") {
            rec.winner = VoteWinner::kTie;
        } else {
            reject("winner must be one of model_a, model_b, tie (got '" + winner + "')");
            continue;
        }
        if (v.contains("ts")) {
            if (!v.at("ts").is_string()) {
                reject("ts must be an RFC 3339 string");
                continue;
            }
            rec.ts_text = v.at("ts").get<std::string>();
            rec.ts_nanos = parse_rfc3339_nanos(rec.ts_text);
            if (!rec.ts_nanos) {
                reject("ts '" + rec.ts_text + "' is not a valid RFC 3339 timestamp");
                continue;
            }
        }
        models.insert(rec.model_a);
        models.insert(rec.model_b);
        set.records.push_back(std::move(rec));
    }
    set.models.assign(models.begin(), models.end());
    return set;
}

uint64_t votes_for_model(const VoteSet& votes, const std::string& model) {
    uint64_t n = 0;
    for (const auto& rec : votes.records) {
        if (rec.model_a == model || rec.model_b == model) ++n;
    }
    return n;
}

}  // namespace cptk::arena
