#include "cptk/merge/ops.hpp"

#include <cmath>

#include "cptk/error.hpp"
#include "json.hpp"

namespace cptk::merge {

namespace {

// Matches a character class starting at pattern[start] == '['. Returns
// whether c matched and the index of the closing ']'; npos when the class
// never closes.
std::pair<bool, size_t> match_class(std::string_view pat, size_t start, char c) {
    size_t i = start + 1;
    bool negate = false;
    if (i < pat.size() && (pat[i] == '!' || pat[i] == '^')) {
        negate = true;
        ++i;
    }
    bool matched = false;
    bool first = true;
    while (i < pat.size() && (pat[i] != ']' || first)) {
        first = false;
        if (i + 2 < pat.size() && pat[i + 1] == '-' && pat[i + 2] != ']') {
            if (pat[i] <= c && c <= pat[i + 2]) matched = true;
            i += 3;
        } else {
            if (pat[i] == c) matched = true;
            ++i;
        }
    }
    if (i >= pat.size()) return {false, std::string_view::npos};
    return {matched != negate, i};
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (const auto& part : parts) {
        if (!out.empty()) out += sep;
        out += part;
    }
    return out;
}

// Name sets plus per-tensor geometry must agree before any element-wise
// combination; every offender is reported at once.
void require_aligned(const TensorMap& a, const TensorMap& b, const std::string& a_role,
                     const std::string& b_role) {
    std::vector<std::string> problems;
    for (const auto& [name, ta] : a.tensors) {
        auto it = b.tensors.find(name);
        if (it == b.tensors.end()) {
            problems.push_back("'" + name + "' only in " + a_role);
        } else {
            if (it->second.dtype != ta.dtype) {
                problems.push_back("'" + name + "' dtype differs");
            }
            if (it->second.shape != ta.shape) {
                problems.push_back("'" + name + "' shape differs");
            }
        }
    }
    for (const auto& [name, tb] : b.tensors) {
        if (!a.tensors.count(name)) problems.push_back("'" + name + "' only in " + b_role);
    }
    if (!problems.empty()) {
        throw DataError(a_role + " and " + b_role + " are not mergeable: " + join(problems, "; "));
    }
}

std::string format_number(double v) { return nlohmann::json(v).dump(); }

}  // namespace

bool glob_match(std::string_view pattern, std::string_view name) {
    size_t p = 0, n = 0;
    size_t star_p = std::string_view::npos, star_n = 0;
    while (n < name.size()) {
        bool advanced = false;
        if (p < pattern.size()) {
            const char pc = pattern[p];
            if (pc == '*') {
                star_p = p++;
                star_n = n;
                continue;
            }
            if (pc == '?') {
                ++p;
                ++n;
                continue;
            }
            if (pc == '[') {
                auto [hit, close] = match_class(pattern, p, name[n]);
                if (close == std::string_view::npos) return false;  // malformed
                if (hit) {
                    p = close + 1;
                    ++n;
                    advanced = true;
                }
            } else if (pc == name[n]) {
                ++p;
                ++n;
                advanced = true;
            }
        }
        if (advanced) continue;
        if (star_p != std::string_view::npos) {
            // Retry after letting the last '*' swallow one more character.
            p = star_p + 1;
            n = ++star_n;
            continue;
        }
        return false;
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

void validate_glob(std::string_view pattern) {
    if (pattern.empty()) throw ConfigError("glob pattern must be non-empty");
    size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] == '[') {
            auto [hit, close] = match_class(pattern, i, '\0');
            (void)hit;
            if (close == std::string_view::npos) {
                throw ConfigError("glob pattern '" + std::string(pattern) +
                                  "' has an unterminated character class");
            }
            i = close + 1;
        } else {
            ++i;
        }
    }
}

TensorMap tensor_delta(const TensorMap& instruct, const TensorMap& base) {
    require_aligned(instruct, base, "instruct model", "base model");
    TensorMap out;
    for (const auto& [name, ins] : instruct.tensors) {
        const Tensor& b = base.tensors.at(name);
        Tensor t = Tensor::zeros(ins.dtype, ins.shape);
        const uint64_t n = t.numel();
        for (uint64_t i = 0; i < n; ++i) t.set(i, ins.get(i) - b.get(i));
        out.tensors.emplace(name, std::move(t));
    }
    return out;
}

TensorMap apply_chat_vector(const TensorMap& target, const TensorMap& delta,
                            const ChatVectorConfig& cfg) {
    if (!std::isfinite(cfg.alpha)) throw ConfigError("chat-vector alpha must be finite");
    for (const auto& pattern : cfg.exclude) validate_glob(pattern);

    auto excluded = [&](const std::string& name) {
        for (const auto& pattern : cfg.exclude) {
            if (glob_match(pattern, name)) return true;
        }
        return false;
    };

    std::vector<std::string> problems;
    for (const auto& [name, t] : target.tensors) {
        if (excluded(name)) continue;
        auto it = delta.tensors.find(name);
        if (it == delta.tensors.end()) {
            problems.push_back("delta is missing '" + name + "'");
        } else if (it->second.dtype != t.dtype || it->second.shape != t.shape) {
            problems.push_back("delta for '" + name + "' has a different dtype or shape");
        }
    }
    for (const auto& [name, d] : delta.tensors) {
        if (!target.tensors.count(name)) {
            problems.push_back("delta has '" + name + "' which the target model lacks");
        }
    }
    if (!problems.empty()) {
        throw DataError("chat vector does not fit the target model: " + join(problems, "; "));
    }

    TensorMap out;
    out.metadata = target.metadata;
    out.metadata["merge.op"] = "chat_vector";
    out.metadata["merge.alpha"] = format_number(cfg.alpha);
    out.metadata["merge.exclude"] = join(cfg.exclude, " ");
    for (const auto& [name, t] : target.tensors) {
        // A zero scale must leave the model byte-identical; going through
        // arithmetic would still flip -0.0 to +0.0.
        if (excluded(name) || cfg.alpha == 0.0) {
            out.tensors.emplace(name, t);  // byte-for-byte copy
            continue;
        }
        const Tensor& d = delta.tensors.at(name);
        Tensor merged = Tensor::zeros(t.dtype, t.shape);
        const uint64_t n = merged.numel();
        for (uint64_t i = 0; i < n; ++i) merged.set(i, t.get(i) + cfg.alpha * d.get(i));
        out.tensors.emplace(name, std::move(merged));
    }
    return out;
}

TensorMap slerp_merge(const TensorMap& a, const TensorMap& b, const SlerpConfig& cfg) {
    if (!(cfg.t >= 0.0 && cfg.t <= 1.0)) {
        throw ConfigError("slerp t must lie in [0, 1], got " + format_number(cfg.t));
    }
    require_aligned(a, b, "endpoint a", "endpoint b");

    TensorMap out;
    out.metadata = a.metadata;
    out.metadata["merge.op"] = "slerp";
    out.metadata["merge.t"] = format_number(cfg.t);

    for (const auto& [name, ta] : a.tensors) {
        const Tensor& tb = b.tensors.at(name);
        if (cfg.t == 0.0) {
            out.tensors.emplace(name, ta);
            continue;
        }
        if (cfg.t == 1.0) {
            out.tensors.emplace(name, tb);
            continue;
        }
        const uint64_t n = ta.numel();
        double dot = 0.0, na2 = 0.0, nb2 = 0.0;
        for (uint64_t i = 0; i < n; ++i) {
            const double x = ta.get(i);
            const double y = tb.get(i);
            dot += x * y;
            na2 += x * x;
            nb2 += y * y;
        }
        const double na = std::sqrt(na2);
        const double nb = std::sqrt(nb2);

        // Degenerate directions (zero norm, parallel, antiparallel) fall
        // back to linear interpolation; these weights are the fallback.
        double wa = 1.0 - cfg.t;
        double wb = cfg.t;
        if (na != 0.0 && nb != 0.0) {
            double cos_omega = dot / (na * nb);
            cos_omega = std::max(-1.0, std::min(1.0, cos_omega));
            if (std::abs(cos_omega) < cfg.parallel_threshold) {
                const double omega = std::acos(cos_omega);
                const double sin_omega = std::sin(omega);
                wa = std::sin((1.0 - cfg.t) * omega) / sin_omega;
                wb = std::sin(cfg.t * omega) / sin_omega;
            }
        }

        Tensor merged = Tensor::zeros(ta.dtype, ta.shape);
        for (uint64_t i = 0; i < n; ++i) merged.set(i, wa * ta.get(i) + wb * tb.get(i));
        out.tensors.emplace(name, std::move(merged));
    }
    return out;
}

std::vector<double> parse_value_sweep(const std::string& text) {
    auto parse_one = [](const std::string& s) {
        size_t pos = 0;
        double v;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw ConfigError("'" + s + "' is not a number");
        }
        if (pos != s.size()) throw ConfigError("'" + s + "' is not a number");
        return v;
    };

    const size_t dots = text.find("..");
    if (dots == std::string::npos) return {parse_one(text)};

    const size_t colon = text.find(':', dots + 2);
    if (colon == std::string::npos) {
        throw ConfigError("sweep '" + text + "' must look like start..stop:step");
    }
    const double start = parse_one(text.substr(0, dots));
    const double stop = parse_one(text.substr(dots + 2, colon - dots - 2));
    const double step = parse_one(text.substr(colon + 1));
    if (!(step > 0.0)) throw ConfigError("sweep step must be positive");
    if (stop < start) throw ConfigError("sweep stop must be at least its start");
    if ((stop - start) / step > 10000.0) throw ConfigError("sweep has more than 10000 values");

    std::vector<double> values;
    for (int i = 0;; ++i) {
        const double v = start + step * i;
        if (v > stop + step * 1e-9) break;
        values.push_back(v);
    }
    return values;
}

}  // namespace cptk::merge
