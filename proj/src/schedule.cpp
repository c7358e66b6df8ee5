#include "cptk/schedule/schedule.hpp"

#include "cptk/error.hpp"

namespace cptk::schedule {

void ScheduleConfig::validate() const {
    if (!(peak_lr > 0.0)) throw ConfigError("schedule: peak learning rate must be positive");
    if (!(final_lr >= 0.0) || final_lr > peak_lr) {
        throw ConfigError("schedule: final learning rate must lie in [0, peak]");
    }
    if (warmup_steps + decay_steps > total_steps) {
        throw ConfigError("schedule: warmup plus decay exceeds total steps");
    }
}

double lr_at(const ScheduleConfig& cfg, uint64_t step) {
    cfg.validate();
    if (step > cfg.total_steps) {
        throw ConfigError("schedule: step " + std::to_string(step) + " is past the end (" +
                          std::to_string(cfg.total_steps) + ")");
    }
    if (step < cfg.warmup_steps) {
        return cfg.peak_lr * static_cast<double>(step) / static_cast<double>(cfg.warmup_steps);
    }
    const uint64_t stable_end = cfg.stable_end();
    if (step <= stable_end) return cfg.peak_lr;
    // decay_steps > 0 here, otherwise step <= total == stable_end above.
    const double into_decay = static_cast<double>(step - stable_end);
    const double frac = into_decay / static_cast<double>(cfg.decay_steps);
    // Two-product form so the endpoints are exact: frac 0 -> peak, 1 -> final.
    return cfg.peak_lr * (1.0 - frac) + cfg.final_lr * frac;
}

ScheduleConfig retarget_total_steps(const ScheduleConfig& cfg, uint64_t new_total) {
    cfg.validate();
    if (new_total < cfg.warmup_steps + cfg.decay_steps) {
        throw ConfigError("schedule: retarget to " + std::to_string(new_total) +
                          " steps leaves no room for warmup plus decay");
    }
    ScheduleConfig out = cfg;
    out.total_steps = new_total;
    return out;
}

std::vector<std::pair<uint64_t, double>> schedule_table(const ScheduleConfig& cfg,
                                                        uint64_t stride) {
    cfg.validate();
    if (stride == 0) throw ConfigError("schedule: table stride must be at least 1");
    std::vector<std::pair<uint64_t, double>> rows;
    for (uint64_t step = 0; step <= cfg.total_steps; step += stride) {
        rows.emplace_back(step, lr_at(cfg, step));
        if (step > cfg.total_steps - stride) break;  // avoid overflow past the end
    }
    if (rows.empty() || rows.back().first != cfg.total_steps) {
        rows.emplace_back(cfg.total_steps, lr_at(cfg, cfg.total_steps));
    }
    return rows;
}

}  // namespace cptk::schedule
