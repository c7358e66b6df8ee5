#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace cptk::schedule {

// Trapezoidal learning-rate schedule: linear warmup from zero to the peak,
// a constant plateau, then linear decay to the final rate over the last
// decay_steps. Step units are optimizer steps.
struct ScheduleConfig {
    double peak_lr = 0.0;
    double final_lr = 0.0;
    uint64_t warmup_steps = 0;
    uint64_t decay_steps = 0;
    uint64_t total_steps = 0;

    uint64_t stable_end() const { return total_steps - decay_steps; }

    // Throws ConfigError unless 0 < peak, 0 <= final <= peak and
    // warmup_steps + decay_steps <= total_steps.
    void validate() const;
};

// Learning rate at an integer step in [0, total_steps]; out-of-range steps
// are a ConfigError. Piecewise linear with lr(0) = 0 when warmup > 0,
// lr(warmup_steps) = peak, lr(stable_end) = peak, lr(total) = final
// (when decay_steps > 0).
double lr_at(const ScheduleConfig& cfg, uint64_t step);

// Extends or shortens the run while keeping warmup and decay widths: the
// plateau absorbs the difference. Requires new_total - decay >= warmup so
// the plateau never goes negative.
ScheduleConfig retarget_total_steps(const ScheduleConfig& cfg, uint64_t new_total);

// (step, lr) rows sampled every `stride` steps; the final step is always
// included. stride must be >= 1.
std::vector<std::pair<uint64_t, double>> schedule_table(const ScheduleConfig& cfg,
                                                        uint64_t stride);

}  // namespace cptk::schedule
