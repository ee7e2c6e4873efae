#pragma once

#include <span>
#include <vector>

#include "goblend/archive.hpp"
#include "goblend/dataset.hpp"
#include "goblend/environment.hpp"

namespace goblend {

// Lin's concordance correlation coefficient with population moments:
// 2 cov / (var_x + var_y + (mean_x - mean_y)^2). Two equal constant series
// are defined as 1, two unequal constants as 0.
double ccc(std::span<const double> x, std::span<const double> y);

// Product-moment correlation; zero-variance input yields 0 with a warning.
double pearson(std::span<const double> x, std::span<const double> y);

// One result-table row.
struct SummaryRow {
    double final_score = 0.0;
    double behavior_ccc = 0.0;
    double mean_arousal = 0.0;
    double arousal_ccc = 0.0;
    double arousal_deviation = 0.0; // mean sigma(i)
    double confidence = 0.0;        // R_ac over the full trajectory
    double archive_fill_pct = 0.0;  // negative marks not-applicable (random agent)
    double offroad_pct = 0.0;
    double avg_speed = 0.0; // world units / s
};

// Per-window record of the best trajectory's replay, used for the trace CSV.
struct ReplayTrace {
    std::vector<double> score;   // cumulative score per window
    std::vector<double> offroad; // window mean of the offroad flag
    std::vector<double> speed;   // window mean speed, u/s
};

ReplayTrace replay_trajectory(const Environment& env,
                              const std::vector<std::uint8_t>& trajectory);

// Gameplay statistics and modeling measures for one finished record.
SummaryRow summarize(const Environment& env, const CellRecord& best,
                     const TargetTrace& target, std::span<const double> expert_score,
                     double archive_fill_pct);

} // namespace goblend
