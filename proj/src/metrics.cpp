#include "goblend/metrics.hpp"

#include <cmath>
#include <iostream>

namespace goblend {

namespace {

struct Moments {
    double mean_x = 0.0, mean_y = 0.0, var_x = 0.0, var_y = 0.0, cov = 0.0;
};

Moments population_moments(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    Moments m;
    for (std::size_t i = 0; i < x.size(); ++i) {
        m.mean_x += x[i];
        m.mean_y += y[i];
    }
    m.mean_x /= n;
    m.mean_y /= n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - m.mean_x;
        const double dy = y[i] - m.mean_y;
        m.var_x += dx * dx;
        m.var_y += dy * dy;
        m.cov += dx * dy;
    }
    m.var_x /= n;
    m.var_y /= n;
    m.cov /= n;
    return m;
}

} // namespace

double ccc(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ContractViolation("ccc() series lengths differ");
    }
    if (x.size() < 2) {
        throw ContractViolation("ccc() needs series of length >= 2");
    }
    const Moments m = population_moments(x, y);
    const double mean_gap = m.mean_x - m.mean_y;
    const double denom = m.var_x + m.var_y + mean_gap * mean_gap;
    if (denom == 0.0) {
        return 1.0; // both constant and equal
    }
    if (m.var_x == 0.0 && m.var_y == 0.0) {
        return 0.0; // both constant, unequal
    }
    return 2.0 * m.cov / denom;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ContractViolation("pearson() series lengths differ");
    }
    if (x.size() < 2) {
        throw ContractViolation("pearson() needs series of length >= 2");
    }
    const Moments m = population_moments(x, y);
    if (m.var_x == 0.0 || m.var_y == 0.0) {
        std::cerr << "[goblend] warning: pearson() on a constant series; returning 0\n";
        return 0.0;
    }
    return m.cov / std::sqrt(m.var_x * m.var_y);
}

ReplayTrace replay_trajectory(const Environment& env,
                              const std::vector<std::uint8_t>& trajectory) {
    ReplayTrace trace;
    trace.score.reserve(trajectory.size());
    trace.offroad.reserve(trajectory.size());
    trace.speed.reserve(trajectory.size());
    Snapshot snap = env.reset();
    for (const std::uint8_t code : trajectory) {
        StepResult step = env.tick(snap, Action::from_code(code));
        trace.score.push_back(static_cast<double>(step.snapshot.score));
        trace.offroad.push_back(step.features[kFeatOffroad]);
        trace.speed.push_back(step.features[kFeatSpeed] * env.physics().v_max);
        snap = std::move(step.snapshot);
    }
    return trace;
}

SummaryRow summarize(const Environment& env, const CellRecord& best,
                     const TargetTrace& target, std::span<const double> expert_score,
                     double archive_fill_pct) {
    SummaryRow row;
    const ReplayTrace replay = replay_trajectory(env, best.trajectory);
    const int n = static_cast<int>(replay.score.size());

    row.final_score = n > 0 ? replay.score.back() : 0.0;
    row.archive_fill_pct = archive_fill_pct;

    if (n >= 2) {
        const std::span<const double> target_head(target.mean.data(),
                                                  static_cast<std::size_t>(n));
        const std::span<const double> expert_head(expert_score.data(),
                                                  static_cast<std::size_t>(n));
        row.arousal_ccc = ccc(std::span<const double>(best.arousal.h), target_head);
        row.behavior_ccc = ccc(std::span<const double>(replay.score), expert_head);
    }
    row.mean_arousal = reward_max_arousal(best.arousal);
    row.confidence = reward_rac(best.arousal);
    if (n > 0) {
        row.arousal_deviation = best.arousal.sum_sigma_values / n;
        double off = 0.0, spd = 0.0;
        for (int i = 0; i < n; ++i) {
            off += replay.offroad[static_cast<std::size_t>(i)];
            spd += replay.speed[static_cast<std::size_t>(i)];
        }
        row.offroad_pct = 100.0 * off / n;
        row.avg_speed = spd / n;
    }
    return row;
}

} // namespace goblend
