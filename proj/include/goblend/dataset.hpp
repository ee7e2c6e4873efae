#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "goblend/action.hpp"
#include "goblend/environment.hpp"

namespace goblend {

// One play session: per-window features, the action taken, and the raw plus
// per-session min-max normalized arousal annotation.
struct DemoSession {
    std::string id;
    std::vector<double> features; // windows x kFeatureCount, row-major
    std::vector<Action> actions;
    std::vector<double> raw_arousal;
    std::vector<double> arousal; // normalized into [0, 1]

    int window_count() const { return static_cast<int>(actions.size()); }
    const double* window_features(int w) const {
        return features.data() + static_cast<std::size_t>(w) * kFeatureCount;
    }
};

// Per-window modeling target: mean expert arousal with sample std and the
// half-width of its 95% confidence interval (1.96 * s / sqrt(m)).
struct TargetTrace {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<double> ci;

    int horizon() const { return static_cast<int>(mean.size()); }
};

// Empirical distribution over the 9 (gas, steer) actions.
struct ActionFrequency {
    std::array<double, Action::kCount> p{};

    Action sample(class Rng& rng) const;
};

// Loads every session listed in the directory's manifest.json (or, absent a
// manifest, every session_*.csv in name order). Arousal is normalized
// per session; a constant trace normalizes to all-0.5 with a warning.
std::vector<DemoSession> load_dataset(const std::filesystem::path& dir);

DemoSession load_session_csv(const std::filesystem::path& file);

// Per-session min-max normalization, applied in place to `arousal`.
void normalize_session(DemoSession& session);

TargetTrace target_trace(const std::vector<DemoSession>& sessions, int horizon = kMaxWindows);

ActionFrequency action_frequencies(const std::vector<DemoSession>& sessions);

// Mean expert score-over-time (0..16 per window, from the score-fraction
// feature), padded to `horizon` with final values. The behavior-CCC target.
std::vector<double> mean_expert_score_trace(const std::vector<DemoSession>& sessions,
                                            int horizon = kMaxWindows);

} // namespace goblend
