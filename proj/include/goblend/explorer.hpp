#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "goblend/affect.hpp"
#include "goblend/archive.hpp"
#include "goblend/dataset.hpp"
#include "goblend/environment.hpp"
#include "goblend/metrics.hpp"
#include "goblend/selection.hpp"

namespace goblend {

enum class SelectionStrategy { kUniform, kRoulette, kUcb };

const char* strategy_name(SelectionStrategy s);
SelectionStrategy strategy_from_name(const std::string& name);

struct ExperimentConfig {
    RewardChannel channel = RewardChannel::kScore;
    SelectionStrategy strategy = SelectionStrategy::kUniform;
    std::uint64_t iterations = 500000;
    int burst = 25;
    int runs = 3;
    KnnConfig knn;
    // Replays every 100th accepted offer from reset and compares snapshot
    // bytes; for tests, too slow for full-size runs.
    bool debug_replay_check = false;

    void validate() const;
};

struct RunResult {
    CellRecord best; // max governing reward over the final archive
    SummaryRow summary;
    double fill_ratio = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t total_ticks = 0;
    std::uint64_t total_offers = 0;
    std::uint64_t total_selections = 0;
    double wall_seconds = 0.0;
    // (iteration, best governing reward) recorded at each improvement.
    std::vector<std::pair<std::uint64_t, double>> improvements;
    std::unique_ptr<Archive> archive; // final archive; null for the baseline
};

// Read-only bundle shared by all runs of a suite.
struct ExplorerContext {
    const Environment& env;
    const KnnIndex& knn;
    const TargetTrace& target;
    const ActionFrequency& freq;
    const std::vector<double>& expert_score;
};

// One exploration run: iterate select -> restore -> burst of sampled
// actions -> offer each intermediate cell.
RunResult run_experiment(const ExplorerContext& ctx, const ExperimentConfig& config,
                         std::uint64_t seed);

// Archive-free baseline: whole episodes of frequency-sampled actions with
// the same total environment-step budget; reports the best episode.
RunResult random_baseline(const ExplorerContext& ctx, const ExperimentConfig& config,
                          std::uint64_t seed);

} // namespace goblend
