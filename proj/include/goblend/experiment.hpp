#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "goblend/explorer.hpp"

namespace goblend {

// One named experiment in a suite: the Go-Blend loop with a channel and
// selection strategy, or the archive-free random baseline.
struct ExperimentSpec {
    std::string name;
    bool random_agent = false;
    RewardChannel channel = RewardChannel::kScore;
    SelectionStrategy strategy = SelectionStrategy::kUniform;
    std::optional<std::uint64_t> iterations; // per-experiment overrides
    std::optional<int> runs;
};

struct SuiteConfig {
    std::filesystem::path dataset_dir;
    std::filesystem::path track_path;
    std::filesystem::path out_dir;
    std::uint64_t master_seed = 0;
    std::uint64_t iterations = 500000;
    int runs = 3;
    int burst = 25;
    KnnConfig knn;
    int jobs = 1;
    std::string only; // run only this experiment when non-empty
    std::vector<ExperimentSpec> experiments;

    // Parses the config file; experiments default to the six-agent layout
    // (random, max_score, max_arousal, ra, rau, rac) when omitted.
    static SuiteConfig from_file(const std::filesystem::path& path);
    static std::vector<ExperimentSpec> default_experiments();
};

struct SuiteRunSummary {
    std::string experiment;
    int run_index = 0;
    std::uint64_t seed = 0;
    SummaryRow row;
};

struct SuiteResult {
    std::vector<SuiteRunSummary> runs;
    std::filesystem::path summary_csv;
};

// Stable per-run seed: adding or renaming one experiment never changes
// another experiment's streams.
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::string_view name, int run_index);

// Executes every (experiment, run) pair, writes per-run artifacts
// (result.json, archive.jsonl, best_trace.csv), the aggregated summary.csv
// and a config echo. Runs execute in parallel when jobs > 1 with outputs
// identical to serial execution.
SuiteResult run_suite(const SuiteConfig& config);

} // namespace goblend
