#include "goblend/explorer.hpp"

#include <chrono>

namespace goblend {

const char* strategy_name(SelectionStrategy s) {
    switch (s) {
        case SelectionStrategy::kUniform: return "uniform";
        case SelectionStrategy::kRoulette: return "roulette";
        case SelectionStrategy::kUcb: return "ucb";
    }
    return "uniform";
}

SelectionStrategy strategy_from_name(const std::string& name) {
    if (name == "uniform") return SelectionStrategy::kUniform;
    if (name == "roulette") return SelectionStrategy::kRoulette;
    if (name == "ucb") return SelectionStrategy::kUcb;
    throw ConfigError("unknown selection strategy: " + name);
}

void ExperimentConfig::validate() const {
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (burst < 1) throw ConfigError("burst must be >= 1");
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (knn.k < 1) throw ConfigError("k must be >= 1");
    if (knn.epsilon <= 0.0) throw ConfigError("knn epsilon must be positive");
}

namespace {

struct BestTracker {
    double reward = 0.0;
    bool any = false;
    std::vector<std::pair<std::uint64_t, double>> improvements;

    void observe(std::uint64_t iteration, double r) {
        if (!any || r > reward) {
            reward = r;
            any = true;
            improvements.emplace_back(iteration, r);
        }
    }
};

void check_replay(const Environment& env, const CellRecord& cand) {
    Snapshot snap = env.reset();
    for (const std::uint8_t code : cand.trajectory) {
        snap = env.tick(snap, Action::from_code(code)).snapshot;
    }
    if (snap.to_bytes() != cand.snapshot.to_bytes()) {
        throw ContractViolation("offered trajectory does not replay to its snapshot");
    }
}

const CellRecord& best_record(const Archive& archive, RewardChannel channel) {
    const auto& records = archive.records();
    std::size_t best = 0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const double r = records[i].reward_on(channel);
        const double b = records[best].reward_on(channel);
        if (r > b || (r == b && records[i].length() < records[best].length())) {
            best = i;
        }
    }
    return records[best];
}

} // namespace

RunResult run_experiment(const ExplorerContext& ctx, const ExperimentConfig& config,
                         std::uint64_t seed) {
    config.validate();
    if (static_cast<std::size_t>(config.knn.k) > ctx.knn.size()) {
        throw ConfigError("k exceeds the demonstration dataset size");
    }
    if (ctx.target.horizon() < kMaxWindows) {
        throw ConfigError("target trace shorter than the episode horizon");
    }

    const auto t0 = std::chrono::steady_clock::now();
    const AffectKind kind = affect_kind_for(config.channel);

    auto archive_ptr = std::make_unique<Archive>(
        ctx.env.key_space_bound(),
        static_cast<std::uint32_t>(ctx.env.geometry().segment_count()));
    Archive& archive = *archive_ptr;
    Rng rng(seed);

    RunResult result;
    result.seed = seed;

    {
        CellRecord seed_cell;
        seed_cell.snapshot = ctx.env.reset();
        seed_cell.key = ctx.env.cell_key(seed_cell.snapshot);
        archive.offer(std::move(seed_cell), config.channel);
    }

    BestTracker tracker;
    std::uint64_t accepted = 0;

    for (std::uint64_t iter = 0; iter < config.iterations; ++iter) {
        SelectionWeights weights;
        switch (config.strategy) {
            case SelectionStrategy::kUniform:
                weights = weights_uniform(archive, /*exclude_terminal=*/true);
                break;
            case SelectionStrategy::kRoulette:
                weights = weights_roulette(archive, kind, /*exclude_terminal=*/true);
                break;
            case SelectionStrategy::kUcb:
                weights = weights_ucb(archive, kind, /*exclude_terminal=*/true);
                break;
        }
        const std::size_t pos = sample(weights, rng);
        archive.mark_selected(weights.keys[pos]);
        result.total_selections += 1;

        const CellRecord& base = archive.records()[weights.slots[pos]];
        Snapshot cur = base.snapshot;
        std::vector<std::uint8_t> traj = base.trajectory;
        ArousalTrajectory arousal = base.arousal;

        for (int b = 0; b < config.burst; ++b) {
            const Action action = ctx.freq.sample(rng);
            StepResult step = ctx.env.tick(cur, action);
            result.total_ticks += 1;

            traj.push_back(static_cast<std::uint8_t>(action.code()));
            const ArousalEstimate est = ctx.knn.estimate(step.features, config.knn);
            arousal.extend(est, ctx.target);

            const double r_b = static_cast<double>(step.snapshot.score);
            const double r_a = affect_value(kind, arousal);
            const double governing = config.channel == RewardChannel::kScore ? r_b : r_a;
            const CellKey key = ctx.env.cell_key(step.snapshot);

            result.total_offers += 1;
            if (archive.would_accept(key, governing, static_cast<std::uint32_t>(traj.size()),
                                     config.channel)) {
                CellRecord cand;
                cand.key = key;
                cand.trajectory = traj;
                cand.snapshot = step.snapshot;
                cand.r_b = r_b;
                cand.r_a = r_a;
                cand.arousal = arousal;
                cand.terminal = step.terminal;
                if (config.debug_replay_check && accepted % 100 == 0) {
                    check_replay(ctx.env, cand);
                }
                archive.offer(std::move(cand), config.channel);
                ++accepted;
            }
            tracker.observe(iter, governing);

            cur = std::move(step.snapshot);
            if (step.terminal) break;
        }
    }

    result.best = best_record(archive, config.channel);
    result.fill_ratio = archive.fill_ratio();
    result.improvements = std::move(tracker.improvements);
    result.summary = summarize(ctx.env, result.best, ctx.target, ctx.expert_score,
                               100.0 * result.fill_ratio);
    result.archive = std::move(archive_ptr);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

RunResult random_baseline(const ExplorerContext& ctx, const ExperimentConfig& config,
                          std::uint64_t seed) {
    config.validate();
    if (static_cast<std::size_t>(config.knn.k) > ctx.knn.size()) {
        throw ConfigError("k exceeds the demonstration dataset size");
    }

    const auto t0 = std::chrono::steady_clock::now();
    const AffectKind kind = affect_kind_for(config.channel);
    const std::uint64_t budget = config.iterations * static_cast<std::uint64_t>(config.burst);

    Rng rng(seed);
    RunResult result;
    result.seed = seed;

    CellRecord best;
    bool have_best = false;
    double best_reward = 0.0;

    while (result.total_ticks < budget) {
        Snapshot cur = ctx.env.reset();
        std::vector<std::uint8_t> traj;
        ArousalTrajectory arousal;
        bool terminal = false;
        while (!terminal && result.total_ticks < budget) {
            const Action action = ctx.freq.sample(rng);
            StepResult step = ctx.env.tick(cur, action);
            result.total_ticks += 1;
            traj.push_back(static_cast<std::uint8_t>(action.code()));
            arousal.extend(ctx.knn.estimate(step.features, config.knn), ctx.target);
            terminal = step.terminal;
            cur = std::move(step.snapshot);
        }

        const double r_b = static_cast<double>(cur.score);
        const double r_a = affect_value(kind, arousal);
        const double governing = config.channel == RewardChannel::kScore ? r_b : r_a;
        if (!have_best || governing > best_reward ||
            (governing == best_reward && traj.size() < best.trajectory.size())) {
            best.key = ctx.env.cell_key(cur);
            best.trajectory = std::move(traj);
            best.snapshot = std::move(cur);
            best.r_b = r_b;
            best.r_a = r_a;
            best.arousal = std::move(arousal);
            best.terminal = true;
            best_reward = governing;
            have_best = true;
        }
    }

    result.best = std::move(best);
    result.fill_ratio = -1.0; // no archive
    result.summary = summarize(ctx.env, result.best, ctx.target, ctx.expert_score, -1.0);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

} // namespace goblend
