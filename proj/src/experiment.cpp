#include "goblend/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "goblend/rng.hpp"

namespace goblend {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

ExperimentSpec parse_experiment(const nlohmann::json& j) {
    ExperimentSpec spec;
    spec.name = j.at("name").get<std::string>();
    const std::string agent = j.value("agent", "goblend");
    if (agent == "random") {
        spec.random_agent = true;
    } else if (agent != "goblend") {
        throw ConfigError("experiment '" + spec.name + "': unknown agent '" + agent + "'");
    }
    if (j.contains("channel")) {
        spec.channel = channel_from_name(j["channel"].get<std::string>());
    }
    if (j.contains("selection")) {
        spec.strategy = strategy_from_name(j["selection"].get<std::string>());
    }
    if (j.contains("iterations")) spec.iterations = j["iterations"].get<std::uint64_t>();
    if (j.contains("runs")) spec.runs = j["runs"].get<int>();
    return spec;
}

nlohmann::json echo_config(const SuiteConfig& c) {
    nlohmann::json j;
    j["dataset"] = c.dataset_dir.string();
    j["track"] = c.track_path.string();
    j["seed"] = c.master_seed;
    j["iterations"] = c.iterations;
    j["runs"] = c.runs;
    j["burst"] = c.burst;
    j["k"] = c.knn.k;
    j["epsilon"] = c.knn.epsilon;
    j["weighting"] = c.knn.weighting == KnnWeighting::kInverseDistance
                         ? "inverse"
                         : "distance-normalized";
    j["jobs"] = c.jobs;
    j["experiments"] = nlohmann::json::array();
    for (const auto& e : c.experiments) {
        nlohmann::json je;
        je["name"] = e.name;
        je["agent"] = e.random_agent ? "random" : "goblend";
        je["channel"] = channel_name(e.channel);
        je["selection"] = strategy_name(e.strategy);
        if (e.iterations) je["iterations"] = *e.iterations;
        if (e.runs) je["runs"] = *e.runs;
        j["experiments"].push_back(je);
    }
    return j;
}

void write_result_json(const std::filesystem::path& path, const ExperimentSpec& spec,
                       int run_index, const RunResult& result,
                       const ExperimentConfig& config) {
    nlohmann::json j;
    j["experiment"] = spec.name;
    j["agent"] = spec.random_agent ? "random" : "goblend";
    j["run"] = run_index;
    j["seed"] = result.seed;
    j["channel"] = channel_name(config.channel);
    j["selection"] = strategy_name(config.strategy);
    j["iterations"] = config.iterations;
    j["burst"] = config.burst;
    j["k"] = config.knn.k;
    j["total_ticks"] = result.total_ticks;
    j["total_offers"] = result.total_offers;
    j["total_selections"] = result.total_selections;
    j["wall_seconds"] = result.wall_seconds;

    const SummaryRow& row = result.summary;
    j["summary"] = {
        {"final_score", row.final_score},
        {"behavior_ccc", row.behavior_ccc},
        {"mean_arousal", row.mean_arousal},
        {"arousal_ccc", row.arousal_ccc},
        {"arousal_deviation", row.arousal_deviation},
        {"confidence", row.confidence},
        {"offroad_pct", row.offroad_pct},
        {"avg_speed", row.avg_speed},
    };
    if (row.archive_fill_pct >= 0.0) {
        j["summary"]["archive_fill_pct"] = row.archive_fill_pct;
    }

    nlohmann::json best;
    best["score"] = result.best.r_b;
    best["affect_reward"] = result.best.r_a;
    best["length"] = result.best.length();
    best["terminal"] = result.best.terminal;
    nlohmann::json codes = nlohmann::json::array();
    for (const auto c : result.best.trajectory) codes.push_back(static_cast<int>(c));
    best["trajectory"] = std::move(codes);
    j["best"] = std::move(best);

    std::ofstream out(path);
    out << j.dump(1) << "\n";
}

void write_best_trace_csv(const std::filesystem::path& path, const Environment& env,
                          const RunResult& result, const TargetTrace& target) {
    const ReplayTrace replay = replay_trajectory(env, result.best.trajectory);
    std::ofstream out(path);
    out << "window,h_a,t_a,c_a,score,offroad,speed\n";
    for (std::size_t w = 0; w < result.best.trajectory.size(); ++w) {
        out << w << ',' << fmt(result.best.arousal.h[w]) << ',' << fmt(target.mean[w]) << ','
            << fmt(target.ci[w]) << ',' << fmt(replay.score[w]) << ',' << fmt(replay.offroad[w])
            << ',' << fmt(replay.speed[w]) << '\n';
    }
}

struct Aggregate {
    double mean = 0.0;
    double ci = 0.0;
};

Aggregate aggregate(const std::vector<double>& values) {
    Aggregate a;
    if (values.empty()) return a;
    for (double v : values) a.mean += v;
    a.mean /= static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) {
            const double d = v - a.mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
        a.ci = 1.96 * sd / std::sqrt(static_cast<double>(values.size()));
    }
    return a;
}

} // namespace

std::vector<ExperimentSpec> SuiteConfig::default_experiments() {
    std::vector<ExperimentSpec> out;
    ExperimentSpec random;
    random.name = "random";
    random.random_agent = true;
    out.push_back(random);
    const std::pair<const char*, RewardChannel> rows[] = {
        {"max_score", RewardChannel::kScore},
        {"max_arousal", RewardChannel::kMaxArousal},
        {"ra", RewardChannel::kRa},
        {"rau", RewardChannel::kRau},
        {"rac", RewardChannel::kRac},
    };
    for (const auto& [name, channel] : rows) {
        ExperimentSpec spec;
        spec.name = name;
        spec.channel = channel;
        out.push_back(spec);
    }
    return out;
}

SuiteConfig SuiteConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid config JSON in " + path.string() + ": " + e.what());
    }

    static const char* known[] = {"dataset", "track",   "seed",       "iterations",
                                  "runs",    "burst",   "k",          "epsilon",
                                  "weighting", "jobs",  "experiments"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown config key '" + key + "' in " + path.string());
    }

    SuiteConfig c;
    c.dataset_dir = j.at("dataset").get<std::string>();
    c.track_path = j.at("track").get<std::string>();
    c.master_seed = j.value("seed", 0ULL);
    c.iterations = j.value("iterations", c.iterations);
    c.runs = j.value("runs", c.runs);
    c.burst = j.value("burst", c.burst);
    c.knn.k = j.value("k", c.knn.k);
    c.knn.epsilon = j.value("epsilon", c.knn.epsilon);
    if (j.contains("weighting")) {
        const std::string w = j["weighting"].get<std::string>();
        if (w == "inverse") {
            c.knn.weighting = KnnWeighting::kInverseDistance;
        } else if (w == "distance-normalized") {
            c.knn.weighting = KnnWeighting::kDistanceNormalized;
        } else {
            throw ConfigError("unknown weighting '" + w + "'");
        }
    }
    c.jobs = j.value("jobs", 1);
    if (j.contains("experiments")) {
        for (const auto& je : j["experiments"]) {
            c.experiments.push_back(parse_experiment(je));
        }
    } else {
        c.experiments = default_experiments();
    }

    // Relative data paths resolve against the config file's directory.
    const auto base = path.parent_path();
    if (c.dataset_dir.is_relative()) c.dataset_dir = base / c.dataset_dir;
    if (c.track_path.is_relative()) c.track_path = base / c.track_path;
    return c;
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, std::string_view name,
                              int run_index) {
    std::uint64_t h = fnv1a64(&master_seed, sizeof master_seed);
    h = fnv1a64(name.data(), name.size(), h);
    const std::uint8_t sep = 0x1f;
    h = fnv1a64(&sep, 1, h);
    h = fnv1a64(&run_index, sizeof run_index, h);
    return h;
}

SuiteResult run_suite(const SuiteConfig& config) {
    if (config.experiments.empty()) {
        throw ConfigError("suite has no experiments");
    }
    std::vector<std::string> names;
    for (const auto& e : config.experiments) {
        for (const auto& n : names) {
            if (n == e.name) throw ConfigError("duplicate experiment name '" + e.name + "'");
        }
        names.push_back(e.name);
    }

    std::vector<const ExperimentSpec*> selected;
    for (const auto& e : config.experiments) {
        if (config.only.empty() || config.only == e.name) selected.push_back(&e);
    }
    if (selected.empty()) {
        throw ConfigError("no experiment named '" + config.only + "' in the suite");
    }

    const Environment env = Environment::from_file(config.track_path);
    const std::vector<DemoSession> sessions = load_dataset(config.dataset_dir);
    const KnnIndex knn(sessions);
    const TargetTrace target = target_trace(sessions);
    const ActionFrequency freq = action_frequencies(sessions);
    const std::vector<double> expert_score = mean_expert_score_trace(sessions);
    const ExplorerContext ctx{env, knn, target, freq, expert_score};

    std::filesystem::create_directories(config.out_dir);
    {
        std::ofstream echo(config.out_dir / "config.json");
        echo << echo_config(config).dump(1) << "\n";
    }

    struct Task {
        const ExperimentSpec* spec;
        int run_index;
        std::uint64_t seed;
        ExperimentConfig config;
    };
    std::vector<Task> tasks;
    for (const ExperimentSpec* spec : selected) {
        const int runs = spec->runs.value_or(config.runs);
        for (int r = 0; r < runs; ++r) {
            Task t;
            t.spec = spec;
            t.run_index = r;
            t.seed = derive_run_seed(config.master_seed, spec->name, r);
            t.config.channel = spec->channel;
            t.config.strategy = spec->strategy;
            t.config.iterations = spec->iterations.value_or(config.iterations);
            t.config.burst = config.burst;
            t.config.runs = runs;
            t.config.knn = config.knn;
            tasks.push_back(t);
        }
    }

    std::vector<SuiteRunSummary> summaries(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    const auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size() || failed.load()) break;
            const Task& task = tasks[i];
            try {
                RunResult result = task.spec->random_agent
                                       ? random_baseline(ctx, task.config, task.seed)
                                       : run_experiment(ctx, task.config, task.seed);

                const auto run_dir =
                    config.out_dir / "runs" / task.spec->name / std::to_string(task.run_index);
                std::filesystem::create_directories(run_dir);
                write_result_json(run_dir / "result.json", *task.spec, task.run_index, result,
                                  task.config);
                write_best_trace_csv(run_dir / "best_trace.csv", env, result, target);
                if (result.archive) {
                    std::ofstream dump(run_dir / "archive.jsonl");
                    result.archive->dump_jsonl(dump);
                }

                summaries[i] = SuiteRunSummary{task.spec->name, task.run_index, task.seed,
                                               result.summary};
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure.empty()) {
                    failure = task.spec->name + "/" + std::to_string(task.run_index) + ": " +
                              e.what();
                }
                break;
            }
        }
    };

    const int jobs = std::max(1, config.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) {
        throw ConfigError("run failed: " + failure);
    }

    // Aggregate per experiment, in suite order.
    SuiteResult suite;
    suite.runs = summaries;
    const auto csv_path = config.out_dir / "summary.csv";
    std::ofstream csv(csv_path);
    csv << "experiment,runs";
    static const char* metrics[] = {"final_score",       "behavior_ccc", "mean_arousal",
                                    "arousal_ccc",       "arousal_deviation", "confidence",
                                    "archive_fill_pct",  "offroad_pct",  "avg_speed"};
    for (const char* m : metrics) csv << ',' << m << "_mean," << m << "_ci";
    csv << '\n';

    for (const ExperimentSpec* spec : selected) {
        std::vector<SummaryRow> rows;
        for (const auto& s : summaries) {
            if (s.experiment == spec->name) rows.push_back(s.row);
        }
        csv << spec->name << ',' << rows.size();
        const auto emit = [&](auto getter, bool optional_field) {
            std::vector<double> values;
            for (const auto& r : rows) {
                const double v = getter(r);
                if (!(optional_field && v < 0.0)) values.push_back(v);
            }
            if (values.empty()) {
                csv << ",,";
                return;
            }
            const Aggregate a = aggregate(values);
            csv << ',' << fmt(a.mean) << ',' << fmt(a.ci);
        };
        emit([](const SummaryRow& r) { return r.final_score; }, false);
        emit([](const SummaryRow& r) { return r.behavior_ccc; }, false);
        emit([](const SummaryRow& r) { return r.mean_arousal; }, false);
        emit([](const SummaryRow& r) { return r.arousal_ccc; }, false);
        emit([](const SummaryRow& r) { return r.arousal_deviation; }, false);
        emit([](const SummaryRow& r) { return r.confidence; }, false);
        emit([](const SummaryRow& r) { return r.archive_fill_pct; }, true);
        emit([](const SummaryRow& r) { return r.offroad_pct; }, false);
        emit([](const SummaryRow& r) { return r.avg_speed; }, false);
        csv << '\n';
    }
    suite.summary_csv = csv_path;
    return suite;
}

} // namespace goblend
