#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "goblend/environment.hpp"
#include "goblend/experiment.hpp"
#include "goblend/metrics.hpp"
#include "goblend/synthetic.hpp"

namespace py = pybind11;
using namespace goblend;

namespace {

// Read-only bundle backing the surrogate and reward queries from python.
struct Dataset {
    std::vector<DemoSession> sessions;
    KnnIndex knn;
    TargetTrace target;
    ActionFrequency freq;

    explicit Dataset(const std::string& dir)
        : sessions(load_dataset(dir)), knn(sessions), target(target_trace(sessions)),
          freq(action_frequencies(sessions)) {}
};

py::dict summary_to_dict(const SummaryRow& row) {
    py::dict d;
    d["final_score"] = row.final_score;
    d["behavior_ccc"] = row.behavior_ccc;
    d["mean_arousal"] = row.mean_arousal;
    d["arousal_ccc"] = row.arousal_ccc;
    d["arousal_deviation"] = row.arousal_deviation;
    d["confidence"] = row.confidence;
    if (row.archive_fill_pct >= 0.0) d["archive_fill_pct"] = row.archive_fill_pct;
    d["offroad_pct"] = row.offroad_pct;
    d["avg_speed"] = row.avg_speed;
    return d;
}

py::dict result_to_dict(const RunResult& result) {
    py::dict d;
    d["seed"] = result.seed;
    d["total_ticks"] = result.total_ticks;
    d["total_offers"] = result.total_offers;
    d["best_score"] = result.best.r_b;
    d["best_affect_reward"] = result.best.r_a;
    d["best_length"] = result.best.length();
    std::vector<int> codes(result.best.trajectory.begin(), result.best.trajectory.end());
    d["best_trajectory"] = codes;
    d["summary"] = summary_to_dict(result.summary);
    if (result.fill_ratio >= 0.0) d["fill_ratio"] = result.fill_ratio;
    return d;
}

ExperimentConfig make_config(const std::string& channel, const std::string& selection,
                             std::uint64_t iterations, int burst, int k) {
    ExperimentConfig config;
    config.channel = channel_from_name(channel);
    config.strategy = strategy_from_name(selection);
    config.iterations = iterations;
    config.burst = burst;
    config.knn.k = k;
    return config;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Go-Blend exploration core: deterministic racing environment, "
              "k-NN arousal surrogate, archive search and metrics.";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<InsufficientData>(m, "InsufficientDataError");

    py::class_<Environment>(m, "Environment")
        .def(py::init([](const std::string& track_path) {
                 return Environment::from_file(track_path);
             }),
             py::arg("track_path"))
        .def("reset",
             [](const Environment& env) {
                 const auto bytes = env.reset().to_bytes();
                 return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
             })
        .def(
            "tick",
            [](const Environment& env, const py::bytes& snapshot, int gas, int steer) {
                const std::string raw = snapshot;
                const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
                const StepResult step =
                    env.tick(Snapshot::from_bytes(bytes), Action(gas, steer));
                const auto out = step.snapshot.to_bytes();
                return py::make_tuple(
                    py::bytes(reinterpret_cast<const char*>(out.data()), out.size()),
                    std::vector<double>(step.features.begin(), step.features.end()),
                    step.score_delta, step.terminal);
            },
            py::arg("snapshot"), py::arg("gas"), py::arg("steer"))
        .def("cell_key",
             [](const Environment& env, const py::bytes& snapshot) {
                 const std::string raw = snapshot;
                 const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
                 return env.cell_key(Snapshot::from_bytes(bytes)).to_string();
             })
        .def("score",
             [](const Environment&, const py::bytes& snapshot) {
                 const std::string raw = snapshot;
                 const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
                 return static_cast<int>(Snapshot::from_bytes(bytes).score);
             })
        .def("key_space_bound", &Environment::key_space_bound)
        .def_property_readonly("feature_count", [](const Environment&) { return kFeatureCount; })
        .def_property_readonly("max_windows", [](const Environment&) { return kMaxWindows; })
        .def_property_readonly("max_score", [](const Environment&) { return kMaxScore; });

    py::class_<Dataset>(m, "Dataset")
        .def(py::init<const std::string&>(), py::arg("directory"))
        .def_property_readonly("size", [](const Dataset& d) { return d.knn.size(); })
        .def_property_readonly("session_count",
                               [](const Dataset& d) { return d.sessions.size(); })
        .def(
            "knn_estimate",
            [](const Dataset& d, const std::vector<double>& features, int k) {
                KnnConfig config;
                config.k = k;
                const ArousalEstimate est = d.knn.estimate(features, config);
                return py::make_tuple(est.h_a, est.sigma);
            },
            py::arg("features"), py::arg("k") = 5)
        .def("target_mean", [](const Dataset& d) { return d.target.mean; })
        .def("target_ci", [](const Dataset& d) { return d.target.ci; })
        .def("action_frequencies",
             [](const Dataset& d) {
                 return std::vector<double>(d.freq.p.begin(), d.freq.p.end());
             });

    m.def("similarity", &similarity, py::arg("h"), py::arg("t"));
    m.def(
        "ccc",
        [](const std::vector<double>& x, const std::vector<double>& y) { return ccc(x, y); },
        py::arg("x"), py::arg("y"));
    m.def(
        "pearson",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            return pearson(x, y);
        },
        py::arg("x"), py::arg("y"));

    m.def(
        "generate_synthetic",
        [](const std::string& track_path, const std::string& out_dir, int sessions,
           std::uint64_t seed, double sigma_eta, bool distort) {
            const Environment env = Environment::from_file(track_path);
            SyntheticConfig config;
            config.sessions = sessions;
            config.sigma_eta = sigma_eta;
            config.distort = distort;
            const GenerationResult result = generate_synthetic(env, config, seed, out_dir);
            return result.manifest.string();
        },
        py::arg("track_path"), py::arg("out_dir"), py::arg("sessions") = 27,
        py::arg("seed") = 0, py::arg("sigma_eta") = 0.05, py::arg("distort") = true);

    m.def(
        "run_experiment",
        [](const std::string& track_path, const std::string& dataset_dir,
           const std::string& channel, const std::string& selection,
           std::uint64_t iterations, int burst, int k, std::uint64_t seed) {
            const Environment env = Environment::from_file(track_path);
            const Dataset data(dataset_dir);
            const std::vector<double> expert = mean_expert_score_trace(data.sessions);
            const ExplorerContext ctx{env, data.knn, data.target, data.freq, expert};
            const RunResult result =
                run_experiment(ctx, make_config(channel, selection, iterations, burst, k),
                               seed);
            return result_to_dict(result);
        },
        py::arg("track_path"), py::arg("dataset_dir"), py::arg("channel") = "score",
        py::arg("selection") = "uniform", py::arg("iterations") = 1000, py::arg("burst") = 25,
        py::arg("k") = 5, py::arg("seed") = 0);

    m.def(
        "random_baseline",
        [](const std::string& track_path, const std::string& dataset_dir,
           std::uint64_t iterations, int burst, int k, std::uint64_t seed) {
            const Environment env = Environment::from_file(track_path);
            const Dataset data(dataset_dir);
            const std::vector<double> expert = mean_expert_score_trace(data.sessions);
            const ExplorerContext ctx{env, data.knn, data.target, data.freq, expert};
            const RunResult result = random_baseline(
                ctx, make_config("score", "uniform", iterations, burst, k), seed);
            return result_to_dict(result);
        },
        py::arg("track_path"), py::arg("dataset_dir"), py::arg("iterations") = 1000,
        py::arg("burst") = 25, py::arg("k") = 5, py::arg("seed") = 0);

    m.def("derive_run_seed", &derive_run_seed, py::arg("master_seed"), py::arg("name"),
          py::arg("run_index"));
}
