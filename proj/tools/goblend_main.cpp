// goblend: archive-driven exploration experiments on the MicroRally track.
//
// Subcommands:
//   run       execute an experiment suite and write summary.csv + artifacts
//   gen-data  generate a synthetic demonstration dataset

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "goblend/experiment.hpp"
#include "goblend/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Go-Blend exploration experiments (MicroRally)"};
    app.require_subcommand(1);

    // --- run ---
    auto* run = app.add_subcommand("run", "Run an experiment suite");
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int runs = -1;
    std::int64_t iterations = -1;
    std::string only;
    int jobs = 0;
    run->add_option("--config", config_path, "Suite config JSON")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--runs", runs, "Override runs per experiment");
    run->add_option("--iterations", iterations, "Override iterations per run");
    run->add_option("--only", only, "Run only the named experiment");
    run->add_option("--jobs", jobs, "Parallel runs (default: config value)");

    // --- gen-data ---
    auto* gen = app.add_subcommand("gen-data", "Generate a synthetic demo dataset");
    std::string track_path;
    std::string gen_out = "data/demos/default";
    std::uint64_t gen_seed = 0;
    int sessions = 27;
    double sigma_eta = 0.05;
    bool no_distort = false;
    gen->add_option("--track", track_path, "Track JSON file")->required();
    gen->add_option("--out", gen_out, "Dataset output directory");
    gen->add_option("--seed", gen_seed, "Generation seed");
    gen->add_option("--sessions", sessions, "Number of sessions");
    gen->add_option("--sigma-eta", sigma_eta, "Ground-truth noise std");
    gen->add_flag("--no-distort", no_distort, "Skip per-session affine distortion");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            goblend::SuiteConfig config = goblend::SuiteConfig::from_file(config_path);
            config.out_dir = out_dir;
            if (run->count("--seed")) config.master_seed = seed;
            if (runs > 0) config.runs = runs;
            if (iterations > 0) config.iterations = static_cast<std::uint64_t>(iterations);
            if (!only.empty()) config.only = only;
            if (jobs > 0) config.jobs = jobs;

            const goblend::SuiteResult result = goblend::run_suite(config);
            std::cout << "wrote " << result.summary_csv.string() << " ("
                      << result.runs.size() << " runs)\n";
        } else if (*gen) {
            const goblend::Environment env = goblend::Environment::from_file(track_path);
            goblend::SyntheticConfig config;
            config.sessions = sessions;
            config.sigma_eta = sigma_eta;
            config.distort = !no_distort;
            const goblend::GenerationResult result =
                goblend::generate_synthetic(env, config, gen_seed, gen_out);
            std::cout << "wrote " << result.session_files.size() << " sessions ("
                      << result.windows_min << ".." << result.windows_max
                      << " windows) and " << result.manifest.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
