#pragma once

#include <filesystem>
#include <string>

#include "goblend/dataset.hpp"
#include "goblend/environment.hpp"
#include "goblend/synthetic.hpp"

#ifndef GOBLEND_SOURCE_DIR
#error "GOBLEND_SOURCE_DIR must be defined by the build"
#endif

namespace goblend::testing {

inline std::filesystem::path source_dir() { return GOBLEND_SOURCE_DIR; }

inline std::filesystem::path default_track_path() {
    return source_dir() / "data" / "tracks" / "microrally.json";
}

inline const Environment& default_env() {
    static const Environment env = Environment::from_file(default_track_path());
    return env;
}

// Generates (once per process and parameter set) a synthetic dataset under
// the build tree and returns its directory.
inline std::filesystem::path tmp_dataset_dir(int sessions, std::uint64_t seed,
                                             double sigma_eta = 0.05, bool distort = true) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("goblend_test_data_" + std::to_string(sessions) + "_" +
                      std::to_string(seed) + "_" + std::to_string(sigma_eta) + "_" +
                      (distort ? "d1" : "d0"));
    const auto marker = dir / "manifest.json";
    if (!std::filesystem::exists(marker)) {
        SyntheticConfig config;
        config.sessions = sessions;
        config.sigma_eta = sigma_eta;
        config.distort = distort;
        generate_synthetic(default_env(), config, seed, dir);
    }
    return dir;
}

inline std::vector<DemoSession> tmp_dataset(int sessions, std::uint64_t seed,
                                            double sigma_eta = 0.05, bool distort = true) {
    return load_dataset(tmp_dataset_dir(sessions, seed, sigma_eta, distort));
}

} // namespace goblend::testing
