#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "goblend/environment.hpp"

namespace goblend {

// Synthetic demonstration generation. A scripted waypoint-following
// controller with per-session steering noise plays the track; ground-truth
// arousal is a declared function of game state (coefficients below) and the
// recorded raw arousal is a per-session affine distortion of it.
struct SyntheticConfig {
    int sessions = 27;
    double sigma_eta = 0.05; // per-window Gaussian noise on the ground truth
    bool distort = true;     // apply a per-session affine map to the raw trace

    // Ground-truth arousal coefficients: clamp01(base + w_offroad*offroad +
    // w_curve*in_curve_or_loop + w_proximity*near + eta).
    double base = 0.3;
    double w_offroad = 0.4;
    double w_curve = 0.3;
    double w_proximity = 0.2;

    // Controller gains. Fixed so every session finishes both laps on the
    // default track.
    double lookahead = 7.0;       // base lookahead distance, world units
    double lookahead_speed = 0.5; // extra lookahead per u/s of speed
    double deadband = 0.06;       // rad of heading error tolerated
    double lift_angle = 0.6;      // rad; above this error at speed, lift gas
    double avoid_range = 18.0;    // start dodging an opponent this far ahead
    double avoid_offset = -2.0;   // lateral target while dodging (right side)
    double noise_prob = 0.05;     // chance per window of a random steer
};

struct GenerationResult {
    std::filesystem::path manifest;
    std::vector<std::filesystem::path> session_files;
    int windows_min = 0;
    int windows_max = 0;
};

// Writes session_<id>.csv, session_<id>.truth.csv and manifest.json into
// out_dir. Deterministic for a fixed seed, byte for byte. Throws
// ConfigError if any session fails to reach the maximum score in time.
GenerationResult generate_synthetic(const Environment& env, const SyntheticConfig& config,
                                    std::uint64_t seed,
                                    const std::filesystem::path& out_dir);

} // namespace goblend
