#include "goblend/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "goblend/rng.hpp"

namespace goblend {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_signed(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

double forward_gap(double from, double to, double total) {
    double d = std::fmod(to - from, total);
    if (d < 0.0) d += total;
    return d;
}

struct SessionParams {
    double lookahead;
    double noise_prob;
    double scale; // raw = scale * g + shift
    double shift;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

GenerationResult generate_synthetic(const Environment& env, const SyntheticConfig& config,
                                    std::uint64_t seed,
                                    const std::filesystem::path& out_dir) {
    if (config.sessions < 1) {
        throw ConfigError("synthetic generation needs at least one session");
    }
    std::filesystem::create_directories(out_dir);

    const TrackGeometry& geom = env.geometry();
    const double total = geom.total_length();
    const double v_max = env.physics().v_max;

    GenerationResult result;
    nlohmann::json manifest;
    manifest["files"] = nlohmann::json::array();
    manifest["F"] = kFeatureCount;
    manifest["T"] = kMaxWindows;
    manifest["seed"] = seed;
    manifest["config"] = {
        {"sessions", config.sessions},
        {"sigma_eta", config.sigma_eta},
        {"distort", config.distort},
        {"base", config.base},
        {"w_offroad", config.w_offroad},
        {"w_curve", config.w_curve},
        {"w_proximity", config.w_proximity},
        {"lookahead", config.lookahead},
        {"lookahead_speed", config.lookahead_speed},
        {"deadband", config.deadband},
        {"lift_angle", config.lift_angle},
        {"avoid_range", config.avoid_range},
        {"avoid_offset", config.avoid_offset},
        {"noise_prob", config.noise_prob},
    };

    result.windows_min = kMaxWindows;
    result.windows_max = 0;

    for (int si = 0; si < config.sessions; ++si) {
        // Independent per-session stream so session count changes do not
        // reshuffle earlier sessions.
        std::uint64_t h = fnv1a64(&seed, sizeof seed);
        h = fnv1a64("session", 7, h);
        h = fnv1a64(&si, sizeof si, h);
        Rng rng(h);

        SessionParams params;
        params.lookahead = config.lookahead + rng.uniform(-1.5, 1.5);
        params.noise_prob = config.noise_prob * rng.uniform(0.5, 1.5);
        // Draws happen unconditionally so distorted and undistorted datasets
        // share identical trajectories for the same seed.
        const double scale_draw = rng.uniform(0.8, 1.6);
        const double shift_draw = rng.uniform(-0.3, 0.4);
        params.scale = config.distort ? scale_draw : 1.0;
        params.shift = config.distort ? shift_draw : 0.0;

        char id[16];
        std::snprintf(id, sizeof id, "%03d", si);
        const auto csv_path = out_dir / (std::string("session_") + id + ".csv");
        const auto truth_path = out_dir / (std::string("session_") + id + ".truth.csv");

        std::ofstream csv(csv_path);
        std::ofstream truth(truth_path);
        if (!csv || !truth) {
            throw ConfigError("cannot write dataset files under " + out_dir.string());
        }
        csv << "window";
        for (int f = 0; f < kFeatureCount; ++f) csv << ",f" << f;
        csv << ",gas,steer,arousal_raw\n";
        truth << "window,g\n";

        Snapshot snap = env.reset();
        int window = 0;
        while (!snap.terminal) {
            const Projection proj = geom.project(snap.x, snap.y);

            // Lookahead target on the centerline, dodging opponents ahead.
            const double ahead =
                std::clamp(params.lookahead + config.lookahead_speed * snap.speed, 6.0, 16.0);
            double lateral_target = 0.0;
            for (int oi = 0; oi < env.opponent_count(); ++oi) {
                const Vec2 op = env.opponent(oi).position(snap.opponent_s[oi]);
                const Projection oproj = geom.project(op.x, op.y);
                const double gap = forward_gap(proj.s, oproj.s, total);
                if (gap < config.avoid_range) {
                    lateral_target = config.avoid_offset;
                    break;
                }
            }
            double tx, ty, th;
            geom.sample(proj.s + ahead, tx, ty, th);
            tx += lateral_target * -std::sin(th);
            ty += lateral_target * std::cos(th);

            const double desired = std::atan2(ty - snap.y, tx - snap.x);
            const double err = wrap_signed(desired - snap.heading);
            int steer = 0;
            if (err > config.deadband) steer = 1;
            if (err < -config.deadband) steer = -1;
            int gas = 1;
            if (std::abs(err) > config.lift_angle && snap.speed > 0.75 * v_max) gas = 0;
            if (rng.uniform01() < params.noise_prob) {
                steer = static_cast<int>(rng.below(3)) - 1;
            }

            const Action action(gas, steer);
            StepResult step = env.tick(snap, action);

            const Projection after = geom.project(step.snapshot.x, step.snapshot.y);
            const bool in_curve = is_curved(geom.segment(after.segment).shape);
            const double eta = config.sigma_eta > 0.0 ? rng.gaussian() * config.sigma_eta : 0.0;
            const double g = std::clamp(config.base +
                                            config.w_offroad * step.features[kFeatOffroad] +
                                            config.w_curve * (in_curve ? 1.0 : 0.0) +
                                            config.w_proximity * step.features[kFeatProximity] +
                                            eta,
                                        0.0, 1.0);
            const double raw = params.scale * g + params.shift;

            csv << window;
            for (int f = 0; f < kFeatureCount; ++f) {
                csv << ',' << fmt(step.features[static_cast<std::size_t>(f)]);
            }
            csv << ',' << static_cast<int>(action.gas) << ',' << static_cast<int>(action.steer)
                << ',' << fmt(raw) << '\n';
            truth << window << ',' << fmt(g) << '\n';

            snap = std::move(step.snapshot);
            ++window;
        }

        if (snap.score < kMaxScore) {
            throw ConfigError("synthetic session " + std::string(id) +
                              " failed to reach the maximum score (got " +
                              std::to_string(static_cast<int>(snap.score)) + " in " +
                              std::to_string(window) + " windows); controller gains are "
                              "not viable for this track");
        }

        result.windows_min = std::min(result.windows_min, window);
        result.windows_max = std::max(result.windows_max, window);
        result.session_files.push_back(csv_path);
        manifest["files"].push_back(csv_path.filename().string());
    }

    const auto manifest_path = out_dir / "manifest.json";
    std::ofstream mf(manifest_path);
    mf << manifest.dump(1) << "\n";
    result.manifest = manifest_path;
    return result;
}

} // namespace goblend
