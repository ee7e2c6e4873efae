#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "goblend/environment.hpp"
#include "goblend/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace goblend;
using namespace goblend::testing;

TEST_CASE("reset defines the start state") {
    const Environment& env = default_env();
    const Snapshot s = env.reset();
    CHECK(s.score == 0);
    CHECK(s.windows == 0);
    CHECK(s.speed == 0.0);
    CHECK(s.lap == 1);
    CHECK_FALSE(s.terminal);
    CHECK(s.opponent_s.size() == 3);
}

TEST_CASE("reset is deterministic, byte for byte") {
    const Environment& env = default_env();
    CHECK(env.reset().to_bytes() == env.reset().to_bytes());
}

TEST_CASE("reset cell key: slow, aligned, segment 0, on-road right, lap 1, far") {
    const Environment& env = default_env();
    const CellKey key = env.cell_key(env.reset());
    CHECK_FALSE(key.fast);
    CHECK(key.rotation == 0);
    CHECK(key.segment == 0);
    CHECK(key.sub == SubSegment::kRight);
    CHECK(key.lap == 1);
    CHECK_FALSE(key.near_opponent);
}

TEST_CASE("cell key is a pure function of the snapshot") {
    const Environment& env = default_env();
    Snapshot s = env.reset();
    s = env.tick(s, Action(1, 0)).snapshot;
    CHECK(env.cell_key(s) == env.cell_key(s));

    Snapshot fast = s;
    fast.speed = env.physics().v_max;
    CHECK(env.cell_key(fast).fast);
    fast.speed = env.physics().v_max * 0.5; // threshold is inclusive
    CHECK(env.cell_key(fast).fast);
    fast.speed = env.physics().v_max * 0.49;
    CHECK_FALSE(env.cell_key(fast).fast);
}

TEST_CASE("full throttle on the start straight accelerates monotonically to v_max") {
    const Environment& env = default_env();
    Snapshot s = env.reset();
    double prev = 0.0;
    bool hit_cap = false;
    for (int w = 0; w < 16; ++w) {
        s = env.tick(s, Action(1, 0)).snapshot;
        CHECK(s.speed >= prev - 1e-12);
        prev = s.speed;
        if (s.speed == env.physics().v_max) hit_cap = true;
    }
    CHECK(hit_cap);
}

TEST_CASE("idle car never scores and terminates at the horizon") {
    const Environment& env = default_env();
    Snapshot s = env.reset();
    int windows = 0;
    while (!s.terminal) {
        const StepResult step = env.tick(s, Action(0, 0));
        CHECK(step.score_delta == 0);
        s = step.snapshot;
        ++windows;
    }
    CHECK(windows == kMaxWindows);
    CHECK(s.score == 0);
    CHECK_THROWS_AS(env.tick(s, Action(0, 0)), ContractViolation);
}

TEST_CASE("full-throttle straight-line distance matches the scalar recurrence") {
    const Environment& env = default_env();
    const PhysicsParams& ph = env.physics();
    Snapshot s = env.reset();
    const double x0 = s.x;
    for (int w = 0; w < 10; ++w) {
        s = env.tick(s, Action(1, 0)).snapshot;
    }
    const ScalarRollout oracle = straight_line_oracle(
        ph.a_gas, ph.drag, ph.v_max, ph.window_seconds / ph.n_sub, 10 * ph.n_sub);
    CHECK(s.x - x0 == doctest::Approx(oracle.distance).epsilon(1e-12));
    CHECK(s.speed == doctest::Approx(oracle.speed).epsilon(1e-12));
    CHECK(s.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("snapshot serialization round-trips exactly") {
    const Environment& env = default_env();
    Rng rng(11);
    Snapshot s = env.reset();
    for (int w = 0; w < 50; ++w) {
        const Action a(static_cast<int>(rng.below(3)) - 1, static_cast<int>(rng.below(3)) - 1);
        s = env.tick(s, a).snapshot;
        const Snapshot back = Snapshot::from_bytes(s.to_bytes());
        CHECK(back == s);
        CHECK(back.to_bytes() == s.to_bytes());
    }
}

TEST_CASE("replay reproduces features and snapshots bit-exactly") {
    const Environment& env = default_env();
    Rng rng(23);
    std::vector<Action> actions;
    for (int w = 0; w < 120; ++w) {
        actions.emplace_back(static_cast<int>(rng.below(3)) - 1,
                             static_cast<int>(rng.below(3)) - 1);
    }

    std::vector<FeatureVector> feats;
    Snapshot s = env.reset();
    for (const Action& a : actions) {
        StepResult step = env.tick(s, a);
        feats.push_back(step.features);
        s = std::move(step.snapshot);
    }
    const auto final_bytes = s.to_bytes();

    // Replay from scratch.
    Snapshot r = env.reset();
    for (std::size_t i = 0; i < actions.size(); ++i) {
        StepResult step = env.tick(r, actions[i]);
        CHECK(step.features == feats[i]);
        r = std::move(step.snapshot);
    }
    CHECK(r.to_bytes() == final_bytes);

    // Restore mid-way from serialized bytes and continue.
    Snapshot h = env.reset();
    for (std::size_t i = 0; i < 60; ++i) {
        h = env.tick(h, actions[i]).snapshot;
    }
    Snapshot restored = Snapshot::from_bytes(h.to_bytes());
    for (std::size_t i = 60; i < actions.size(); ++i) {
        restored = env.tick(restored, actions[i]).snapshot;
    }
    CHECK(restored.to_bytes() == final_bytes);
}

TEST_CASE("an expert session scores 8 per lap, monotonically, up to 16") {
    const Environment& env = default_env();
    const auto sessions = tmp_dataset(2, 99);
    const DemoSession& demo = sessions.front();

    Snapshot s = env.reset();
    int prev_score = 0;
    int lap1_increments = 0;
    for (const Action& a : demo.actions) {
        const StepResult step = env.tick(s, a);
        CHECK(step.snapshot.score >= prev_score);
        CHECK(step.snapshot.score <= kMaxScore);
        if (step.snapshot.lap == 1 || (step.snapshot.lap == 2 && prev_score < 8)) {
            lap1_increments += step.score_delta;
        }
        prev_score = step.snapshot.score;
        s = step.snapshot;
        if (s.terminal) break;
    }
    CHECK(s.score == kMaxScore);
    CHECK(lap1_increments >= 8); // exactly 8 before lap 2 starts
}

TEST_CASE("fully off-road windows respect the off-road speed cap") {
    const Environment& env = default_env();
    Snapshot s = env.reset();
    // Steer hard left at full throttle to leave the road, then drive on.
    int offroad_streak = 0;
    bool checked = false;
    for (int w = 0; w < 80; ++w) {
        const StepResult step = env.tick(s, Action(1, w < 6 ? 1 : 0));
        if (step.features[kFeatOffroad] == 1.0) {
            ++offroad_streak;
            if (offroad_streak >= 2) {
                CHECK(step.features[kFeatSpeed] * env.physics().v_max <=
                      env.physics().v_off + 1e-9);
                checked = true;
            }
        } else {
            offroad_streak = 0;
        }
        s = step.snapshot;
    }
    CHECK(checked);
}

TEST_CASE("key space bound is the product of the categorical cardinalities") {
    const Environment& env = default_env();
    CHECK(env.geometry().segment_count() == 19);
    CHECK(env.key_space_bound() == 2u * 6u * 19u * 4u * 2u * 2u);
}

TEST_CASE("feature vectors stay within [0, 1]") {
    const Environment& env = default_env();
    Rng rng(5);
    Snapshot s = env.reset();
    for (int w = 0; w < 200 && !s.terminal; ++w) {
        const StepResult step = env.tick(
            s, Action(static_cast<int>(rng.below(3)) - 1, static_cast<int>(rng.below(3)) - 1));
        for (const double f : step.features) {
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
        }
        s = step.snapshot;
    }
}

TEST_CASE("track loading validates structure") {
    CHECK_THROWS_AS(Environment::from_file("no_such_track.json"), ConfigError);

    // A straight-only segment list cannot close.
    std::vector<Segment> open_loop(3);
    for (auto& seg : open_loop) {
        seg.shape = SegmentShape::kStraight;
        seg.length = 10.0;
    }
    CHECK_THROWS_AS(TrackGeometry{open_loop}, ConfigError);

    // Wrong checkpoint count is rejected even for a closed loop.
    TrackSpec spec = TrackSpec::load(default_track_path());
    for (auto& seg : spec.segments) seg.checkpoint = false;
    CHECK_THROWS_AS(TrackGeometry{spec.segments}, ConfigError);
}
