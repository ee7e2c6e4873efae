#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "goblend/metrics.hpp"
#include "goblend/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace goblend;
using namespace goblend::testing;

namespace {

std::vector<double> random_series(Rng& rng, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = rng.uniform(-2.0, 3.0);
    return v;
}

} // namespace

TEST_CASE("ccc basics") {
    const std::vector<double> x = {0.1, 0.4, 0.9, 0.3};
    CHECK(ccc(x, x) == doctest::Approx(1.0).epsilon(1e-12));

    // Mirror around the common mean: perfect discordance.
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    std::vector<double> mirrored;
    for (double v : x) mirrored.push_back(2.0 * mean - v);
    CHECK(ccc(x, mirrored) == doctest::Approx(-1.0).epsilon(1e-12));

    const std::vector<double> c1 = {0.5, 0.5, 0.5};
    CHECK(ccc(c1, c1) == 1.0);
    const std::vector<double> c2 = {0.7, 0.7, 0.7};
    CHECK(ccc(c1, c2) == 0.0);

    const std::vector<double> shorter = {0.1, 0.2};
    CHECK_THROWS_AS(ccc(x, shorter), ContractViolation);
}

TEST_CASE("ccc matches an independently coded formula on random pairs") {
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto x = random_series(rng, 100);
        const auto y = random_series(rng, 100);
        CHECK(ccc(x, y) == doctest::Approx(ccc_oracle(x, y)).epsilon(1e-9));
    }
}

TEST_CASE("ccc symmetry, attenuation and affine invariance") {
    Rng rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = random_series(rng, 64);
        const auto y = random_series(rng, 64);
        CHECK(ccc(x, y) == doctest::Approx(ccc(y, x)).epsilon(1e-12));
        CHECK(std::abs(ccc(x, y)) <= std::abs(pearson(x, y)) + 1e-12);
        CHECK(ccc(x, y) >= -1.0 - 1e-12);
        CHECK(ccc(x, y) <= 1.0 + 1e-12);

        const double a = 0.5 + rng.uniform01();
        const double b = rng.uniform(-1.0, 1.0);
        std::vector<double> xt, yt;
        for (double v : x) xt.push_back(a * v + b);
        for (double v : y) yt.push_back(a * v + b);
        CHECK(ccc(xt, yt) == doctest::Approx(ccc(x, y)).epsilon(1e-9));
    }
}

TEST_CASE("pearson basics") {
    const std::vector<double> x = {1.0, 2.0, 4.0, 8.0};
    CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    CHECK(pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));
    const std::vector<double> flat = {0.3, 0.3, 0.3, 0.3};
    CHECK(pearson(x, flat) == 0.0);
}

TEST_CASE("summarize: trace identical to target gives perfect agreement") {
    const Environment& env = default_env();
    const auto sessions = tmp_dataset(3, 51);
    const DemoSession& demo = sessions.front();

    // Hand-built target with wide bands; predictions placed exactly on it.
    TargetTrace target;
    for (int w = 0; w < kMaxWindows; ++w) {
        target.mean.push_back(0.3 + 0.4 * std::sin(w * 0.05) * std::sin(w * 0.05));
        target.stddev.push_back(0.1);
        target.ci.push_back(0.05);
    }

    CellRecord best;
    Snapshot snap = env.reset();
    for (const Action& a : demo.actions) {
        const StepResult step = env.tick(snap, a);
        best.trajectory.push_back(static_cast<std::uint8_t>(a.code()));
        best.arousal.extend(
            ArousalEstimate{target.mean[best.arousal.windows()], 0.2}, target);
        snap = step.snapshot;
        if (snap.terminal) break;
    }
    best.snapshot = snap;
    best.r_b = snap.score;

    const std::vector<double> expert = mean_expert_score_trace(sessions);
    const SummaryRow row = summarize(env, best, target, expert, 42.0);

    CHECK(row.arousal_ccc == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(row.confidence == 1.0);
    CHECK(row.final_score == 16.0);
    CHECK(row.arousal_deviation == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(row.archive_fill_pct == 42.0);
    CHECK(row.behavior_ccc > 0.9); // expert actions against the expert mean
    CHECK(row.avg_speed > 0.0);
    CHECK(row.offroad_pct >= 0.0);
}

TEST_CASE("offroad driving correlates positively with synthetic arousal") {
    const auto sessions = tmp_dataset(8, 314);
    std::vector<double> offroad, arousal;
    for (const auto& s : sessions) {
        for (int w = 0; w < s.window_count(); ++w) {
            offroad.push_back(s.window_features(w)[kFeatOffroad]);
            arousal.push_back(s.arousal[static_cast<std::size_t>(w)]);
        }
    }
    CHECK(pearson(offroad, arousal) > 0.0);
}
