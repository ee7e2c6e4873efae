#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "goblend/dataset.hpp"
#include "goblend/rng.hpp"
#include "goblend/synthetic.hpp"
#include "support/fixtures.hpp"

using namespace goblend;
using namespace goblend::testing;

namespace {

DemoSession make_session(std::vector<double> raw) {
    DemoSession s;
    s.id = "inline";
    s.raw_arousal = std::move(raw);
    for (std::size_t i = 0; i < s.raw_arousal.size(); ++i) {
        s.actions.push_back(Action(1, 0));
        for (int f = 0; f < kFeatureCount; ++f) s.features.push_back(0.0);
    }
    normalize_session(s);
    return s;
}

} // namespace

TEST_CASE("per-session min-max normalization") {
    const DemoSession s = make_session({2.0, 4.0, 6.0});
    CHECK(s.arousal == std::vector<double>{0.0, 0.5, 1.0});
}

TEST_CASE("constant arousal normalizes to the midpoint") {
    const DemoSession s = make_session({3.3, 3.3, 3.3, 3.3});
    CHECK(s.arousal == std::vector<double>{0.5, 0.5, 0.5, 0.5});
}

TEST_CASE("target trace means, stds and confidence intervals") {
    DemoSession a = make_session({0.0, 1.0});
    DemoSession b = make_session({0.0, 1.0});
    a.arousal = {0.2, 0.5};
    b.arousal = {0.4, 0.5};

    const TargetTrace trace = target_trace({a, b}, 4);
    CHECK(trace.mean[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(trace.mean[1] == 0.5);
    // Identical values at window 1: zero spread.
    CHECK(trace.stddev[1] == 0.0);
    CHECK(trace.ci[1] == 0.0);
    // Padding carries the final populated values forward.
    CHECK(trace.mean[2] == trace.mean[1]);
    CHECK(trace.mean[3] == trace.mean[1]);
    CHECK(trace.ci[3] == trace.ci[1]);

    CHECK_THROWS_AS(target_trace({a}, 4), InsufficientData);
}

TEST_CASE("identical sessions give a zero-width confidence band") {
    const auto dir = tmp_dataset_dir(2, 4242);
    auto sessions = load_dataset(dir);
    sessions[1] = sessions[0];
    const TargetTrace trace = target_trace(sessions);
    for (int w = 0; w < sessions[0].window_count(); ++w) {
        CHECK(trace.stddev[static_cast<std::size_t>(w)] == 0.0);
        CHECK(trace.ci[static_cast<std::size_t>(w)] == 0.0);
    }
}

TEST_CASE("27 sessions: confidence interval matches 1.96 s / sqrt(m)") {
    const auto sessions = tmp_dataset(27, 1);
    CHECK(sessions.size() == 27);
    const TargetTrace trace = target_trace(sessions);

    // Independent recomputation with sample statistics.
    for (int w = 0; w < kMaxWindows; w += 17) {
        std::vector<double> vals;
        for (const auto& s : sessions) {
            if (w < s.window_count()) vals.push_back(s.arousal[static_cast<std::size_t>(w)]);
        }
        if (vals.size() < 2) continue;
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double ss = 0.0;
        for (double v : vals) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
        const double ci = 1.96 * sd / std::sqrt(static_cast<double>(vals.size()));
        CHECK(trace.mean[static_cast<std::size_t>(w)] == doctest::Approx(mean).epsilon(1e-12));
        CHECK(trace.ci[static_cast<std::size_t>(w)] == doctest::Approx(ci).epsilon(1e-12));
    }
}

TEST_CASE("target trace is permutation invariant") {
    auto sessions = tmp_dataset(5, 77);
    const TargetTrace a = target_trace(sessions);
    std::reverse(sessions.begin(), sessions.end());
    const TargetTrace b = target_trace(sessions);
    for (int w = 0; w < kMaxWindows; ++w) {
        CHECK(a.mean[static_cast<std::size_t>(w)] ==
              doctest::Approx(b.mean[static_cast<std::size_t>(w)]).epsilon(1e-12));
        CHECK(a.ci[static_cast<std::size_t>(w)] ==
              doctest::Approx(b.ci[static_cast<std::size_t>(w)]).epsilon(1e-12));
    }
}

TEST_CASE("action frequencies") {
    DemoSession point = make_session({0.0, 1.0});
    point.actions = {Action(1, 0), Action(1, 0)};
    const ActionFrequency p = action_frequencies({point});
    CHECK(p.p[static_cast<std::size_t>(Action(1, 0).code())] == 1.0);

    DemoSession two = make_session({0.0, 1.0});
    two.actions = {Action(1, 0), Action(0, 0)};
    const ActionFrequency q = action_frequencies({two});
    CHECK(q.p[static_cast<std::size_t>(Action(1, 0).code())] == 0.5);
    CHECK(q.p[static_cast<std::size_t>(Action(0, 0).code())] == 0.5);

    double total = 0.0;
    for (double v : q.p) {
        CHECK(v >= 0.0);
        total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dataset action frequencies match an independent histogram of the CSVs") {
    const auto dir = tmp_dataset_dir(4, 31);
    const auto sessions = load_dataset(dir);
    const ActionFrequency freq = action_frequencies(sessions);

    std::array<std::uint64_t, Action::kCount> counts{};
    std::uint64_t total = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("session_", 0) != 0 || entry.path().extension() != ".csv" ||
            name.find(".truth.") != std::string::npos) {
            continue;
        }
        std::ifstream in(entry.path());
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            // gas and steer are the 18th and 19th columns.
            std::stringstream ss(line);
            std::string tok;
            int gas = 0, steer = 0;
            for (int col = 0; std::getline(ss, tok, ','); ++col) {
                if (col == 1 + kFeatureCount) gas = std::stoi(tok);
                if (col == 2 + kFeatureCount) steer = std::stoi(tok);
            }
            counts[static_cast<std::size_t>(Action(gas, steer).code())]++;
            ++total;
        }
    }
    for (int c = 0; c < Action::kCount; ++c) {
        const double expected =
            static_cast<double>(counts[static_cast<std::size_t>(c)]) /
            static_cast<double>(total);
        CHECK(freq.p[static_cast<std::size_t>(c)] ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("generation is deterministic, byte for byte") {
    SyntheticConfig config;
    config.sessions = 2;
    const auto dir_a = std::filesystem::temp_directory_path() / "goblend_gen_a";
    const auto dir_b = std::filesystem::temp_directory_path() / "goblend_gen_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    generate_synthetic(default_env(), config, 123, dir_a);
    generate_synthetic(default_env(), config, 123, dir_b);

    for (const char* name : {"session_000.csv", "session_001.csv", "manifest.json",
                             "session_000.truth.csv"}) {
        std::ifstream fa(dir_a / name), fb(dir_b / name);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        REQUIRE(!sa.str().empty());
        CHECK(sa.str() == sb.str());
    }
}

TEST_CASE("noise-free undistorted arousal equals the min-max of the ground truth") {
    const auto dir = tmp_dataset_dir(2, 55, /*sigma_eta=*/0.0, /*distort=*/false);
    const auto sessions = load_dataset(dir);

    for (const auto& session : sessions) {
        std::ifstream truth(dir / (session.id + ".truth.csv"));
        REQUIRE(truth.good());
        std::string line;
        std::getline(truth, line);
        std::vector<double> g;
        while (std::getline(truth, line)) {
            if (line.empty()) continue;
            g.push_back(std::stod(line.substr(line.find(',') + 1)));
        }
        REQUIRE(static_cast<int>(g.size()) == session.window_count());
        const auto [mn, mx] = std::minmax_element(g.begin(), g.end());
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(session.arousal[i] == (g[i] - *mn) / (*mx - *mn));
        }
    }
}

TEST_CASE("per-session normalization cancels affine distortion") {
    const auto plain = tmp_dataset(3, 808, /*sigma_eta=*/0.0, /*distort=*/false);
    const auto distorted = tmp_dataset(3, 808, /*sigma_eta=*/0.0, /*distort=*/true);
    REQUIRE(plain.size() == distorted.size());
    for (std::size_t s = 0; s < plain.size(); ++s) {
        REQUIRE(plain[s].window_count() == distorted[s].window_count());
        for (int w = 0; w < plain[s].window_count(); ++w) {
            CHECK(plain[s].arousal[static_cast<std::size_t>(w)] ==
                  doctest::Approx(distorted[s].arousal[static_cast<std::size_t>(w)])
                      .epsilon(1e-9));
        }
    }
}

TEST_CASE("every generated session reaches the maximum score in time") {
    const auto sessions = tmp_dataset(6, 2024);
    for (const auto& s : sessions) {
        CHECK(s.window_count() <= kMaxWindows);
        // The score feature is substep-averaged, so the final window sits
        // between 15/16 (crossing at the last substep) and 1.
        CHECK(s.window_features(s.window_count() - 1)[kFeatScoreFrac] > 15.0 / 16.0);
    }
}

TEST_CASE("malformed session files raise parse errors naming file and line") {
    const auto dir = std::filesystem::temp_directory_path() / "goblend_bad_csv";
    std::filesystem::create_directories(dir);

    {
        std::ofstream out(dir / "session_000.csv");
        out << "window";
        for (int f = 0; f < kFeatureCount; ++f) out << ",f" << f;
        out << ",gas,steer,arousal_raw\n";
        out << "0,0.1,0.2\n"; // wrong column count
    }
    try {
        load_session_csv(dir / "session_000.csv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("session_000.csv") != std::string::npos);
        CHECK(msg.find(":2") != std::string::npos);
    }

    {
        std::ofstream out(dir / "session_001.csv");
        out << "window";
        for (int f = 0; f < kFeatureCount; ++f) out << ",f" << f;
        out << ",gas,steer,arousal_raw\n0";
        for (int f = 0; f < kFeatureCount; ++f) out << ",0.5";
        out << ",1,0,nan\n"; // non-finite arousal
    }
    CHECK_THROWS_AS(load_session_csv(dir / "session_001.csv"), ParseError);
}
