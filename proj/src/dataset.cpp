#include "goblend/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "goblend/rng.hpp"

namespace goblend {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& tok, const std::filesystem::path& file, int line_no) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError(file.string() + ":" + std::to_string(line_no) +
                         ": not a number: '" + tok + "'");
    }
    if (pos != tok.size() || !std::isfinite(v)) {
        throw ParseError(file.string() + ":" + std::to_string(line_no) +
                         ": invalid value: '" + tok + "'");
    }
    return v;
}

int parse_input(const std::string& tok, const std::filesystem::path& file, int line_no) {
    const double v = parse_double(tok, file, line_no);
    const int i = static_cast<int>(v);
    if (v != i || i < -1 || i > 1) {
        throw ParseError(file.string() + ":" + std::to_string(line_no) +
                         ": input must be -1, 0 or 1, got '" + tok + "'");
    }
    return i;
}

} // namespace

Action ActionFrequency::sample(Rng& rng) const {
    const double u = rng.uniform01();
    double cum = 0.0;
    for (int code = 0; code < Action::kCount; ++code) {
        cum += p[static_cast<std::size_t>(code)];
        if (u < cum) return Action::from_code(code);
    }
    return Action::from_code(Action::kCount - 1);
}

DemoSession load_session_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ParseError("cannot open session file: " + file.string());
    }

    DemoSession session;
    session.id = file.stem().string();

    std::string line;
    int line_no = 0;
    const std::size_t expected_cols = 1 + kFeatureCount + 3;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            // Header; verify the column count matches the F=16 layout.
            if (split_csv_line(line).size() != expected_cols) {
                throw ParseError(file.string() + ":1: expected " +
                                 std::to_string(expected_cols) + " columns in header");
            }
            continue;
        }
        const auto toks = split_csv_line(line);
        if (toks.size() != expected_cols) {
            throw ParseError(file.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(expected_cols) + " columns, got " +
                             std::to_string(toks.size()));
        }
        for (int f = 0; f < kFeatureCount; ++f) {
            session.features.push_back(
                parse_double(toks[static_cast<std::size_t>(1 + f)], file, line_no));
        }
        const int gas = parse_input(toks[1 + kFeatureCount], file, line_no);
        const int steer = parse_input(toks[2 + kFeatureCount], file, line_no);
        session.actions.push_back(Action(gas, steer));
        session.raw_arousal.push_back(parse_double(toks[3 + kFeatureCount], file, line_no));
    }
    if (session.actions.empty()) {
        throw ParseError(file.string() + ": session has no data rows");
    }
    if (session.window_count() > kMaxWindows) {
        throw ParseError(file.string() + ": session exceeds " +
                         std::to_string(kMaxWindows) + " windows");
    }
    normalize_session(session);
    return session;
}

void normalize_session(DemoSession& session) {
    const auto [mn_it, mx_it] =
        std::minmax_element(session.raw_arousal.begin(), session.raw_arousal.end());
    const double mn = *mn_it, mx = *mx_it;
    session.arousal.resize(session.raw_arousal.size());
    if (mx == mn) {
        std::cerr << "[goblend] warning: session " << session.id
                  << " has constant arousal; normalizing to 0.5\n";
        std::fill(session.arousal.begin(), session.arousal.end(), 0.5);
        return;
    }
    for (std::size_t i = 0; i < session.raw_arousal.size(); ++i) {
        session.arousal[i] = (session.raw_arousal[i] - mn) / (mx - mn);
    }
}

std::vector<DemoSession> load_dataset(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("dataset directory not found: " + dir.string());
    }

    std::vector<std::filesystem::path> files;
    const auto manifest_path = dir / "manifest.json";
    if (std::filesystem::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("invalid manifest " + manifest_path.string() + ": " + e.what());
        }
        for (const auto& f : j.at("files")) {
            files.push_back(dir / f.get<std::string>());
        }
    } else {
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            const auto name = entry.path().filename().string();
            if (name.rfind("session_", 0) == 0 && entry.path().extension() == ".csv" &&
                name.find(".truth.") == std::string::npos) {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
    }
    if (files.empty()) {
        throw ConfigError("no session files in " + dir.string());
    }

    std::vector<DemoSession> sessions;
    sessions.reserve(files.size());
    for (const auto& f : files) {
        sessions.push_back(load_session_csv(f));
    }
    return sessions;
}

TargetTrace target_trace(const std::vector<DemoSession>& sessions, int horizon) {
    if (sessions.size() < 2) {
        throw InsufficientData("target trace needs at least 2 sessions, got " +
                               std::to_string(sessions.size()));
    }

    TargetTrace trace;
    trace.mean.resize(static_cast<std::size_t>(horizon));
    trace.stddev.resize(static_cast<std::size_t>(horizon));
    trace.ci.resize(static_cast<std::size_t>(horizon));

    double last_mean = 0.0, last_std = 0.0, last_ci = 0.0;
    for (int w = 0; w < horizon; ++w) {
        double sum = 0.0;
        int m = 0;
        for (const auto& s : sessions) {
            if (w < s.window_count()) {
                sum += s.arousal[static_cast<std::size_t>(w)];
                ++m;
            }
        }
        if (m == 0) {
            // Beyond the longest session: pad with the final populated values.
            trace.mean[static_cast<std::size_t>(w)] = last_mean;
            trace.stddev[static_cast<std::size_t>(w)] = last_std;
            trace.ci[static_cast<std::size_t>(w)] = last_ci;
            continue;
        }
        const double mean = sum / m;
        double ss = 0.0;
        for (const auto& s : sessions) {
            if (w < s.window_count()) {
                const double d = s.arousal[static_cast<std::size_t>(w)] - mean;
                ss += d * d;
            }
        }
        const double sd = m >= 2 ? std::sqrt(ss / (m - 1)) : 0.0;
        const double ci = m >= 2 ? 1.96 * sd / std::sqrt(static_cast<double>(m)) : 0.0;
        trace.mean[static_cast<std::size_t>(w)] = mean;
        trace.stddev[static_cast<std::size_t>(w)] = sd;
        trace.ci[static_cast<std::size_t>(w)] = ci;
        last_mean = mean;
        last_std = sd;
        last_ci = ci;
    }
    return trace;
}

ActionFrequency action_frequencies(const std::vector<DemoSession>& sessions) {
    if (sessions.empty()) {
        throw InsufficientData("action frequencies need at least one session");
    }
    ActionFrequency freq;
    std::array<std::uint64_t, Action::kCount> counts{};
    std::uint64_t total = 0;
    for (const auto& s : sessions) {
        for (const auto& a : s.actions) {
            counts[static_cast<std::size_t>(a.code())]++;
            ++total;
        }
    }
    for (int c = 0; c < Action::kCount; ++c) {
        freq.p[static_cast<std::size_t>(c)] =
            static_cast<double>(counts[static_cast<std::size_t>(c)]) /
            static_cast<double>(total);
    }
    return freq;
}

std::vector<double> mean_expert_score_trace(const std::vector<DemoSession>& sessions,
                                            int horizon) {
    std::vector<double> trace(static_cast<std::size_t>(horizon), 0.0);
    double last = 0.0;
    for (int w = 0; w < horizon; ++w) {
        double sum = 0.0;
        int m = 0;
        for (const auto& s : sessions) {
            // Sessions past their end hold their final score.
            const int idx = std::min(w, s.window_count() - 1);
            sum += s.window_features(idx)[kFeatScoreFrac] * kMaxScore;
            ++m;
        }
        last = m > 0 ? sum / m : last;
        trace[static_cast<std::size_t>(w)] = last;
    }
    return trace;
}

} // namespace goblend
