#include "goblend/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace goblend {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

double wrap_signed(double a) {
    a = std::fmod(a + kPi, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a - kPi;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double forward_gap(double from, double to, double total) {
    double d = std::fmod(to - from, total);
    if (d < 0.0) d += total;
    return d;
}

} // namespace

Environment::Environment(TrackSpec spec)
    : spec_(std::move(spec)), geom_(spec_.segments) {
    opponents_.reserve(spec_.opponents.size());
    for (const auto& o : spec_.opponents) {
        opponents_.emplace_back(o, geom_);
    }
}

Environment Environment::from_file(const std::filesystem::path& track_path) {
    return Environment(TrackSpec::load(track_path));
}

Snapshot Environment::reset() const {
    Snapshot s;
    double x, y, heading;
    geom_.sample(0.0, x, y, heading);
    s.x = x;
    s.y = y;
    s.heading = heading;
    s.speed = 0.0;
    s.prev_s = 0.0;
    s.prev_gas = 0;
    s.prev_steer = 0;
    s.score = 0;
    s.lap = 1;
    s.next_checkpoint = 0;
    s.windows = 0;
    s.terminal = false;
    s.opponent_s.resize(opponents_.size());
    for (std::size_t i = 0; i < opponents_.size(); ++i) {
        s.opponent_s[i] = opponents_[i].start();
    }
    return s;
}

TrackAttribution Environment::player_attribution(const Projection& proj,
                                                 int /*segment_count*/) const {
    TrackAttribution a;
    a.segment = static_cast<std::uint16_t>(proj.segment);
    a.left = proj.lateral > 0.0;
    a.offroad = std::abs(proj.lateral) > geom_.segment(proj.segment).half_width;
    return a;
}

StepResult Environment::tick(const Snapshot& snapshot, Action action) const {
    if (snapshot.terminal) {
        throw ContractViolation("tick() called on a terminal snapshot");
    }

    const PhysicsParams& ph = spec_.physics;
    const double dt = ph.window_seconds / ph.n_sub;
    const double total = geom_.total_length();
    const int cp_count = geom_.checkpoint_count();

    StepResult result;
    Snapshot s = snapshot;

    FeatureVector acc{};
    bool collided_this_window = false;

    // Projection at the current pose; re-used across substeps (the value at
    // the end of substep j is the start-of-substep value for j+1).
    Projection proj = geom_.project(s.x, s.y);

    for (int sub = 0; sub < ph.n_sub; ++sub) {
        const bool offroad_now =
            std::abs(proj.lateral) > geom_.segment(proj.segment).half_width;

        // Fixed evaluation order: gas, drag, cap, yaw, translate.
        double v = s.speed + ph.a_gas * static_cast<double>(action.gas) * dt;
        v -= ph.drag * v * dt;
        const double cap = offroad_now ? ph.v_off : ph.v_max;
        v = std::clamp(v, 0.0, cap);
        s.heading = wrap_angle(s.heading +
                               ph.omega * (v / ph.v_max) *
                                   static_cast<double>(action.steer) * dt);
        s.x += v * std::cos(s.heading) * dt;
        s.y += v * std::sin(s.heading) * dt;
        s.speed = v;

        for (std::size_t i = 0; i < opponents_.size(); ++i) {
            double os = s.opponent_s[i] + opponents_[i].speed() * dt;
            const double len = opponents_[i].length();
            if (os >= len) os -= len;
            s.opponent_s[i] = os;
        }

        // Contact zeroes the speed for the rest of the window's physics and
        // raises the collision flag.
        bool contact = false;
        double nearest2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < opponents_.size(); ++i) {
            const Vec2 p = opponents_[i].position(s.opponent_s[i]);
            const double dx = p.x - s.x, dy = p.y - s.y;
            const double d2 = dx * dx + dy * dy;
            nearest2 = std::min(nearest2, d2);
            if (d2 < ph.collision_radius * ph.collision_radius) contact = true;
        }
        if (contact) {
            s.speed = 0.0;
            collided_this_window = true;
        }

        proj = geom_.project(s.x, s.y);
        const TrackAttribution me = player_attribution(proj, geom_.segment_count());

        // Ordered checkpoint crossings over the forward progress interval
        // (prev_s, prev_s + step]; backward motion yields a gap > total/2
        // and never counts. Two physicality gates: the projected progress of
        // one substep must stay below two windows of top-speed travel
        // (nearest-point projections can jump across the infield), and the
        // car must be on the road while the gate passes (checkpoints span
        // the track, not the grass).
        const double step_fwd = forward_gap(s.prev_s, proj.s, total);
        const double max_credit = 2.0 * ph.v_max * ph.window_seconds;
        const bool through_gate =
            std::abs(proj.lateral) <= geom_.segment(proj.segment).half_width;
        if (step_fwd > 0.0 && step_fwd < max_credit && through_gate) {
            bool crossed = true;
            while (crossed && !s.terminal) {
                const double cp_s = geom_.checkpoint_position(s.next_checkpoint);
                const double gap = forward_gap(s.prev_s, cp_s, total);
                crossed = gap > 0.0 && gap <= step_fwd;
                if (crossed) {
                    s.score = static_cast<std::uint8_t>(s.score + 1);
                    result.score_delta += 1;
                    if (s.next_checkpoint + 1 == cp_count) {
                        s.next_checkpoint = 0;
                        s.lap = static_cast<std::uint8_t>(s.lap + 1);
                    } else {
                        s.next_checkpoint = static_cast<std::uint8_t>(s.next_checkpoint + 1);
                    }
                    if (s.score >= kMaxScore) s.terminal = true;
                }
            }
        }
        s.prev_s = proj.s;

        // Feature accumulation (post-move state).
        bool near = false;
        for (std::size_t i = 0; i < opponents_.size() && !near; ++i) {
            const TrackAttribution oa = opponents_[i].attribution(s.opponent_s[i]);
            near = oa.segment == me.segment && oa.left == me.left &&
                   oa.offroad == me.offroad;
        }
        const double seg_len = geom_.segment(proj.segment).length;
        const double cp_dist =
            forward_gap(proj.s, geom_.checkpoint_position(s.next_checkpoint), total);

        acc[kFeatPosX] += clamp01((s.x - geom_.bbox_min_x()) / geom_.bbox_width());
        acc[kFeatPosY] += clamp01((s.y - geom_.bbox_min_y()) / geom_.bbox_height());
        acc[kFeatHeadingSin] += 0.5 * (std::sin(s.heading) + 1.0);
        acc[kFeatHeadingCos] += 0.5 * (std::cos(s.heading) + 1.0);
        acc[kFeatSpeed] += clamp01(s.speed / ph.v_max);
        acc[kFeatOffroad] += me.offroad ? 1.0 : 0.0;
        acc[kFeatSegmentFrac] +=
            (proj.segment + (seg_len > 0.0 ? proj.along / seg_len : 0.0)) /
            geom_.segment_count();
        acc[kFeatLapFrac] += clamp01((s.lap - 1.0) / 2.0);
        acc[kFeatScoreFrac] += static_cast<double>(s.score) / kMaxScore;
        acc[kFeatCheckpointDist] += cp_dist / total;
        acc[kFeatOpponentDist] +=
            opponents_.empty() ? 1.0 : clamp01(std::sqrt(nearest2) / geom_.bbox_diag());
        acc[kFeatProximity] += near ? 1.0 : 0.0;
        acc[kFeatPrevGas] += (action.gas + 1.0) / 2.0;
        acc[kFeatPrevSteer] += (action.steer + 1.0) / 2.0;
        acc[kFeatCollision] += collided_this_window ? 1.0 : 0.0;
        acc[kFeatTimeFrac] += static_cast<double>(snapshot.windows) / kMaxWindows;
    }

    s.windows = static_cast<std::uint16_t>(s.windows + 1);
    if (s.windows >= kMaxWindows) s.terminal = true;
    s.prev_gas = action.gas;
    s.prev_steer = action.steer;

    for (double& f : acc) {
        f /= ph.n_sub;
    }
    result.features = acc;
    result.terminal = s.terminal;
    result.snapshot = std::move(s);
    return result;
}

CellKey Environment::cell_key(const Snapshot& snapshot) const {
    const Projection proj = geom_.project(snapshot.x, snapshot.y);
    const TrackAttribution me = player_attribution(proj, geom_.segment_count());

    CellKey key;
    key.fast = snapshot.speed >= spec_.physics.v_max * 0.5;
    const double rel = std::abs(wrap_signed(snapshot.heading - proj.tangent));
    key.rotation = static_cast<std::uint8_t>(
        std::min(5, static_cast<int>(rel / (kPi / 6.0))));
    key.segment = static_cast<std::uint16_t>(proj.segment);
    if (me.offroad) {
        key.sub = me.left ? SubSegment::kLeftOffroad : SubSegment::kRightOffroad;
    } else {
        key.sub = me.left ? SubSegment::kLeft : SubSegment::kRight;
    }
    key.lap = static_cast<std::uint8_t>(std::clamp<int>(snapshot.lap, 1, CellKey::kLaps));

    bool near = false;
    for (std::size_t i = 0; i < opponents_.size() && !near; ++i) {
        const TrackAttribution oa = opponents_[i].attribution(snapshot.opponent_s[i]);
        near = oa.segment == me.segment && oa.left == me.left && oa.offroad == me.offroad;
    }
    key.near_opponent = near;
    return key;
}

} // namespace goblend
