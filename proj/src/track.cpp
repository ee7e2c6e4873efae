#include "goblend/track.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace goblend {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kHalfPi = kPi / 2.0;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

// Wrap into [-pi, pi).
double wrap_signed(double a) {
    a = std::fmod(a + kPi, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a - kPi;
}

} // namespace

const char* shape_name(SegmentShape shape) {
    switch (shape) {
        case SegmentShape::kStraight: return "straight";
        case SegmentShape::kCurveLeft: return "curve-left";
        case SegmentShape::kCurveRight: return "curve-right";
        case SegmentShape::kLoop: return "loop";
    }
    return "straight";
}

SegmentShape shape_from_name(const std::string& name) {
    if (name == "straight") return SegmentShape::kStraight;
    if (name == "curve-left") return SegmentShape::kCurveLeft;
    if (name == "curve-right") return SegmentShape::kCurveRight;
    if (name == "loop") return SegmentShape::kLoop;
    throw ConfigError("unknown segment shape: " + name);
}

TrackSpec TrackSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open track file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid track JSON in " + path.string() + ": " + e.what());
    }

    if (!j.contains("format") || j["format"].get<int>() != 1) {
        throw ConfigError("track file " + path.string() + " must declare format: 1");
    }

    TrackSpec spec;
    spec.name = j.value("name", path.stem().string());

    if (j.contains("physics")) {
        const auto& p = j["physics"];
        spec.physics.a_gas = p.value("a_gas", spec.physics.a_gas);
        spec.physics.drag = p.value("drag", spec.physics.drag);
        spec.physics.v_max = p.value("v_max", spec.physics.v_max);
        spec.physics.v_off = p.value("v_off", spec.physics.v_off);
        spec.physics.omega = p.value("omega", spec.physics.omega);
        spec.physics.n_sub = p.value("n_sub", spec.physics.n_sub);
        spec.physics.window_seconds = p.value("window_seconds", spec.physics.window_seconds);
        spec.physics.collision_radius = p.value("collision_radius", spec.physics.collision_radius);
    }
    const auto& ph = spec.physics;
    if (ph.a_gas <= 0 || ph.v_max <= 0 || ph.v_off <= 0 || ph.v_off > ph.v_max ||
        ph.omega <= 0 || ph.n_sub < 1 || ph.window_seconds <= 0 || ph.drag < 0 ||
        ph.collision_radius < 0) {
        throw ConfigError("track file " + path.string() + " has an invalid physics block");
    }

    if (!j.contains("segments") || !j["segments"].is_array() || j["segments"].empty()) {
        throw ConfigError("track file " + path.string() + " has no segments");
    }
    for (const auto& s : j["segments"]) {
        Segment seg;
        seg.shape = shape_from_name(s.at("shape").get<std::string>());
        seg.length = s.at("length").get<double>();
        seg.half_width = s.at("half_width").get<double>();
        seg.checkpoint = s.value("checkpoint", false);
        if (seg.length <= 0 || seg.half_width <= 0) {
            throw ConfigError("track file " + path.string() +
                              " has a segment with non-positive length or width");
        }
        spec.segments.push_back(seg);
    }

    if (j.contains("opponents")) {
        for (const auto& o : j["opponents"]) {
            OpponentSpec opp;
            opp.speed = o.at("speed").get<double>();
            opp.start = o.value("start", 0.0);
            for (const auto& w : o.at("waypoints")) {
                opp.waypoints.push_back({w.at(0).get<double>(), w.at(1).get<double>()});
            }
            if (opp.speed < 0 || opp.waypoints.size() < 3) {
                throw ConfigError("track file " + path.string() + " has an invalid opponent");
            }
            spec.opponents.push_back(std::move(opp));
        }
    }
    return spec;
}

TrackGeometry::TrackGeometry(const std::vector<Segment>& segments) : spec_(segments) {
    if (segments.empty()) {
        throw ConfigError("track needs at least one segment");
    }

    double x = 0.0, y = 0.0, heading = 0.0;
    double cum = 0.0;
    segs_.reserve(segments.size());
    for (const auto& seg : segments) {
        SegGeom g;
        g.shape = seg.shape;
        g.length = seg.length;
        g.half_width = seg.half_width;
        g.x0 = x;
        g.y0 = y;
        g.heading0 = heading;
        g.cum0 = cum;
        g.cx = g.cy = g.radius = 0.0;

        if (seg.shape == SegmentShape::kCurveLeft) {
            g.radius = seg.length / kHalfPi;
            g.cx = x + g.radius * std::cos(heading + kHalfPi);
            g.cy = y + g.radius * std::sin(heading + kHalfPi);
            const double a_end = heading - kHalfPi + kHalfPi; // start angle + sweep
            x = g.cx + g.radius * std::cos(a_end);
            y = g.cy + g.radius * std::sin(a_end);
            heading = wrap_angle(heading + kHalfPi);
        } else if (seg.shape == SegmentShape::kCurveRight) {
            g.radius = seg.length / kHalfPi;
            g.cx = x + g.radius * std::cos(heading - kHalfPi);
            g.cy = y + g.radius * std::sin(heading - kHalfPi);
            const double a_end = heading + kHalfPi - kHalfPi;
            x = g.cx + g.radius * std::cos(a_end);
            y = g.cy + g.radius * std::sin(a_end);
            heading = wrap_angle(heading - kHalfPi);
        } else {
            x += seg.length * std::cos(heading);
            y += seg.length * std::sin(heading);
        }
        cum += seg.length;

        segs_.push_back(g);
    }
    total_length_ = cum;

    // Closure: the last segment must end at the start pose.
    const double gap = std::hypot(x, y);
    const double dh = std::abs(wrap_signed(heading));
    if (gap > 1e-6 * std::max(1.0, total_length_) || dh > 1e-9) {
        throw ConfigError("track segments do not form a closed loop (gap " +
                          std::to_string(gap) + ", heading error " + std::to_string(dh) + ")");
    }

    // Bounding circles (conservative, via Lipschitz sampling) and the
    // feature-normalization box.
    double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
    double max_hw = 0.0;
    bool first = true;
    for (auto& g : segs_) {
        const int n = 64;
        const double step = g.length / n;
        double sx = 0.0, sy = 0.0;
        std::vector<std::array<double, 2>> pts;
        pts.reserve(n + 1);
        for (int i = 0; i <= n; ++i) {
            double px, py, ph;
            sample(g.cum0 + std::min(g.length, i * step), px, py, ph);
            pts.push_back({px, py});
            sx += px;
            sy += py;
            if (first) {
                min_x = max_x = px;
                min_y = max_y = py;
                first = false;
            }
            min_x = std::min(min_x, px);
            max_x = std::max(max_x, px);
            min_y = std::min(min_y, py);
            max_y = std::max(max_y, py);
        }
        g.bx = sx / (n + 1);
        g.by = sy / (n + 1);
        double r2 = 0.0;
        for (const auto& p : pts) {
            const double dx = p[0] - g.bx, dy = p[1] - g.by;
            r2 = std::max(r2, dx * dx + dy * dy);
        }
        g.brad = std::sqrt(r2) + step; // covers points between samples
        max_hw = std::max(max_hw, g.half_width);
    }

    const double margin = 4.0 * max_hw;
    bb_min_x_ = min_x - margin;
    bb_min_y_ = min_y - margin;
    bb_w_ = (max_x - min_x) + 2.0 * margin;
    bb_h_ = (max_y - min_y) + 2.0 * margin;
    bb_diag_ = std::hypot(bb_w_, bb_h_);

    int cp = 0;
    for (std::size_t i = 0; i < spec_.size(); ++i) {
        if (spec_[i].checkpoint) {
            checkpoint_s_.push_back(segs_[i].cum0 + spec_[i].length * 0.5);
            ++cp;
        }
    }
    if (cp != 8) {
        throw ConfigError("track must flag exactly 8 checkpoint segments per lap, got " +
                          std::to_string(cp));
    }
}

double TrackGeometry::start_heading() const { return segs_.front().heading0; }

void TrackGeometry::sample(double s, double& x, double& y, double& heading) const {
    s = std::fmod(s, total_length_);
    if (s < 0.0) s += total_length_;
    // Find the segment containing s.
    std::size_t lo = 0, hi = segs_.size();
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (segs_[mid].cum0 <= s) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const SegGeom& g = segs_[lo];
    const double d = s - g.cum0;
    if (!is_curved(g.shape) || g.shape == SegmentShape::kLoop) {
        x = g.x0 + d * std::cos(g.heading0);
        y = g.y0 + d * std::sin(g.heading0);
        heading = g.heading0;
        return;
    }
    const double t = d / g.radius;
    if (g.shape == SegmentShape::kCurveLeft) {
        const double a = g.heading0 - kHalfPi + t;
        x = g.cx + g.radius * std::cos(a);
        y = g.cy + g.radius * std::sin(a);
        heading = wrap_angle(g.heading0 + t);
    } else {
        const double a = g.heading0 + kHalfPi - t;
        x = g.cx + g.radius * std::cos(a);
        y = g.cy + g.radius * std::sin(a);
        heading = wrap_angle(g.heading0 - t);
    }
}

void TrackGeometry::project_segment(const SegGeom& g, double px, double py, double& d2,
                                    double& along, double& lateral, double& tangent) const {
    if (!is_curved(g.shape) || g.shape == SegmentShape::kLoop) {
        const double tx = std::cos(g.heading0), ty = std::sin(g.heading0);
        const double dx = px - g.x0, dy = py - g.y0;
        const double proj = dx * tx + dy * ty;
        along = std::clamp(proj, 0.0, g.length);
        const double cx = g.x0 + along * tx, cy = g.y0 + along * ty;
        const double ex = px - cx, ey = py - cy;
        d2 = ex * ex + ey * ey;
        lateral = tx * dy - ty * dx; // left of travel is positive
        tangent = g.heading0;
        return;
    }

    const double vx = px - g.cx, vy = py - g.cy;
    const double rho = std::hypot(vx, vy);
    const double alpha = std::atan2(vy, vx);
    double t; // angular parameter along the arc, [0, pi/2] when on it
    if (g.shape == SegmentShape::kCurveLeft) {
        t = wrap_angle(alpha - (g.heading0 - kHalfPi));
    } else {
        t = wrap_angle((g.heading0 + kHalfPi) - alpha);
    }
    if (t <= kHalfPi) {
        along = t * g.radius;
        const double diff = rho - g.radius;
        d2 = diff * diff;
        // Left turns keep the center on the left, so inside the circle is
        // the left side; right turns are mirrored.
        lateral = (g.shape == SegmentShape::kCurveLeft) ? (g.radius - rho) : (rho - g.radius);
        tangent = wrap_angle(g.shape == SegmentShape::kCurveLeft ? g.heading0 + t
                                                                 : g.heading0 - t);
        return;
    }

    // Off the sweep: clamp to the nearer endpoint. Both arc endpoints sit at
    // angle heading0 from the center after the 90 degree sweep identity.
    const double sx = g.x0, sy = g.y0, sh = g.heading0;
    const double ex = g.cx + g.radius * std::cos(g.heading0);
    const double ey = g.cy + g.radius * std::sin(g.heading0);
    const double eh = wrap_angle(g.shape == SegmentShape::kCurveLeft ? g.heading0 + kHalfPi
                                                                     : g.heading0 - kHalfPi);
    const double ds2 = (px - sx) * (px - sx) + (py - sy) * (py - sy);
    const double de2 = (px - ex) * (px - ex) + (py - ey) * (py - ey);
    if (ds2 <= de2) {
        d2 = ds2;
        along = 0.0;
        tangent = sh;
        lateral = std::cos(sh) * (py - sy) - std::sin(sh) * (px - sx);
    } else {
        d2 = de2;
        along = g.length;
        tangent = eh;
        lateral = std::cos(eh) * (py - ey) - std::sin(eh) * (px - ex);
    }
}

Projection TrackGeometry::project(double x, double y) const {
    Projection best;
    best.dist2 = std::numeric_limits<double>::infinity();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < segs_.size(); ++i) {
        const SegGeom& g = segs_[i];
        const double bdx = x - g.bx, bdy = y - g.by;
        const double bb2 = bdx * bdx + bdy * bdy;
        const double cut = g.brad + best_d;
        if (std::isfinite(best_d) && bb2 > cut * cut) {
            continue; // segment cannot beat the current best
        }
        double d2, along, lateral, tangent;
        project_segment(g, x, y, d2, along, lateral, tangent);
        if (d2 < best.dist2) {
            best.dist2 = d2;
            best.segment = static_cast<int>(i);
            best.along = along;
            best.lateral = lateral;
            best.tangent = tangent;
            best.s = g.cum0 + along;
            best_d = std::sqrt(d2);
        }
    }
    if (best.s >= total_length_) best.s -= total_length_;
    return best;
}

OpponentTrack::OpponentTrack(const OpponentSpec& spec, const TrackGeometry& geom)
    : speed_(spec.speed), start_(spec.start) {
    pts_ = spec.waypoints;
    if (pts_.size() < 3) {
        throw ConfigError("opponent path needs at least 3 waypoints");
    }
    // Close the polyline.
    cum_.resize(pts_.size() + 1, 0.0);
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        const auto& a = pts_[i];
        const auto& b = pts_[(i + 1) % pts_.size()];
        cum_[i + 1] = cum_[i] + std::hypot(b[0] - a[0], b[1] - a[1]);
    }
    length_ = cum_.back();
    if (length_ <= 0.0) {
        throw ConfigError("opponent path has zero length");
    }

    // Precompute (segment, side, offroad) on a fine arc-length grid.
    const std::size_t n = static_cast<std::size_t>(std::ceil(length_ / attr_res_)) + 1;
    attr_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = position(static_cast<double>(i) * attr_res_);
        const Projection proj = geom.project(p.x, p.y);
        TrackAttribution a;
        a.segment = static_cast<std::uint16_t>(proj.segment);
        a.left = proj.lateral > 0.0;
        a.offroad = std::abs(proj.lateral) >
                    geom.segment(proj.segment).half_width;
        attr_[i] = a;
    }
}

Vec2 OpponentTrack::position(double s) const {
    s = std::fmod(s, length_);
    if (s < 0.0) s += length_;
    std::size_t lo = 0, hi = cum_.size() - 1;
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (cum_[mid] <= s) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const auto& a = pts_[lo];
    const auto& b = pts_[(lo + 1) % pts_.size()];
    const double seg_len = cum_[lo + 1] - cum_[lo];
    const double u = seg_len > 0.0 ? (s - cum_[lo]) / seg_len : 0.0;
    return {a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])};
}

TrackAttribution OpponentTrack::attribution(double s) const {
    s = std::fmod(s, length_);
    if (s < 0.0) s += length_;
    std::size_t idx = static_cast<std::size_t>(s / attr_res_);
    if (idx >= attr_.size()) idx = attr_.size() - 1;
    return attr_[idx];
}

} // namespace goblend
