#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "goblend/errors.hpp"

namespace goblend {

enum class SegmentShape : std::uint8_t { kStraight, kCurveLeft, kCurveRight, kLoop };

const char* shape_name(SegmentShape shape);
SegmentShape shape_from_name(const std::string& name);

inline bool is_curved(SegmentShape s) {
    return s == SegmentShape::kCurveLeft || s == SegmentShape::kCurveRight ||
           s == SegmentShape::kLoop;
}

struct Segment {
    SegmentShape shape = SegmentShape::kStraight;
    double length = 0.0;      // arc length, world units
    double half_width = 5.0;  // road extends this far either side of the centerline
    bool checkpoint = false;
};

// Fixed-step kinematic constants. All documented defaults live here and are
// overridable from the track file's physics block.
struct PhysicsParams {
    double a_gas = 6.0;            // u/s^2 per unit of gas
    double drag = 0.1;             // 1/s, proportional speed decay
    double v_max = 12.0;           // on-road speed cap, u/s
    double v_off = 7.0;            // off-road speed cap, u/s
    double omega = 2.0;            // max yaw rate at v_max, rad/s
    int n_sub = 10;                // substeps per 250 ms window
    double window_seconds = 0.25;  // one time window
    double collision_radius = 1.5; // player-opponent contact distance
};

struct OpponentSpec {
    double speed = 6.0; // u/s along its waypoint path
    double start = 0.0; // initial arc offset along the path
    std::vector<std::array<double, 2>> waypoints;
};

// The track file contents (format 1).
struct TrackSpec {
    std::string name;
    PhysicsParams physics;
    std::vector<Segment> segments;
    std::vector<OpponentSpec> opponents;

    static TrackSpec load(const std::filesystem::path& path);
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Result of projecting a world point onto the centerline.
struct Projection {
    int segment = 0;
    double along = 0.0;   // distance into the segment, [0, length]
    double s = 0.0;       // total arc position, [0, total_length)
    double lateral = 0.0; // signed offset, positive to the left of travel
    double tangent = 0.0; // centerline heading at the projected point
    double dist2 = 0.0;
};

// Closed-loop centerline built from the segment list. Curve segments are
// 90 degree circular arcs (radius = 2*length/pi); straight and loop
// segments are line sections. Construction validates closure and the
// eight-checkpoints-per-lap invariant.
class TrackGeometry {
public:
    explicit TrackGeometry(const std::vector<Segment>& segments);

    int segment_count() const { return static_cast<int>(segs_.size()); }
    double total_length() const { return total_length_; }
    const Segment& segment(int i) const { return spec_[static_cast<std::size_t>(i)]; }

    // Sample the centerline at arc position s (wrapped into [0, total)).
    void sample(double s, double& x, double& y, double& heading) const;

    // Global nearest-point projection; ties resolve to the lowest segment index.
    Projection project(double x, double y) const;

    int checkpoint_count() const { return static_cast<int>(checkpoint_s_.size()); }
    double checkpoint_position(int idx) const {
        return checkpoint_s_[static_cast<std::size_t>(idx)];
    }

    double start_heading() const;

    // Axis-aligned feature-normalization box: track extent plus margin.
    double bbox_min_x() const { return bb_min_x_; }
    double bbox_min_y() const { return bb_min_y_; }
    double bbox_width() const { return bb_w_; }
    double bbox_height() const { return bb_h_; }
    double bbox_diag() const { return bb_diag_; }

private:
    struct SegGeom {
        SegmentShape shape;
        double length;
        double half_width;
        double x0, y0, heading0; // start pose
        double cx, cy, radius;   // arcs only
        double cum0;             // arc length at segment start
        double bx, by, brad;     // conservative bounding circle
    };

    void project_segment(const SegGeom& g, double px, double py, double& d2,
                         double& along, double& lateral, double& tangent) const;

    std::vector<Segment> spec_;
    std::vector<SegGeom> segs_;
    std::vector<double> checkpoint_s_;
    double total_length_ = 0.0;
    double bb_min_x_ = 0.0, bb_min_y_ = 0.0, bb_w_ = 1.0, bb_h_ = 1.0, bb_diag_ = 1.0;
};

// Discrete (segment, side, off-road) attribution used for the proximity flag.
struct TrackAttribution {
    std::uint16_t segment = 0;
    bool left = false;
    bool offroad = false;
};

// Closed piecewise-linear opponent path, arc-length parameterized. The
// per-position track attribution is precomputed on a fine grid so proximity
// checks stay cheap in the tick loop.
class OpponentTrack {
public:
    OpponentTrack(const OpponentSpec& spec, const TrackGeometry& geom);

    double length() const { return length_; }
    double speed() const { return speed_; }
    double start() const { return start_; }
    Vec2 position(double s) const;
    TrackAttribution attribution(double s) const;

private:
    double speed_;
    double start_;
    double length_ = 0.0;
    std::vector<std::array<double, 2>> pts_;
    std::vector<double> cum_;
    double attr_res_ = 0.05;
    std::vector<TrackAttribution> attr_;
};

} // namespace goblend
