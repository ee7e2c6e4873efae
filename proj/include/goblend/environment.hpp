#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "goblend/action.hpp"
#include "goblend/cell_key.hpp"
#include "goblend/snapshot.hpp"
#include "goblend/track.hpp"

namespace goblend {

inline constexpr int kFeatureCount = 16;
inline constexpr int kMaxWindows = 360; // 90 s of 250 ms windows
inline constexpr int kMaxScore = 16;    // 8 checkpoints x 2 laps

// Per-window observation, every component normalized into [0, 1] and
// averaged over the window's substeps.
using FeatureVector = std::array<double, kFeatureCount>;

// Feature indices, fixed for the default 16-feature layout.
enum Feature : int {
    kFeatPosX = 0,
    kFeatPosY = 1,
    kFeatHeadingSin = 2,
    kFeatHeadingCos = 3,
    kFeatSpeed = 4,
    kFeatOffroad = 5,
    kFeatSegmentFrac = 6,
    kFeatLapFrac = 7,
    kFeatScoreFrac = 8,
    kFeatCheckpointDist = 9,
    kFeatOpponentDist = 10,
    kFeatProximity = 11,
    kFeatPrevGas = 12,
    kFeatPrevSteer = 13,
    kFeatCollision = 14,
    kFeatTimeFrac = 15,
};

struct StepResult {
    Snapshot snapshot;
    FeatureVector features{};
    int score_delta = 0;
    bool terminal = false;
};

// Deterministic fixed-timestep racing environment. The instance itself is
// immutable after construction; all mutable state lives in Snapshot values,
// so tick() is a pure function and instances are safe to share for
// concurrent read-only stepping of distinct snapshots.
class Environment {
public:
    explicit Environment(TrackSpec spec);
    static Environment from_file(const std::filesystem::path& track_path);

    Snapshot reset() const;
    StepResult tick(const Snapshot& snapshot, Action action) const;
    CellKey cell_key(const Snapshot& snapshot) const;

    std::uint32_t key_space_bound() const {
        return CellKey::key_space(static_cast<std::uint32_t>(geom_.segment_count()));
    }

    const TrackSpec& spec() const { return spec_; }
    const PhysicsParams& physics() const { return spec_.physics; }
    const TrackGeometry& geometry() const { return geom_; }
    int opponent_count() const { return static_cast<int>(opponents_.size()); }
    const OpponentTrack& opponent(int i) const {
        return opponents_[static_cast<std::size_t>(i)];
    }

private:
    struct SubstepObs; // transient per-substep values shared by tick internals

    TrackAttribution player_attribution(const Projection& proj, int segment_count) const;

    TrackSpec spec_;
    TrackGeometry geom_;
    std::vector<OpponentTrack> opponents_;
};

} // namespace goblend
