#pragma once

#include <cstdint>
#include <string>

namespace goblend {

// Side/off-road quadrant of a track segment.
enum class SubSegment : std::uint8_t {
    kRight = 0,
    kLeft = 1,
    kRightOffroad = 2,
    kLeftOffroad = 3,
};

// Discretized world state: the archive's cell identity. Six categorical
// variables; the key space is the product of their cardinalities.
struct CellKey {
    static constexpr int kRotationBands = 6;
    static constexpr int kSubSegments = 4;
    static constexpr int kLaps = 2;

    bool fast = false;        // speed >= v_max / 2
    std::uint8_t rotation = 0; // |heading - segment tangent| in 30 degree bands, 0..5
    std::uint16_t segment = 0;
    SubSegment sub = SubSegment::kRight;
    std::uint8_t lap = 1;      // clamped to {1, 2}
    bool near_opponent = false;

    // Dense index in [0, key_space(S)).
    std::uint32_t index(std::uint32_t segment_count) const {
        std::uint32_t v = fast ? 1u : 0u;
        v = v * kRotationBands + rotation;
        v = v * segment_count + segment;
        v = v * kSubSegments + static_cast<std::uint32_t>(sub);
        v = v * kLaps + (lap - 1u);
        v = v * 2u + (near_opponent ? 1u : 0u);
        return v;
    }

    static std::uint32_t key_space(std::uint32_t segment_count) {
        return 2u * kRotationBands * segment_count * kSubSegments * kLaps * 2u;
    }

    bool operator==(const CellKey& o) const {
        return fast == o.fast && rotation == o.rotation && segment == o.segment &&
               sub == o.sub && lap == o.lap && near_opponent == o.near_opponent;
    }

    std::string to_string() const;
};

} // namespace goblend
