#pragma once

#include <cstdint>
#include <vector>

#include "goblend/errors.hpp"

namespace goblend {

// Full restorable environment state. Serialization is a fixed little-endian
// layout and round-trips bit-exactly; restoring a snapshot and replaying the
// same actions reproduces identical bytes.
struct Snapshot {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double speed = 0.0;
    double prev_s = 0.0; // last projected arc position (checkpoint tracking)
    std::int8_t prev_gas = 0;
    std::int8_t prev_steer = 0;
    std::uint8_t score = 0;
    std::uint8_t lap = 1;
    std::uint8_t next_checkpoint = 0;
    std::uint16_t windows = 0;
    bool terminal = false;
    std::vector<double> opponent_s; // arc offset per opponent

    std::vector<std::uint8_t> to_bytes() const;
    static Snapshot from_bytes(const std::vector<std::uint8_t>& bytes);

    bool operator==(const Snapshot& other) const = default;
};

} // namespace goblend
