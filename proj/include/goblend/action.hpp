#pragma once

#include <cstdint>

#include "goblend/errors.hpp"

namespace goblend {

// One 250 ms input: gas pedal and steering, each in {-1, 0, 1}.
struct Action {
    static constexpr int kCount = 9;

    Action() = default;
    Action(int gas_in, int steer_in)
        : gas(static_cast<std::int8_t>(gas_in)), steer(static_cast<std::int8_t>(steer_in)) {
        if (gas_in < -1 || gas_in > 1 || steer_in < -1 || steer_in > 1) {
            throw ContractViolation("action components must lie in {-1, 0, 1}");
        }
    }

    // Stable code in [0, 9): (gas+1)*3 + (steer+1).
    int code() const { return (gas + 1) * 3 + (steer + 1); }

    static Action from_code(int code) {
        if (code < 0 || code >= kCount) {
            throw ContractViolation("action code out of range [0, 9)");
        }
        return Action(code / 3 - 1, code % 3 - 1);
    }

    bool operator==(const Action& other) const {
        return gas == other.gas && steer == other.steer;
    }

    std::int8_t gas = 0;
    std::int8_t steer = 0;
};

} // namespace goblend
