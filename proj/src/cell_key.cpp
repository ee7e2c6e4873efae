#include "goblend/cell_key.hpp"

namespace goblend {

namespace {

const char* sub_name(SubSegment s) {
    switch (s) {
        case SubSegment::kRight: return "right";
        case SubSegment::kLeft: return "left";
        case SubSegment::kRightOffroad: return "right-offroad";
        case SubSegment::kLeftOffroad: return "left-offroad";
    }
    return "right";
}

} // namespace

std::string CellKey::to_string() const {
    std::string out;
    out += fast ? "fast" : "slow";
    out += "/rot" + std::to_string(rotation);
    out += "/seg" + std::to_string(segment);
    out += "/";
    out += sub_name(sub);
    out += "/lap" + std::to_string(lap);
    out += near_opponent ? "/near" : "/far";
    return out;
}

} // namespace goblend
