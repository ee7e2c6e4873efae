#include "goblend/snapshot.hpp"

#include <bit>
#include <cstring>

namespace goblend {

namespace {

constexpr std::uint8_t kFormatVersion = 1;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct Reader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    std::uint8_t u8() {
        if (pos + 1 > bytes.size()) throw ContractViolation("snapshot bytes truncated");
        return bytes[pos++];
    }
    std::uint64_t u64() {
        if (pos + 8 > bytes.size()) throw ContractViolation("snapshot bytes truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(bytes[pos + static_cast<std::size_t>(i)]) << (8 * i);
        }
        pos += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
};

} // namespace

std::vector<std::uint8_t> Snapshot::to_bytes() const {
    std::vector<std::uint8_t> out;
    out.reserve(64 + 8 * opponent_s.size());
    out.push_back(kFormatVersion);
    put_f64(out, x);
    put_f64(out, y);
    put_f64(out, heading);
    put_f64(out, speed);
    put_f64(out, prev_s);
    out.push_back(static_cast<std::uint8_t>(prev_gas + 1));
    out.push_back(static_cast<std::uint8_t>(prev_steer + 1));
    out.push_back(score);
    out.push_back(lap);
    out.push_back(next_checkpoint);
    out.push_back(static_cast<std::uint8_t>(windows & 0xff));
    out.push_back(static_cast<std::uint8_t>(windows >> 8));
    out.push_back(terminal ? 1 : 0);
    out.push_back(static_cast<std::uint8_t>(opponent_s.size()));
    for (double s : opponent_s) {
        put_f64(out, s);
    }
    return out;
}

Snapshot Snapshot::from_bytes(const std::vector<std::uint8_t>& bytes) {
    Reader r{bytes};
    if (r.u8() != kFormatVersion) {
        throw ContractViolation("unsupported snapshot format version");
    }
    Snapshot s;
    s.x = r.f64();
    s.y = r.f64();
    s.heading = r.f64();
    s.speed = r.f64();
    s.prev_s = r.f64();
    s.prev_gas = static_cast<std::int8_t>(static_cast<int>(r.u8()) - 1);
    s.prev_steer = static_cast<std::int8_t>(static_cast<int>(r.u8()) - 1);
    s.score = r.u8();
    s.lap = r.u8();
    s.next_checkpoint = r.u8();
    const std::uint8_t lo = r.u8();
    const std::uint8_t hi = r.u8();
    s.windows = static_cast<std::uint16_t>(lo | (hi << 8));
    s.terminal = r.u8() != 0;
    const std::uint8_t n = r.u8();
    s.opponent_s.resize(n);
    for (std::uint8_t i = 0; i < n; ++i) {
        s.opponent_s[i] = r.f64();
    }
    if (r.pos != bytes.size()) {
        throw ContractViolation("snapshot bytes have trailing data");
    }
    return s;
}

} // namespace goblend
