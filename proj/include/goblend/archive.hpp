#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "goblend/affect.hpp"
#include "goblend/cell_key.hpp"
#include "goblend/snapshot.hpp"

namespace goblend {

// Which stored reward governs cell replacement.
enum class RewardChannel { kScore, kMaxArousal, kRa, kRau, kRac };

const char* channel_name(RewardChannel c);
RewardChannel channel_from_name(const std::string& name);

// Affect functions that can fill a record's r_a slot. Score-replacement
// experiments still carry the regression reward for affect-driven selection.
enum class AffectKind { kRa, kRau, kRac, kMeanArousal };

inline AffectKind affect_kind_for(RewardChannel c) {
    switch (c) {
        case RewardChannel::kRau: return AffectKind::kRau;
        case RewardChannel::kRac: return AffectKind::kRac;
        case RewardChannel::kMaxArousal: return AffectKind::kMeanArousal;
        default: return AffectKind::kRa;
    }
}

double affect_value(AffectKind kind, const ArousalTrajectory& traj);

// Best-known way to reach one cell.
struct CellRecord {
    CellKey key;
    std::vector<std::uint8_t> trajectory; // action codes from reset
    Snapshot snapshot;
    double r_b = 0.0; // behavior reward: in-game score
    double r_a = 0.0; // affect reward under the configured affect function
    ArousalTrajectory arousal;
    std::uint32_t c_seen = 0; // times selected for exploration
    bool terminal = false;

    std::uint32_t length() const { return static_cast<std::uint32_t>(trajectory.size()); }
    double reward_on(RewardChannel c) const {
        return c == RewardChannel::kScore ? r_b : r_a;
    }
};

enum class OfferOutcome { kInserted, kReplaced, kRejected };

// Keyed store of the best record per cell. A candidate replaces the
// incumbent only on a strictly better governing reward, or an equal reward
// with a strictly shorter trajectory; visit counts survive replacement.
class Archive {
public:
    explicit Archive(std::uint32_t key_space_bound, std::uint32_t segment_count);

    OfferOutcome offer(CellRecord&& candidate, RewardChannel channel);

    // True iff offer() would insert or replace; lets callers skip building
    // full candidate records for doomed offers.
    bool would_accept(const CellKey& key, double reward, std::uint32_t length,
                      RewardChannel channel) const;

    void mark_selected(const CellKey& key);

    double fill_ratio() const {
        return static_cast<double>(records_.size()) / static_cast<double>(bound_);
    }
    std::size_t size() const { return records_.size(); }
    std::uint32_t key_space_bound() const { return bound_; }

    const CellRecord* find(const CellKey& key) const;

    // Insertion-ordered, deterministic iteration.
    const std::vector<CellRecord>& records() const { return records_; }
    CellRecord& record(std::size_t slot) { return records_[slot]; }

    // One JSON object per line: key, rewards, length, c_seen, trajectory codes.
    void dump_jsonl(std::ostream& out) const;

    // Shadow log for fuzz tests.
    struct LogEntry {
        std::uint32_t key_index;
        OfferOutcome outcome;
        double candidate_reward;
        std::uint32_t candidate_length;
        double stored_reward;
        std::uint32_t stored_length;
    };
    void enable_log() { log_enabled_ = true; }
    const std::vector<LogEntry>& log() const { return log_; }

private:
    std::uint32_t bound_;
    std::uint32_t segment_count_;
    std::vector<CellRecord> records_;
    std::unordered_map<std::uint32_t, std::uint32_t> slot_by_key_;
    bool log_enabled_ = false;
    std::vector<LogEntry> log_;
};

} // namespace goblend
