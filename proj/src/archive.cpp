#include "goblend/archive.hpp"

#include <cinttypes>
#include <cstdio>

namespace goblend {

const char* channel_name(RewardChannel c) {
    switch (c) {
        case RewardChannel::kScore: return "score";
        case RewardChannel::kMaxArousal: return "max_arousal";
        case RewardChannel::kRa: return "ra";
        case RewardChannel::kRau: return "rau";
        case RewardChannel::kRac: return "rac";
    }
    return "score";
}

RewardChannel channel_from_name(const std::string& name) {
    if (name == "score") return RewardChannel::kScore;
    if (name == "max_arousal" || name == "max-arousal") return RewardChannel::kMaxArousal;
    if (name == "ra") return RewardChannel::kRa;
    if (name == "rau") return RewardChannel::kRau;
    if (name == "rac") return RewardChannel::kRac;
    throw ConfigError("unknown reward channel: " + name);
}

double affect_value(AffectKind kind, const ArousalTrajectory& traj) {
    switch (kind) {
        case AffectKind::kRa: return reward_ra(traj);
        case AffectKind::kRau: return reward_rau(traj);
        case AffectKind::kRac: return reward_rac(traj);
        case AffectKind::kMeanArousal: return reward_max_arousal(traj);
    }
    return 0.0;
}

Archive::Archive(std::uint32_t key_space_bound, std::uint32_t segment_count)
    : bound_(key_space_bound), segment_count_(segment_count) {
    if (bound_ == 0) {
        throw ContractViolation("archive key-space bound must be positive");
    }
}

bool Archive::would_accept(const CellKey& key, double reward, std::uint32_t length,
                           RewardChannel channel) const {
    const auto it = slot_by_key_.find(key.index(segment_count_));
    if (it == slot_by_key_.end()) return true;
    const CellRecord& inc = records_[it->second];
    const double stored = inc.reward_on(channel);
    // Ties compare stored values exactly; rewards are deterministic
    // functions of deterministic trajectories.
    return reward > stored || (reward == stored && length < inc.length());
}

OfferOutcome Archive::offer(CellRecord&& candidate, RewardChannel channel) {
    const std::uint32_t key_index = candidate.key.index(segment_count_);
    const double cand_reward = candidate.reward_on(channel);
    const std::uint32_t cand_length = candidate.length();

    OfferOutcome outcome;
    const auto it = slot_by_key_.find(key_index);
    if (it == slot_by_key_.end()) {
        slot_by_key_.emplace(key_index, static_cast<std::uint32_t>(records_.size()));
        records_.push_back(std::move(candidate));
        outcome = OfferOutcome::kInserted;
    } else {
        CellRecord& inc = records_[it->second];
        const double stored = inc.reward_on(channel);
        if (cand_reward > stored || (cand_reward == stored && cand_length < inc.length())) {
            const std::uint32_t seen = inc.c_seen; // history belongs to the key
            inc = std::move(candidate);
            inc.c_seen = seen;
            outcome = OfferOutcome::kReplaced;
        } else {
            outcome = OfferOutcome::kRejected;
        }
    }

    if (log_enabled_) {
        const CellRecord& stored_rec = records_[slot_by_key_.at(key_index)];
        log_.push_back(LogEntry{key_index, outcome, cand_reward, cand_length,
                                stored_rec.reward_on(channel), stored_rec.length()});
    }
    return outcome;
}

void Archive::mark_selected(const CellKey& key) {
    const auto it = slot_by_key_.find(key.index(segment_count_));
    if (it == slot_by_key_.end()) {
        throw ContractViolation("mark_selected() on a key absent from the archive");
    }
    records_[it->second].c_seen += 1;
}

const CellRecord* Archive::find(const CellKey& key) const {
    const auto it = slot_by_key_.find(key.index(segment_count_));
    return it == slot_by_key_.end() ? nullptr : &records_[it->second];
}

void Archive::dump_jsonl(std::ostream& out) const {
    char buf[64];
    for (const auto& rec : records_) {
        out << "{\"key\":{\"fast\":" << (rec.key.fast ? "true" : "false")
            << ",\"rotation\":" << static_cast<int>(rec.key.rotation)
            << ",\"segment\":" << rec.key.segment
            << ",\"sub\":" << static_cast<int>(rec.key.sub)
            << ",\"lap\":" << static_cast<int>(rec.key.lap)
            << ",\"near\":" << (rec.key.near_opponent ? "true" : "false") << "}";
        std::snprintf(buf, sizeof buf, "%.17g", rec.r_b);
        out << ",\"r_b\":" << buf;
        std::snprintf(buf, sizeof buf, "%.17g", rec.r_a);
        out << ",\"r_a\":" << buf;
        out << ",\"length\":" << rec.length() << ",\"c_seen\":" << rec.c_seen
            << ",\"terminal\":" << (rec.terminal ? "true" : "false") << ",\"trajectory\":[";
        for (std::size_t i = 0; i < rec.trajectory.size(); ++i) {
            if (i) out << ',';
            out << static_cast<int>(rec.trajectory[i]);
        }
        out << "]}\n";
    }
}

} // namespace goblend
