#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <sstream>

#include <json.hpp>

#include "goblend/archive.hpp"
#include "goblend/rng.hpp"

using namespace goblend;

namespace {

constexpr std::uint32_t kSegments = 19;

CellKey make_key(std::uint32_t i) {
    CellKey key;
    key.fast = (i & 1u) != 0;
    key.rotation = static_cast<std::uint8_t>((i / 2) % 6);
    key.segment = static_cast<std::uint16_t>((i / 12) % kSegments);
    key.sub = static_cast<SubSegment>((i / (12 * kSegments)) % 4);
    key.lap = static_cast<std::uint8_t>(1 + (i / (48 * kSegments)) % 2);
    key.near_opponent = (i / (96 * kSegments)) % 2 != 0;
    return key;
}

CellRecord make_record(const CellKey& key, double reward, std::uint32_t length,
                       bool behavior_channel = true) {
    CellRecord rec;
    rec.key = key;
    rec.trajectory.assign(length, 4); // neutral action code
    if (behavior_channel) {
        rec.r_b = reward;
    } else {
        rec.r_a = reward;
    }
    return rec;
}

Archive make_archive() { return Archive(CellKey::key_space(kSegments), kSegments); }

} // namespace

TEST_CASE("offer outcomes: insert, replace on better or equal-but-shorter, reject") {
    Archive archive = make_archive();
    const CellKey key = make_key(7);

    CHECK(archive.offer(make_record(key, 0.5, 10), RewardChannel::kScore) ==
          OfferOutcome::kInserted);

    // Same reward, same length: rejected (non-strict on both criteria).
    CHECK(archive.offer(make_record(key, 0.5, 10), RewardChannel::kScore) ==
          OfferOutcome::kRejected);

    // Same reward, shorter trajectory: replaced.
    CHECK(archive.offer(make_record(key, 0.5, 8), RewardChannel::kScore) ==
          OfferOutcome::kReplaced);

    // Lower reward, shorter: rejected.
    CHECK(archive.offer(make_record(key, 0.4, 1), RewardChannel::kScore) ==
          OfferOutcome::kRejected);

    // Higher reward, longer: replaced.
    CHECK(archive.offer(make_record(key, 0.6, 50), RewardChannel::kScore) ==
          OfferOutcome::kReplaced);
    CHECK(archive.size() == 1);
    CHECK(archive.find(key)->r_b == 0.6);
}

TEST_CASE("the affect channel governs comparison when selected") {
    Archive archive = make_archive();
    const CellKey key = make_key(3);
    CellRecord low = make_record(key, 0.0, 10);
    low.r_a = 0.9;
    CHECK(archive.offer(std::move(low), RewardChannel::kRa) == OfferOutcome::kInserted);

    CellRecord high_score = make_record(key, 5.0, 10);
    high_score.r_a = 0.5;
    // r_b is ignored on the affect channel.
    CHECK(archive.offer(std::move(high_score), RewardChannel::kRa) == OfferOutcome::kRejected);
}

TEST_CASE("mark_selected counts visits and survives replacement") {
    Archive archive = make_archive();
    const CellKey key = make_key(40);
    archive.offer(make_record(key, 0.1, 20), RewardChannel::kScore);

    CHECK(archive.find(key)->c_seen == 0);
    archive.mark_selected(key);
    CHECK(archive.find(key)->c_seen == 1);
    archive.mark_selected(key);
    archive.mark_selected(key);
    CHECK(archive.find(key)->c_seen == 3);

    archive.offer(make_record(key, 0.9, 25), RewardChannel::kScore);
    CHECK(archive.find(key)->r_b == 0.9);
    CHECK(archive.find(key)->c_seen == 3); // history belongs to the key

    CHECK_THROWS_AS(archive.mark_selected(make_key(41)), ContractViolation);
}

TEST_CASE("fill ratio") {
    Archive empty = make_archive();
    CHECK(empty.fill_ratio() == 0.0);

    Archive small(7296, kSegments);
    small.offer(make_record(make_key(0), 0.0, 0), RewardChannel::kScore);
    CHECK(small.fill_ratio() == doctest::Approx(1.0 / 7296.0).epsilon(1e-12));
}

TEST_CASE("records carry both rewards regardless of governing channel") {
    Archive archive = make_archive();
    CellRecord rec = make_record(make_key(5), 3.0, 4);
    rec.r_a = 0.25;
    archive.offer(std::move(rec), RewardChannel::kScore);
    const CellRecord* stored = archive.find(make_key(5));
    CHECK(stored->r_b == 3.0);
    CHECK(stored->r_a == 0.25);
}

TEST_CASE("fuzz: archive equals a shadow model and never regresses") {
    Archive archive = make_archive();
    archive.enable_log();
    Rng rng(2025);

    struct Shadow {
        double reward;
        std::uint32_t length;
    };
    std::map<std::uint32_t, Shadow> shadow;
    std::map<std::uint32_t, std::pair<double, std::uint32_t>> last_stored;

    const int kOffers = 10000;
    for (int i = 0; i < kOffers; ++i) {
        const std::uint32_t key_id = static_cast<std::uint32_t>(rng.below(600));
        const CellKey key = make_key(key_id);
        const double reward = std::floor(rng.uniform01() * 8.0); // coarse: forces ties
        const std::uint32_t length = static_cast<std::uint32_t>(rng.below(40));
        const std::uint32_t kidx = key.index(kSegments);

        const OfferOutcome outcome =
            archive.offer(make_record(key, reward, length), RewardChannel::kScore);

        const auto it = shadow.find(kidx);
        if (it == shadow.end()) {
            CHECK(outcome == OfferOutcome::kInserted);
            shadow[kidx] = Shadow{reward, length};
        } else if (reward > it->second.reward ||
                   (reward == it->second.reward && length < it->second.length)) {
            CHECK(outcome == OfferOutcome::kReplaced);
            it->second = Shadow{reward, length};
        } else {
            CHECK(outcome == OfferOutcome::kRejected);
        }

        // Reward monotonicity / length non-increase at constant reward.
        const CellRecord* stored = archive.find(key);
        const auto prev = last_stored.find(kidx);
        if (prev != last_stored.end()) {
            CHECK(stored->r_b >= prev->second.first);
            if (stored->r_b == prev->second.first) {
                CHECK(stored->length() <= prev->second.second);
            }
        }
        last_stored[kidx] = {stored->r_b, stored->length()};
    }

    CHECK(archive.size() == shadow.size());
    for (const auto& rec : archive.records()) {
        const auto it = shadow.find(rec.key.index(kSegments));
        REQUIRE(it != shadow.end());
        CHECK(rec.r_b == it->second.reward);
        CHECK(rec.length() == it->second.length);
    }

    // No rejected candidate strictly dominated the final incumbent.
    for (const auto& entry : archive.log()) {
        if (entry.outcome != OfferOutcome::kRejected) continue;
        const auto it = shadow.find(entry.key_index);
        REQUIRE(it != shadow.end());
        const bool dominates = entry.candidate_reward > it->second.reward ||
                               (entry.candidate_reward == it->second.reward &&
                                entry.candidate_length < it->second.length);
        CHECK_FALSE(dominates);
    }
}

TEST_CASE("identical offer sequences produce identical dumps") {
    const auto build = [] {
        Archive archive = make_archive();
        Rng rng(99);
        for (int i = 0; i < 2000; ++i) {
            const CellKey key = make_key(static_cast<std::uint32_t>(rng.below(300)));
            archive.offer(make_record(key, std::floor(rng.uniform01() * 5.0),
                                      static_cast<std::uint32_t>(rng.below(30))),
                          RewardChannel::kScore);
        }
        std::ostringstream out;
        archive.dump_jsonl(out);
        return out.str();
    };
    CHECK(build() == build());
}

TEST_CASE("dump recount: one line per distinct key, parseable, fields match") {
    Archive archive = make_archive();
    Rng rng(17);
    for (int i = 0; i < 500; ++i) {
        const CellKey key = make_key(static_cast<std::uint32_t>(rng.below(120)));
        CellRecord rec = make_record(key, std::floor(rng.uniform01() * 4.0),
                                     static_cast<std::uint32_t>(rng.below(20)));
        rec.r_a = rng.uniform01();
        archive.offer(std::move(rec), RewardChannel::kScore);
    }

    std::ostringstream out;
    archive.dump_jsonl(out);
    std::istringstream in(out.str());
    std::string line;
    std::size_t lines = 0;
    std::map<std::uint32_t, bool> seen;
    while (std::getline(in, line)) {
        const nlohmann::json j = nlohmann::json::parse(line);
        CellKey key;
        key.fast = j["key"]["fast"].get<bool>();
        key.rotation = j["key"]["rotation"].get<std::uint8_t>();
        key.segment = j["key"]["segment"].get<std::uint16_t>();
        key.sub = static_cast<SubSegment>(j["key"]["sub"].get<int>());
        key.lap = j["key"]["lap"].get<std::uint8_t>();
        key.near_opponent = j["key"]["near"].get<bool>();

        const CellRecord* rec = archive.find(key);
        REQUIRE(rec != nullptr);
        CHECK(rec->r_b == j["r_b"].get<double>());
        CHECK(rec->r_a == j["r_a"].get<double>());
        CHECK(rec->length() == j["length"].get<std::uint32_t>());
        CHECK(j["trajectory"].size() == rec->length());
        CHECK_FALSE(seen[key.index(kSegments)]);
        seen[key.index(kSegments)] = true;
        ++lines;
    }
    CHECK(lines == archive.size());
}
