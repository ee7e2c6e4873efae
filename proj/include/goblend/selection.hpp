#pragma once

#include <cstdint>
#include <vector>

#include "goblend/archive.hpp"
#include "goblend/rng.hpp"

namespace goblend {

// Normalized selection distribution over archive cells. `slots` indexes the
// archive's insertion-ordered record list in parallel with `keys`/`probs`.
struct SelectionWeights {
    std::vector<std::uint32_t> slots;
    std::vector<CellKey> keys;
    std::vector<double> probs; // normalized, sums to 1

    std::size_t size() const { return slots.size(); }
};

// Equal chance over every eligible cell.
SelectionWeights weights_uniform(const Archive& archive, bool exclude_terminal = false);

// Selection probability proportional to the stored affect reward. When the
// affect function is the CI-membership reward (range [-1, 1]), values are
// shifted by (r + 1) / 2 first; an all-zero archive falls back to uniform
// with a warning.
SelectionWeights weights_roulette(const Archive& archive, AffectKind kind = AffectKind::kRa,
                                  bool exclude_terminal = false);

// Roulette weight discounted by visits: W_a / sqrt(c_seen + 1), normalized.
SelectionWeights weights_ucb(const Archive& archive, AffectKind kind = AffectKind::kRa,
                             bool exclude_terminal = false);

// Draws one cell; deterministic given the generator state. Returns the
// position within `weights`.
std::size_t sample(const SelectionWeights& weights, Rng& rng);

} // namespace goblend
