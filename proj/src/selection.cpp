#include "goblend/selection.hpp"

#include <cmath>
#include <iostream>

namespace goblend {

namespace {

SelectionWeights collect(const Archive& archive, bool exclude_terminal) {
    SelectionWeights w;
    const auto& records = archive.records();
    w.slots.reserve(records.size());
    w.keys.reserve(records.size());
    for (std::uint32_t i = 0; i < records.size(); ++i) {
        if (exclude_terminal && records[i].terminal) continue;
        w.slots.push_back(i);
        w.keys.push_back(records[i].key);
    }
    if (w.slots.empty()) {
        throw ContractViolation("selection requires a non-empty (eligible) archive");
    }
    return w;
}

void normalize(SelectionWeights& w, std::vector<double>&& raw) {
    double total = 0.0;
    for (double v : raw) total += v;
    if (total <= 0.0) {
        std::cerr << "[goblend] warning: all selection weights are zero; "
                     "falling back to uniform\n";
        const double p = 1.0 / static_cast<double>(raw.size());
        for (double& v : raw) v = p;
    } else {
        for (double& v : raw) v /= total;
    }
    w.probs = std::move(raw);
}

} // namespace

SelectionWeights weights_uniform(const Archive& archive, bool exclude_terminal) {
    SelectionWeights w = collect(archive, exclude_terminal);
    w.probs.assign(w.slots.size(), 1.0 / static_cast<double>(w.slots.size()));
    return w;
}

SelectionWeights weights_roulette(const Archive& archive, AffectKind kind,
                                  bool exclude_terminal) {
    SelectionWeights w = collect(archive, exclude_terminal);
    std::vector<double> raw(w.slots.size());
    const auto& records = archive.records();
    for (std::size_t i = 0; i < w.slots.size(); ++i) {
        const double r = records[w.slots[i]].r_a;
        raw[i] = kind == AffectKind::kRac ? (r + 1.0) * 0.5 : r;
        if (raw[i] < 0.0) {
            throw ContractViolation("roulette selection requires non-negative rewards");
        }
    }
    normalize(w, std::move(raw));
    return w;
}

SelectionWeights weights_ucb(const Archive& archive, AffectKind kind, bool exclude_terminal) {
    SelectionWeights w = collect(archive, exclude_terminal);
    std::vector<double> raw(w.slots.size());
    const auto& records = archive.records();
    for (std::size_t i = 0; i < w.slots.size(); ++i) {
        const CellRecord& rec = records[w.slots[i]];
        const double r = kind == AffectKind::kRac ? (rec.r_a + 1.0) * 0.5 : rec.r_a;
        if (r < 0.0) {
            throw ContractViolation("UCB selection requires non-negative rewards");
        }
        raw[i] = r / std::sqrt(static_cast<double>(rec.c_seen) + 1.0);
    }
    normalize(w, std::move(raw));
    return w;
}

std::size_t sample(const SelectionWeights& weights, Rng& rng) {
    const double u = rng.uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i < weights.probs.size(); ++i) {
        cum += weights.probs[i];
        if (u < cum) return i;
    }
    return weights.probs.size() - 1;
}

} // namespace goblend
