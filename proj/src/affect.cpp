#include "goblend/affect.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace goblend {

double similarity(double h, double t) {
    if (!(h >= 0.0 && h <= 1.0) || !(t >= 0.0 && t <= 1.0)) {
        throw ContractViolation("similarity() inputs must lie in [0, 1]");
    }
    const double d = 1.0 - std::abs(h - t);
    return d * d;
}

KnnIndex::KnnIndex(const std::vector<DemoSession>& sessions) {
    std::size_t total = 0;
    for (const auto& s : sessions) {
        total += static_cast<std::size_t>(s.window_count());
    }
    if (total == 0) {
        throw InsufficientData("k-NN index requires a non-empty dataset");
    }
    features_.reserve(total * kFeatureCount);
    arousal_.reserve(total);
    session_of_.reserve(total);
    window_of_.reserve(total);
    for (std::uint32_t si = 0; si < sessions.size(); ++si) {
        const auto& s = sessions[si];
        for (int w = 0; w < s.window_count(); ++w) {
            const double* f = s.window_features(w);
            features_.insert(features_.end(), f, f + kFeatureCount);
            arousal_.push_back(s.arousal[static_cast<std::size_t>(w)]);
            session_of_.push_back(si);
            window_of_.push_back(static_cast<std::uint32_t>(w));
        }
    }

    order_.resize(total);
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * total / 8 + 2);
    build(0, static_cast<std::uint32_t>(total), root_);
}

void KnnIndex::build(std::uint32_t begin, std::uint32_t end, std::int32_t& out_node) {
    constexpr std::uint32_t kLeafSize = 16;
    Node node;
    if (end - begin <= kLeafSize) {
        node.begin = begin;
        node.count = end - begin;
        out_node = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(node);
        return;
    }

    // Split on the widest dimension at the median.
    double best_extent = -1.0;
    int best_dim = 0;
    for (int d = 0; d < kFeatureCount; ++d) {
        double mn = std::numeric_limits<double>::infinity();
        double mx = -mn;
        for (std::uint32_t i = begin; i < end; ++i) {
            const double v = features_[order_[i] * kFeatureCount + static_cast<std::uint32_t>(d)];
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        if (mx - mn > best_extent) {
            best_extent = mx - mn;
            best_dim = d;
        }
    }

    const std::uint32_t mid = begin + (end - begin) / 2;
    const int dim = best_dim;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double va = features_[a * kFeatureCount + static_cast<std::uint32_t>(dim)];
                         const double vb = features_[b * kFeatureCount + static_cast<std::uint32_t>(dim)];
                         if (va != vb) return va < vb;
                         return a < b;
                     });

    node.dim = static_cast<std::uint16_t>(dim);
    node.split = features_[order_[mid] * kFeatureCount + static_cast<std::uint32_t>(dim)];
    out_node = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);
    std::int32_t left = -1, right = -1;
    build(begin, mid, left);
    build(mid, end, right);
    nodes_[static_cast<std::size_t>(out_node)].left = left;
    nodes_[static_cast<std::size_t>(out_node)].right = right;
}

namespace {

// Lexicographic (distance, entry order): lower wins.
inline bool better(double d2a, std::uint32_t ia, double d2b, std::uint32_t ib) {
    if (d2a != d2b) return d2a < d2b;
    return ia < ib;
}

} // namespace

void KnnIndex::search(std::int32_t node_idx, std::span<const double> q, double box_d2,
                      std::vector<double>& contrib, Candidate* best, int k,
                      int& filled) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_idx)];
    if (node.count > 0 || node.left < 0) {
        for (std::uint32_t i = node.begin; i < node.begin + node.count; ++i) {
            const std::uint32_t idx = order_[i];
            const double* f = features_.data() + idx * kFeatureCount;
            const double worst = filled == k ? best[k - 1].d2
                                             : std::numeric_limits<double>::infinity();
            double d2 = 0.0;
            bool alive = true;
            for (int d = 0; d < kFeatureCount; ++d) {
                const double diff = q[static_cast<std::size_t>(d)] - f[d];
                d2 += diff * diff;
                if (d2 > worst) {
                    alive = false;
                    break;
                }
            }
            if (!alive) continue;
            if (filled == k && !better(d2, idx, best[k - 1].d2, best[k - 1].idx)) continue;
            // Insertion sort into the bounded candidate list.
            int pos = filled < k ? filled : k - 1;
            if (filled < k) ++filled;
            while (pos > 0 && better(d2, idx, best[pos - 1].d2, best[pos - 1].idx)) {
                best[pos] = best[pos - 1];
                --pos;
            }
            best[pos] = Candidate{d2, idx};
        }
        return;
    }

    const int dim = node.dim;
    const double gap = q[static_cast<std::size_t>(dim)] - node.split;
    const std::int32_t near = gap < 0.0 ? node.left : node.right;
    const std::int32_t far = gap < 0.0 ? node.right : node.left;

    search(near, q, box_d2, contrib, best, k, filled);

    // The far child's region is bounded by the split plane in `dim`; its
    // minimum distance grows by replacing this dimension's contribution.
    const double old = contrib[static_cast<std::size_t>(dim)];
    const double cand = gap * gap;
    const double updated = std::max(old, cand);
    const double far_d2 = box_d2 - old + updated;
    const double bound = filled == k ? best[k - 1].d2
                                     : std::numeric_limits<double>::infinity();
    if (far_d2 <= bound) { // equal distances may still win on entry order
        contrib[static_cast<std::size_t>(dim)] = updated;
        search(far, q, box_d2 - old + updated, contrib, best, k, filled);
        contrib[static_cast<std::size_t>(dim)] = old;
    }
}

ArousalEstimate KnnIndex::estimate(std::span<const double> query,
                                   const KnnConfig& config) const {
    if (query.size() != kFeatureCount) {
        throw ContractViolation("query feature vector has wrong length");
    }
    if (config.k < 1) {
        throw ContractViolation("k must be >= 1");
    }
    int k = config.k;
    if (static_cast<std::size_t>(k) > size()) {
        std::cerr << "[goblend] warning: k=" << k << " exceeds dataset size " << size()
                  << "; using all entries\n";
        k = static_cast<int>(size());
    }

    constexpr int kMaxK = 64;
    Candidate stack_best[kMaxK];
    std::vector<Candidate> heap_best;
    Candidate* best = stack_best;
    if (k > kMaxK) {
        heap_best.resize(static_cast<std::size_t>(k));
        best = heap_best.data();
    }
    int filled = 0;
    std::vector<double> contrib(kFeatureCount, 0.0);
    search(root_, query, 0.0, contrib, best, k, filled);

    // Blend the k neighbor arousal values.
    double h = 0.0;
    if (config.weighting == KnnWeighting::kInverseDistance) {
        double wsum = 0.0, asum = 0.0;
        for (int i = 0; i < filled; ++i) {
            const double w = 1.0 / (std::sqrt(best[i].d2) + config.epsilon);
            wsum += w;
            asum += w * arousal_[best[i].idx];
        }
        h = asum / wsum;
    } else {
        double dsum = 0.0, asum = 0.0;
        for (int i = 0; i < filled; ++i) {
            const double d = std::sqrt(best[i].d2);
            dsum += d;
            asum += d * arousal_[best[i].idx];
        }
        if (dsum > 0.0) {
            h = asum / dsum;
        } else {
            for (int i = 0; i < filled; ++i) h += arousal_[best[i].idx];
            h /= filled;
        }
    }

    bool all_equal = true;
    for (int i = 1; i < filled; ++i) {
        all_equal = all_equal && arousal_[best[i].idx] == arousal_[best[0].idx];
    }
    double var = 0.0;
    if (!all_equal) {
        double mean = 0.0;
        for (int i = 0; i < filled; ++i) mean += arousal_[best[i].idx];
        mean /= filled;
        for (int i = 0; i < filled; ++i) {
            const double d = arousal_[best[i].idx] - mean;
            var += d * d;
        }
        var /= filled;
    }

    ArousalEstimate est;
    est.h_a = std::clamp(h, 0.0, 1.0);
    est.sigma = std::sqrt(var);
    return est;
}

void ArousalTrajectory::extend(const ArousalEstimate& est, const TargetTrace& target) {
    const int w = windows();
    if (w >= target.horizon()) {
        throw ContractViolation("arousal trajectory exceeds the target horizon");
    }
    const double t = target.mean[static_cast<std::size_t>(w)];
    const double c = target.ci[static_cast<std::size_t>(w)];
    const double sim = similarity(est.h_a, t);

    h.push_back(est.h_a);
    sigma.push_back(est.sigma);
    sum_similarity += sim;
    sum_discounted += sim / (1.0 + est.sigma);
    sum_confidence += std::abs(est.h_a - t) < c ? 1.0 : -1.0;
    sum_arousal += est.h_a;
    sum_sigma_values += est.sigma;
}

double reward_ra(const ArousalTrajectory& traj) {
    return traj.windows() == 0 ? 0.0 : traj.sum_similarity / traj.windows();
}

double reward_rau(const ArousalTrajectory& traj) {
    return traj.windows() == 0 ? 0.0 : traj.sum_discounted / traj.windows();
}

double reward_rac(const ArousalTrajectory& traj) {
    return traj.windows() == 0 ? 0.0 : traj.sum_confidence / traj.windows();
}

double reward_max_arousal(const ArousalTrajectory& traj) {
    return traj.windows() == 0 ? 0.0 : traj.sum_arousal / traj.windows();
}

} // namespace goblend
