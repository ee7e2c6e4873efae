#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "goblend/dataset.hpp"
#include "goblend/errors.hpp"

namespace goblend {

// Eq-style similarity between a predicted and a target affect value, both
// in [0, 1]: (1 - |h - t|)^2. Squaring widens the gap between poor and
// good matches.
double similarity(double h, double t);

// How neighbor arousal values are blended into one estimate.
enum class KnnWeighting {
    kInverseDistance,    // sum(a_i / (d_i + eps)) / sum(1 / (d_i + eps))
    kDistanceNormalized, // literal sum(d_i * a_i) / sum(d_i)
};

struct ArousalEstimate {
    double h_a = 0.0;  // distance-weighted neighbor mean
    double sigma = 0.0; // population std of the k neighbor arousal values
};

struct KnnConfig {
    int k = 5;
    double epsilon = 1e-6;
    KnnWeighting weighting = KnnWeighting::kInverseDistance;
};

// k-nearest-neighbor arousal surrogate over all windows of a demonstration
// dataset. Queries are exact (kd-tree with conservative pruning, validated
// against a linear-scan oracle in tests) and deterministic: ties at the
// k-th distance break toward the lowest (session, window) pair. The index
// is immutable after construction and safe for concurrent queries.
class KnnIndex {
public:
    explicit KnnIndex(const std::vector<DemoSession>& sessions);

    ArousalEstimate estimate(std::span<const double> query, const KnnConfig& config) const;

    std::size_t size() const { return arousal_.size(); }

    // Entry metadata in (session, window) order; used by tests.
    std::pair<std::uint32_t, std::uint32_t> entry_id(std::size_t i) const {
        return {session_of_[i], window_of_[i]};
    }
    const double* entry_features(std::size_t i) const {
        return features_.data() + i * kFeatureCount;
    }
    double entry_arousal(std::size_t i) const { return arousal_[i]; }

private:
    struct Node {
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::uint32_t begin = 0; // leaf range into order_
        std::uint32_t count = 0;
        std::uint16_t dim = 0;
        double split = 0.0;
    };

    struct Candidate {
        double d2;
        std::uint32_t idx; // position in (session, window) order
    };

    void build(std::uint32_t begin, std::uint32_t end, std::int32_t& out_node);
    void search(std::int32_t node, std::span<const double> q, double box_d2,
                std::vector<double>& contrib, Candidate* best, int k, int& filled) const;

    std::vector<double> features_; // n x kFeatureCount
    std::vector<double> arousal_;
    std::vector<std::uint32_t> session_of_;
    std::vector<std::uint32_t> window_of_;
    std::vector<std::uint32_t> order_; // kd-tree leaf ordering
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

// Predicted arousal trace of one trajectory plus running reward
// accumulators. extend() folds one window at a time; the accumulators equal
// a from-scratch recomputation (checked in tests).
struct ArousalTrajectory {
    std::vector<double> h;     // h_a(i)
    std::vector<double> sigma; // sigma(i)

    double sum_similarity = 0.0;   // sum of S_a(i)
    double sum_discounted = 0.0;   // sum of S_a(i) / (1 + sigma(i))
    double sum_confidence = 0.0;   // sum of +-1 CI-membership terms
    double sum_arousal = 0.0;      // sum of h_a(i)
    double sum_sigma_values = 0.0; // sum of sigma(i)

    int windows() const { return static_cast<int>(h.size()); }

    // Appends the estimate for window index windows() and updates all
    // accumulators against the target trace.
    void extend(const ArousalEstimate& est, const TargetTrace& target);
};

// Mean similarity to the target trace over the observed windows.
double reward_ra(const ArousalTrajectory& traj);

// Similarity discounted by neighbor disagreement: mean of S(i)/(1+sigma(i)).
double reward_rau(const ArousalTrajectory& traj);

// Mean of +1/-1 per window, +1 iff |h_a(i) - t_a(i)| < c_a(i) (strict).
double reward_rac(const ArousalTrajectory& traj);

// Mean predicted arousal; the max-arousal baseline's objective.
double reward_max_arousal(const ArousalTrajectory& traj);

} // namespace goblend
