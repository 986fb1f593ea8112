#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "paucens/dataset.hpp"

namespace paucens {

/// Feature values quantized into 256 equal-width bins over the observed
/// per-feature range. Constant features map every sample to bin 0.
struct QuantizedMatrix {
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> bins;  // N x d
    Eigen::MatrixXd bin_edges;  // 256 x d, edge k = raw_min + k * width
    Eigen::VectorXd raw_min, raw_max;

    Eigen::Index num_samples() const { return bins.rows(); }
    Eigen::Index num_features() const { return bins.cols(); }

    /// Raw-space threshold equivalent to the bin cut `bin > cut`:
    /// x >= threshold_for_cut(f, cut) iff bin(x, f) > cut.
    double threshold_for_cut(Eigen::Index feature, int cut) const;
};

QuantizedMatrix quantize(const Eigen::Ref<const Eigen::MatrixXd>& samples);

/// Positives first, then negatives; labels +1 for rows < m().
QuantizedMatrix quantize(const Dataset& ds);

/// Axis-aligned threshold classifier: predicts `polarity` when
/// x[feature] >= threshold and -polarity otherwise.
struct DecisionStump {
    Eigen::Index feature = 0;
    int cut = 0;            // bin-space cut, prediction flips above it
    double threshold = 0;   // raw-space equivalent
    int polarity = 1;       // +1 or -1

    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        return x[feature] >= threshold ? polarity : -polarity;
    }
    double predict_bins(
        const Eigen::Ref<const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>>& bins) const {
        return bins[feature] > cut ? polarity : -polarity;
    }
};

/// Axis-aligned binary tree grown greedily; internal nodes carry stump
/// splits, leaves carry class labels.
struct DecisionTree {
    struct Node {
        Eigen::Index feature = -1;
        int cut = 0;
        double threshold = 0;
        int lo = -1, hi = -1;  // children for bin <= cut / bin > cut
        int label = 1;         // used when leaf
        bool leaf() const { return lo < 0; }
    };
    std::vector<Node> nodes;  // nodes[0] is the root
    int depth = 0;

    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    double predict_bins(
        const Eigen::Ref<const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>>& bins) const;
};

using WeakLearner = std::variant<DecisionStump, DecisionTree>;

double predict(const WeakLearner& learner, const Eigen::Ref<const Eigen::VectorXd>& x);
double predict_bins(
    const WeakLearner& learner,
    const Eigen::Ref<const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>>& bins);

struct StumpFit {
    DecisionStump stump;
    double edge = 0;  // sum_l u_l y_l h(x_l), maximized
};

struct TreeFit {
    DecisionTree tree;
    double edge = 0;
};

/// Maximizes the weighted edge over all (feature, bin cut, polarity)
/// candidates; ties break to the lowest feature, lowest cut, polarity +1.
/// Throws std::invalid_argument when weights are all zero or negative.
StumpFit train_stump(const QuantizedMatrix& q,
                     const Eigen::Ref<const Eigen::VectorXd>& labels,
                     const Eigen::Ref<const Eigen::VectorXd>& weights);

/// Greedy top-down tree of the given depth: internal nodes split by the
/// best stump over the samples routed to them, leaves take the sign of the
/// weighted label sum (ties and empty leaves go to +1). Pure or
/// zero-weight nodes stop early. depth >= 1.
TreeFit train_tree(const QuantizedMatrix& q,
                   const Eigen::Ref<const Eigen::VectorXd>& labels,
                   const Eigen::Ref<const Eigen::VectorXd>& weights, int depth);

/// Row-subset variants used by the tree builder and tests.
StumpFit train_stump_subset(const QuantizedMatrix& q,
                            const Eigen::Ref<const Eigen::VectorXd>& labels,
                            const Eigen::Ref<const Eigen::VectorXd>& weights,
                            std::span<const Eigen::Index> rows);

}  // namespace paucens
