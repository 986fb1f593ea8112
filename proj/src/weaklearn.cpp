#include "paucens/weaklearn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace paucens {

namespace {
constexpr int kBins = 256;
}

double QuantizedMatrix::threshold_for_cut(Eigen::Index feature, int cut) const {
    const double width = (raw_max[feature] - raw_min[feature]) / kBins;
    // Constant features live in bin 0, below every cut; an infinite
    // threshold keeps the raw-space rule on the same side.
    if (!(width > 0)) return std::numeric_limits<double>::infinity();
    return raw_min[feature] + (cut + 1) * width;
}

QuantizedMatrix quantize(const Eigen::Ref<const Eigen::MatrixXd>& samples) {
    if (samples.rows() < 1 || samples.cols() < 1)
        throw std::invalid_argument("quantize: empty sample matrix");
    QuantizedMatrix q;
    const Eigen::Index n = samples.rows(), d = samples.cols();
    q.bins.resize(n, d);
    q.bin_edges.resize(kBins, d);
    q.raw_min = samples.colwise().minCoeff();
    q.raw_max = samples.colwise().maxCoeff();
    for (Eigen::Index f = 0; f < d; ++f) {
        const double lo = q.raw_min[f];
        const double range = q.raw_max[f] - lo;
        const double width = range / kBins;
        for (int k = 0; k < kBins; ++k) q.bin_edges(k, f) = lo + k * width;
        if (range <= 0) {
            q.bins.col(f).setZero();
            continue;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            double t = (samples(i, f) - lo) / range * kBins;
            int b = static_cast<int>(std::floor(t));
            q.bins(i, f) = static_cast<std::uint8_t>(std::clamp(b, 0, kBins - 1));
        }
    }
    return q;
}

QuantizedMatrix quantize(const Dataset& ds) {
    ds.validate();
    Eigen::MatrixXd all(ds.m() + ds.n(), ds.dim());
    all.topRows(ds.m()) = ds.positives;
    all.bottomRows(ds.n()) = ds.negatives;
    return quantize(all);
}

double DecisionTree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    int idx = 0;
    while (!nodes[static_cast<std::size_t>(idx)].leaf()) {
        const Node& node = nodes[static_cast<std::size_t>(idx)];
        idx = x[node.feature] >= node.threshold ? node.hi : node.lo;
    }
    return nodes[static_cast<std::size_t>(idx)].label;
}

double DecisionTree::predict_bins(
    const Eigen::Ref<const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>>& bins) const {
    int idx = 0;
    while (!nodes[static_cast<std::size_t>(idx)].leaf()) {
        const Node& node = nodes[static_cast<std::size_t>(idx)];
        idx = bins[node.feature] > node.cut ? node.hi : node.lo;
    }
    return nodes[static_cast<std::size_t>(idx)].label;
}

double predict(const WeakLearner& learner, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return std::visit([&](const auto& h) { return h.predict(x); }, learner);
}

double predict_bins(
    const WeakLearner& learner,
    const Eigen::Ref<const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>>& bins) {
    return std::visit([&](const auto& h) { return h.predict_bins(bins); }, learner);
}

StumpFit train_stump_subset(const QuantizedMatrix& q,
                            const Eigen::Ref<const Eigen::VectorXd>& labels,
                            const Eigen::Ref<const Eigen::VectorXd>& weights,
                            std::span<const Eigen::Index> rows) {
    if (labels.size() != q.num_samples() || weights.size() != q.num_samples())
        throw std::invalid_argument("train_stump: label/weight size mismatch");
    if ((weights.array() < 0).any() || !weights.allFinite())
        throw std::invalid_argument("train_stump: weights must be finite and >= 0");

    double total = 0;  // sum of u_l y_l over the subset
    double mass = 0;
    for (Eigen::Index r : rows) {
        total += weights[r] * labels[r];
        mass += weights[r];
    }
    if (!(mass > 0)) throw std::invalid_argument("train_stump: all-zero weights");

    StumpFit best;
    bool have_best = false;
    Eigen::VectorXd bin_sum(kBins);
    for (Eigen::Index f = 0; f < q.num_features(); ++f) {
        bin_sum.setZero();
        for (Eigen::Index r : rows)
            bin_sum[static_cast<int>(q.bins(r, f))] += weights[r] * labels[r];
        // edge(cut, +1) = total - 2 * prefix(cut); edge(cut, -1) is its negation.
        double prefix = 0;
        for (int cut = 0; cut + 1 < kBins; ++cut) {
            prefix += bin_sum[cut];
            const double edge_pos = total - 2.0 * prefix;
            for (int polarity : {+1, -1}) {
                const double edge = polarity > 0 ? edge_pos : -edge_pos;
                if (!have_best || edge > best.edge) {
                    best.stump = {f, cut, q.threshold_for_cut(f, cut), polarity};
                    best.edge = edge;
                    have_best = true;
                }
            }
        }
    }
    return best;
}

StumpFit train_stump(const QuantizedMatrix& q,
                     const Eigen::Ref<const Eigen::VectorXd>& labels,
                     const Eigen::Ref<const Eigen::VectorXd>& weights) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(q.num_samples()));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    return train_stump_subset(q, labels, weights, rows);
}

namespace {

int leaf_label(const Eigen::Ref<const Eigen::VectorXd>& labels,
               const Eigen::Ref<const Eigen::VectorXd>& weights,
               std::span<const Eigen::Index> rows) {
    double sum = 0;
    for (Eigen::Index r : rows) sum += weights[r] * labels[r];
    return sum >= 0 ? 1 : -1;
}

bool node_is_pure(const Eigen::Ref<const Eigen::VectorXd>& labels,
                  const Eigen::Ref<const Eigen::VectorXd>& weights,
                  std::span<const Eigen::Index> rows) {
    bool saw_pos = false, saw_neg = false;
    for (Eigen::Index r : rows) {
        if (weights[r] <= 0) continue;
        (labels[r] > 0 ? saw_pos : saw_neg) = true;
        if (saw_pos && saw_neg) return false;
    }
    return true;
}

int grow(DecisionTree& tree, const QuantizedMatrix& q,
         const Eigen::Ref<const Eigen::VectorXd>& labels,
         const Eigen::Ref<const Eigen::VectorXd>& weights,
         std::vector<Eigen::Index>& rows, int levels_left) {
    const int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    double mass = 0;
    for (Eigen::Index r : rows) mass += weights[r];
    if (levels_left == 0 || rows.empty() || !(mass > 0) ||
        node_is_pure(labels, weights, rows)) {
        tree.nodes[static_cast<std::size_t>(idx)].label =
            leaf_label(labels, weights, rows);
        return idx;
    }

    const StumpFit split = train_stump_subset(q, labels, weights, rows);
    std::vector<Eigen::Index> lo_rows, hi_rows;
    for (Eigen::Index r : rows)
        (q.bins(r, split.stump.feature) > split.stump.cut ? hi_rows : lo_rows)
            .push_back(r);
    if (lo_rows.empty() || hi_rows.empty()) {
        tree.nodes[static_cast<std::size_t>(idx)].label =
            leaf_label(labels, weights, rows);
        return idx;
    }

    rows.clear();
    rows.shrink_to_fit();
    const int lo = grow(tree, q, labels, weights, lo_rows, levels_left - 1);
    const int hi = grow(tree, q, labels, weights, hi_rows, levels_left - 1);
    Eigen::MatrixXd::Index feature = split.stump.feature;
    tree.nodes[static_cast<std::size_t>(idx)] = {feature, split.stump.cut,
                                                 split.stump.threshold, lo, hi, 0};
    return idx;
}

}  // namespace

TreeFit train_tree(const QuantizedMatrix& q,
                   const Eigen::Ref<const Eigen::VectorXd>& labels,
                   const Eigen::Ref<const Eigen::VectorXd>& weights, int depth) {
    if (depth < 1) throw std::invalid_argument("train_tree: depth must be >= 1");
    if (!(weights.sum() > 0)) throw std::invalid_argument("train_tree: all-zero weights");

    TreeFit fit;
    fit.tree.depth = depth;
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(q.num_samples()));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    grow(fit.tree, q, labels, weights, rows, depth);

    for (Eigen::Index r = 0; r < q.num_samples(); ++r)
        fit.edge += weights[r] * labels[r] * fit.tree.predict_bins(q.bins.row(r).transpose());
    return fit;
}

}  // namespace paucens
