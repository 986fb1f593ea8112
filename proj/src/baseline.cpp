#include "paucens/baseline.hpp"

#include <cmath>
#include <stdexcept>

namespace paucens {

double AdaBoostModel::score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (dim > 0 && x.size() != dim)
        throw std::invalid_argument("score: expected dimension " + std::to_string(dim) +
                                    ", got " + std::to_string(x.size()));
    double total = 0;
    for (std::size_t t = 0; t < learners.size(); ++t)
        total += w[static_cast<Eigen::Index>(t)] * predict(learners[t], x);
    return total;
}

Eigen::VectorXd AdaBoostModel::scores(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = score(X.row(i).transpose());
    return out;
}

AdaBoostResult adaboost_train(const Dataset& ds, const AdaBoostConfig& cfg) {
    ds.validate();
    if (cfg.t_max < 1) throw std::invalid_argument("adaboost: t_max must be >= 1");
    if (!(cfg.shrinkage > 0) || cfg.shrinkage > 1)
        throw std::invalid_argument("adaboost: shrinkage must be in (0, 1]");

    const Eigen::Index m = ds.m(), n = ds.n(), total = m + n;
    const QuantizedMatrix q = quantize(ds);
    Eigen::VectorXd labels(total);
    labels.head(m).setConstant(1.0);
    labels.tail(n).setConstant(-1.0);

    Eigen::VectorXd weights(total);
    weights.head(m).setConstant(0.5 / static_cast<double>(m));
    weights.tail(n).setConstant(0.5 / static_cast<double>(n));

    constexpr double kErrorFloor = 1e-10;
    AdaBoostResult result;
    result.model.shrinkage = cfg.shrinkage;
    result.model.dim = ds.dim();
    std::vector<double> coefficients;

    for (int t = 0; t < cfg.t_max; ++t) {
        WeakLearner learner;
        Eigen::VectorXd outputs(total);
        if (cfg.tree_depth <= 0) {
            StumpFit fit = train_stump(q, labels, weights);
            learner = fit.stump;
        } else {
            TreeFit fit = train_tree(q, labels, weights, cfg.tree_depth);
            learner = fit.tree;
        }
        for (Eigen::Index l = 0; l < total; ++l)
            outputs[l] = predict_bins(learner, q.bins.row(l).transpose());

        double error = 0;
        for (Eigen::Index l = 0; l < total; ++l)
            if (outputs[l] != labels[l]) error += weights[l];

        if (error >= 0.5) {
            result.stopped_early = true;
            break;
        }
        const double clamped = std::max(error, kErrorFloor);
        const double coefficient =
            cfg.shrinkage * 0.5 * std::log((1.0 - clamped) / clamped);

        result.model.learners.push_back(std::move(learner));
        coefficients.push_back(coefficient);

        weights = (weights.array() *
                   (-coefficient * labels.array() * outputs.array()).exp())
                      .matrix();
        weights /= weights.sum();

        double post_error = 0;
        for (Eigen::Index l = 0; l < total; ++l)
            if (outputs[l] != labels[l]) post_error += weights[l];
        result.rounds.push_back({error, coefficient, weights.sum(), post_error});
    }

    result.model.w.resize(static_cast<Eigen::Index>(coefficients.size()));
    for (std::size_t t = 0; t < coefficients.size(); ++t)
        result.model.w[static_cast<Eigen::Index>(t)] = coefficients[t];
    return result;
}

}  // namespace paucens
