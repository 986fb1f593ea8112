#pragma once

#include <Eigen/Core>
#include <vector>

#include "paucens/dataset.hpp"
#include "paucens/weaklearn.hpp"

namespace paucens {

struct AdaBoostConfig {
    int t_max = 10;
    int tree_depth = 3;      // depth-3 trees by default; 0 trains plain decision stumps
    double shrinkage = 1.0;  // in (0, 1]
};

struct AdaBoostModel {
    std::vector<WeakLearner> learners;
    Eigen::VectorXd w;
    double shrinkage = 1.0;
    Eigen::Index dim = 0;  // trained feature dimension

    double score(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    Eigen::VectorXd scores(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
};

struct AdaBoostRound {
    double weighted_error = 0;     // of the chosen learner, before the update
    double coefficient = 0;        // shrinkage * 0.5 * ln((1-e)/e), capped at e = 0
    double weight_sum_after = 0;   // should renormalize to 1
    double post_update_error = 0;  // the chosen learner under the new weights
};

struct AdaBoostResult {
    AdaBoostModel model;
    std::vector<AdaBoostRound> rounds;
    bool stopped_early = false;  // hit a learner with weighted error >= 0.5
};

/// Stagewise boosting with the multiplicative exponential weight update and
/// renormalization to sum 1. Weights start at 0.5/m per positive and 0.5/n
/// per negative. A zero-error learner gets the coefficient for error 1e-10
/// instead of infinity.
AdaBoostResult adaboost_train(const Dataset& ds, const AdaBoostConfig& cfg);

}  // namespace paucens
