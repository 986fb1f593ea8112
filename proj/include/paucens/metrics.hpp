#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace paucens {

/// A false-positive-rate interval [alpha, beta] together with the rank
/// indices it induces on a set of n negatives: j_alpha = ceil(n*alpha),
/// j_beta = floor(n*beta). Products that land within 1e-9 of an integer
/// are treated as that integer so grid values like beta = 0.3 behave
/// exactly.
struct PaucRange {
    double alpha = 0.0;
    double beta = 1.0;

    PaucRange() = default;
    PaucRange(double alpha_, double beta_);  // throws std::invalid_argument

    Eigen::Index j_alpha(Eigen::Index n) const;
    Eigen::Index j_beta(Eigen::Index n) const;

    /// Normalizing constant of the partial-AUC risk: m*n*(beta - alpha).
    double risk_normalizer(Eigen::Index m, Eigen::Index n) const;

    /// Throws std::invalid_argument unless j_beta(n) - j_alpha(n) >= 1.
    void validate_for(Eigen::Index n) const;
};

/// Fraction of (positive, negative) pairs ranked correctly by score.
/// A positive tied with a negative counts as ranked incorrectly.
double auc(const Eigen::Ref<const Eigen::VectorXd>& pos_scores,
           const Eigen::Ref<const Eigen::VectorXd>& neg_scores);

/// Partial AUC over the FPR range: negatives are sorted by descending
/// score (ties by ascending input index) and only pairs whose negative
/// ranks in positions j_alpha+1..j_beta count. Returns 1 - risk with
/// risk = misordered_pairs / (m*n*(beta-alpha)); ties are misordered.
double pauc(const Eigen::Ref<const Eigen::VectorXd>& pos_scores,
            const Eigen::Ref<const Eigen::VectorXd>& neg_scores,
            const PaucRange& range);

/// Empirical ROC polyline: one point per distinct threshold (predict
/// positive iff score >= threshold), starting at (0,0) and ending at
/// (1,1), monotone in FPR. Pairs are (fpr, tpr).
std::vector<std::pair<double, double>> roc_points(
    const Eigen::Ref<const Eigen::VectorXd>& pos_scores,
    const Eigen::Ref<const Eigen::VectorXd>& neg_scores);

namespace testhooks {
/// Flips the positive-vs-negative tie rule used by auc/pauc from
/// pessimistic (tie = misordered) to optimistic. Exists so the fault
/// injection path of the self-test suite can prove the metric oracle
/// actually bites. Never use outside tests.
void set_pessimistic_tie_rule(bool pessimistic);
bool pessimistic_tie_rule();
}  // namespace testhooks

}  // namespace paucens
