#pragma once

#include <Eigen/Core>
#include <vector>

#include "paucens/dataset.hpp"
#include "paucens/metrics.hpp"
#include "paucens/structopt.hpp"
#include "paucens/weaklearn.hpp"

namespace paucens {

struct TrainConfig {
    PaucRange range{0.0, 1.0};
    double nu = 0.25;
    int t_max = 10;
    double epsilon = 1e-4;  // stationarity stop threshold; <= 0 disables
    int tree_depth = 3;     // depth-3 trees by default; 0 trains plain decision stumps
    CuttingPlaneOptions cp{};
};

enum class StopReason {
    reached_t_max,
    stationary,              // best candidate's scaled edge fell below epsilon
    constraints_satisfied,   // dual weights vanished: the ranking constraints hold
    degenerate_weights,      // weak-learner training impossible (zero weight mass)
};

const char* to_string(StopReason reason);

/// Per-round training diagnostics. The two decrease bounds are candidate
/// floors on objective_decrease: the squared feature-map gap of the newest
/// learner at the most violated ordering, and the same gap damped through
/// the regularizer, (nu*gap)^2/2 — the decrease a one-dimensional solve
/// along the newest coordinate alone already attains.
struct IterationRecord {
    int t = 0;
    double edge = 0;           // weighted edge of the learner added this round
    double stationarity = 0;   // |edge| / c, compared against epsilon
    int cp_iterations = 0;
    int working_set = 0;
    double xi = 0;
    double objective = 0;           // 1/2 ||w||^2 + nu * max violation
    double objective_decrease = 0;  // previous objective minus this one
    double newest_phi_gap = 0;
    double decrease_bound = 0;         // gap^2
    double decrease_bound_damped = 0;  // (nu * gap)^2 / 2
};

struct TrainingLog {
    std::vector<IterationRecord> records;
    StopReason stop = StopReason::reached_t_max;
    double initial_objective = 0;  // nu * max loss, before any learner
};

struct EnsembleModel {
    std::vector<WeakLearner> learners;
    Eigen::VectorXd w;
    PaucRange range{0.0, 1.0};
    double nu = 0;
    Eigen::Index dim = 0;  // trained feature dimension

    /// Weighted vote sum w_t * h_t(x). Throws std::invalid_argument when
    /// x has the wrong dimension.
    double score(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    /// One score per row of X.
    Eigen::VectorXd scores(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
};

struct TrainResult {
    EnsembleModel model;
    TrainingLog log;
};

/// Per-sample weights induced by the dual variables of the working set:
/// a positive accumulates lambda over its active pairs, a negative over the
/// active pairs of the columns where it appears; negatives outside every
/// subset get zero.
struct SampleWeights {
    Eigen::VectorXd pos, neg;
    bool all_zero() const { return pos.isZero(0.0) && neg.isZero(0.0); }
};

SampleWeights update_weights(const CuttingPlaneState& state, Eigen::Index m,
                             Eigen::Index n);

/// Column-generation training: each round fits the weak learner with the
/// largest weighted edge, re-solves all coefficients with the cutting
/// plane, and refreshes the sample weights from the dual variables.
TrainResult train(const Dataset& ds, const TrainConfig& cfg);

struct ConvergenceCheck {
    int t = 0;
    double objective = 0;
    double decrease = 0;
    double gap = 0;
    double bound = 0;
    double bound_damped = 0;
    bool monotone_ok = true;
    bool bound_ok = true;
    bool bound_damped_ok = true;
};

struct ConvergenceReport {
    std::vector<ConvergenceCheck> rows;
    bool all_monotone = true;
    bool all_bounds = true;
    bool all_bounds_damped = true;
};

/// Flags every round whose objective decrease is negative or falls short
/// of the decrease bounds, each within the given slack.
ConvergenceReport convergence_report(const TrainingLog& log, double slack = 1e-9);

}  // namespace paucens
