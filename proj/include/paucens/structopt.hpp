#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "paucens/metrics.hpp"

namespace paucens {

/// Weak-learner outputs on the training set. Row t carries the +-1
/// predictions of learner t; columns index samples.
struct WeakOutputMatrix {
    Eigen::MatrixXd pos;  // tau x m
    Eigen::MatrixXd neg;  // tau x n

    Eigen::Index tau() const { return pos.rows(); }
    Eigen::Index m() const { return pos.cols(); }
    Eigen::Index n() const { return neg.cols(); }
};

/// One ranking constraint: a subset zeta of j_beta negatives (stored in
/// descending score order at creation time) and the pair matrix whose
/// entry (i, j) is 1 when positive i is ranked below the j-th chosen
/// negative. The loss and both feature-map vectors are cached.
struct OrderingConstraint {
    std::vector<Eigen::Index> neg_subset;                            // zeta, size j_beta
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> pairs;  // m x j_beta
    double loss = 0;               // Delta(Y, Y*)
    Eigen::VectorXd phi;           // phi_zeta(H, Y)
    Eigen::VectorXd phi_delta;     // phi_zeta(H, Y*) - phi_zeta(H, Y)
};

/// Ranking loss of a constraint: (1/c) * sum of active pairs whose column
/// (rank position within zeta) lies in (j_alpha, j_beta], c = m*n*(beta-alpha).
double pauc_loss(const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& pairs,
                 Eigen::Index m, Eigen::Index n, const PaucRange& range);

/// Joint feature map phi_zeta(H, Y): component t is
/// (1/c) * sum_{i, j<=j_beta} (1 - y_ij) (h_t(x_i+) - h_t(x_kj-)).
Eigen::VectorXd feature_map(
    const WeakOutputMatrix& H, std::span<const Eigen::Index> neg_subset,
    const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& pairs,
    const PaucRange& range);

/// Builds a fully-cached constraint from a subset and pair matrix.
OrderingConstraint make_constraint(
    const WeakOutputMatrix& H, std::vector<Eigen::Index> neg_subset,
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> pairs,
    const PaucRange& range);

/// The all-zeros constraint (every positive ranked above every chosen
/// negative) over the top-scoring negatives under w = 0, i.e. input order.
OrderingConstraint correct_ordering_constraint(const WeakOutputMatrix& H,
                                               const PaucRange& range);

/// Violation of a constraint under coefficients w:
/// Q_w(Y) = Delta - w . (phi(Y*) - phi(Y)).
double constraint_violation(const OrderingConstraint& constraint,
                            const Eigen::Ref<const Eigen::VectorXd>& w);

struct MostViolated {
    OrderingConstraint constraint;
    double q = 0;                        // Q_w at the maximizer
    std::size_t candidates_evaluated = 0;  // brute force only
};

/// Maximizes Q_w over all subsets and pair matrices. Requires alpha == 0,
/// where the maximizer takes zeta = the j_beta top-scoring negatives
/// (descending w-score, ties by ascending index) and activates pair (i,j)
/// exactly when 1 - w.(h_:i+ - h_:kj-) > 0. Ranges with alpha > 0 fall
/// back to the exhaustive search and inherit its size guard.
MostViolated most_violated_constraint(const WeakOutputMatrix& H,
                                      const Eigen::Ref<const Eigen::VectorXd>& w,
                                      const PaucRange& range);

/// Exhaustive maximizer over all C(n, j_beta) subsets and all 2^(m*j_beta)
/// pair matrices. Guarded: requires m*j_beta <= 12 and C(n, j_beta) <= 1e4.
MostViolated brute_force_most_violated(const WeakOutputMatrix& H,
                                       const Eigen::Ref<const Eigen::VectorXd>& w,
                                       const PaucRange& range);

struct QpOptions {
    double kkt_tol = 1e-8;
    int max_passes = 200000;
};

struct QpSolution {
    Eigen::VectorXd w;
    double xi = 0;
    Eigen::VectorXd lambda;
    double dual_objective = 0;
    double primal_objective = 0;
    double kkt_residual = 0;
    int passes = 0;
};

/// Solves min 1/2 ||w||^2 + nu * xi  s.t.  Q_w(Y) <= xi for Y in the
/// working set and xi >= 0, through its dual
///   max_lambda  Delta . lambda - 1/2 lambda' G lambda,
///   0 <= sum lambda <= nu,  lambda >= 0,
/// by coordinate ascent with pairwise mass transfers once the budget
/// binds. w is recovered as sum_Y lambda_Y * phi_delta(Y). Throws
/// NumericError if the KKT residual is still above tolerance at the
/// iteration cap.
QpSolution solve_restricted_qp(std::span<const OrderingConstraint> working_set,
                               double nu,
                               const Eigen::VectorXd& warm_lambda = Eigen::VectorXd(),
                               const QpOptions& opts = {});

struct CuttingPlaneOptions {
    double eps = 1e-4;        // termination slack on Q_w(Ybar) <= xi + eps
    int max_iterations = 1000;
    QpOptions qp = {};
};

struct CuttingPlaneIteration {
    double q_bar = 0;  // violation of the constraint found this round
    double xi = 0;     // slack before the constraint was added
    int working_set = 0;
    double dual_objective = 0;
};

struct CuttingPlaneState {
    Eigen::VectorXd w;
    double xi = 0;
    std::vector<OrderingConstraint> constraints;
    Eigen::VectorXd lambda;
    double nu = 0;
    double eps = 0;
    std::vector<CuttingPlaneIteration> iterations;
    bool converged = false;
};

/// Alternates restricted QP solves with most-violated-constraint searches
/// until no constraint is violated by more than eps. Throws NumericError
/// past max_iterations.
CuttingPlaneState cutting_plane(const WeakOutputMatrix& H, const PaucRange& range,
                                double nu, const CuttingPlaneOptions& opts = {});

}  // namespace paucens
