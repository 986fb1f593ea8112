#include "paucens/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace paucens {

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::reached_t_max: return "reached_t_max";
        case StopReason::stationary: return "stationary";
        case StopReason::constraints_satisfied: return "constraints_satisfied";
        case StopReason::degenerate_weights: return "degenerate_weights";
    }
    return "unknown";
}

double EnsembleModel::score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (dim > 0 && x.size() != dim)
        throw std::invalid_argument("score: expected dimension " + std::to_string(dim) +
                                    ", got " + std::to_string(x.size()));
    double total = 0;
    for (std::size_t t = 0; t < learners.size(); ++t)
        total += w[static_cast<Eigen::Index>(t)] * predict(learners[t], x);
    return total;
}

Eigen::VectorXd EnsembleModel::scores(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = score(X.row(i).transpose());
    return out;
}

SampleWeights update_weights(const CuttingPlaneState& state, Eigen::Index m,
                             Eigen::Index n) {
    SampleWeights u;
    u.pos = Eigen::VectorXd::Zero(m);
    u.neg = Eigen::VectorXd::Zero(n);
    for (std::size_t a = 0; a < state.constraints.size(); ++a) {
        const double lambda = state.lambda.size() > static_cast<Eigen::Index>(a)
                                  ? state.lambda[static_cast<Eigen::Index>(a)]
                                  : 0.0;
        if (lambda == 0) continue;
        const OrderingConstraint& cons = state.constraints[a];
        for (Eigen::Index j = 0; j < cons.pairs.cols(); ++j) {
            const Eigen::Index neg_index = cons.neg_subset[static_cast<std::size_t>(j)];
            for (Eigen::Index i = 0; i < cons.pairs.rows(); ++i) {
                if (!cons.pairs(i, j)) continue;
                u.pos[i] += lambda;
                u.neg[neg_index] += lambda;
            }
        }
    }
    return u;
}

namespace {

struct WeakFit {
    WeakLearner learner;
    double edge = 0;
};

WeakFit fit_weak(const QuantizedMatrix& q, const Eigen::VectorXd& labels,
                 const Eigen::VectorXd& weights, int tree_depth) {
    if (tree_depth <= 0) {
        StumpFit fit = train_stump(q, labels, weights);
        return {fit.stump, fit.edge};
    }
    TreeFit fit = train_tree(q, labels, weights, tree_depth);
    return {fit.tree, fit.edge};
}

}  // namespace

TrainResult train(const Dataset& ds, const TrainConfig& cfg) {
    ds.validate();
    const Eigen::Index m = ds.m(), n = ds.n();
    cfg.range.validate_for(n);
    if (cfg.t_max < 1) throw std::invalid_argument("train: t_max must be >= 1");
    if (!(cfg.nu > 0)) throw std::invalid_argument("train: nu must be > 0");

    const QuantizedMatrix q = quantize(ds);
    Eigen::VectorXd labels(m + n);
    labels.head(m).setConstant(1.0);
    labels.tail(n).setConstant(-1.0);

    const double c = cfg.range.risk_normalizer(m, n);
    const Eigen::Index ja = cfg.range.j_alpha(n), jb = cfg.range.j_beta(n);
    const double max_loss = static_cast<double>(m) * static_cast<double>(jb - ja) / c;

    TrainResult result;
    result.model.range = cfg.range;
    result.model.nu = cfg.nu;
    result.model.dim = ds.dim();
    result.log.initial_objective = cfg.nu * max_loss;
    result.log.stop = StopReason::reached_t_max;

    Eigen::VectorXd weights(m + n);
    weights.head(m).setConstant(0.5 / static_cast<double>(m));
    weights.tail(n).setConstant(0.5 / static_cast<double>(n));

    WeakOutputMatrix H;
    H.pos.resize(0, m);
    H.neg.resize(0, n);
    double previous_objective = result.log.initial_objective;

    for (int t = 0; t < cfg.t_max; ++t) {
        if (!(weights.sum() > 0)) {
            result.log.stop = StopReason::degenerate_weights;
            break;
        }
        const WeakFit fit = fit_weak(q, labels, weights, cfg.tree_depth);
        const double stationarity = std::abs(fit.edge) / c;
        if (t > 0 && cfg.epsilon > 0 && stationarity < cfg.epsilon) {
            result.log.stop = StopReason::stationary;
            break;
        }

        const Eigen::Index tau = H.tau() + 1;
        H.pos.conservativeResize(tau, m);
        H.neg.conservativeResize(tau, n);
        for (Eigen::Index i = 0; i < m; ++i)
            H.pos(tau - 1, i) = predict_bins(fit.learner, q.bins.row(i).transpose());
        for (Eigen::Index j = 0; j < n; ++j)
            H.neg(tau - 1, j) = predict_bins(fit.learner, q.bins.row(m + j).transpose());

        CuttingPlaneState state = cutting_plane(H, cfg.range, cfg.nu, cfg.cp);
        result.model.learners.push_back(fit.learner);
        result.model.w = state.w;

        // Exact primal objective and the violation gap of the newest learner.
        const MostViolated worst = most_violated_constraint(H, state.w, cfg.range);
        const double objective =
            0.5 * state.w.squaredNorm() + cfg.nu * std::max(0.0, worst.q);
        const double gap = worst.constraint.phi_delta[tau - 1];

        IterationRecord record;
        record.t = t;
        record.edge = fit.edge;
        record.stationarity = stationarity;
        record.cp_iterations = static_cast<int>(state.iterations.size());
        record.working_set = static_cast<int>(state.constraints.size());
        record.xi = state.xi;
        record.objective = objective;
        record.objective_decrease = previous_objective - objective;
        record.newest_phi_gap = gap;
        record.decrease_bound = gap * gap;
        record.decrease_bound_damped = 0.5 * cfg.nu * cfg.nu * gap * gap;
        result.log.records.push_back(record);
        previous_objective = objective;

        const SampleWeights u = update_weights(state, m, n);
        weights.head(m) = u.pos;
        weights.tail(n) = u.neg;
        if (u.all_zero()) {
            result.log.stop = StopReason::constraints_satisfied;
            break;
        }
    }
    return result;
}

ConvergenceReport convergence_report(const TrainingLog& log, double slack) {
    ConvergenceReport report;
    for (const IterationRecord& record : log.records) {
        ConvergenceCheck check;
        check.t = record.t;
        check.objective = record.objective;
        check.decrease = record.objective_decrease;
        check.gap = record.newest_phi_gap;
        check.bound = record.decrease_bound;
        check.bound_damped = record.decrease_bound_damped;
        check.monotone_ok = record.objective_decrease >= -slack;
        check.bound_ok = record.objective_decrease >= record.decrease_bound - slack;
        check.bound_damped_ok =
            record.objective_decrease >= record.decrease_bound_damped - slack;
        report.all_monotone &= check.monotone_ok;
        report.all_bounds &= check.bound_ok;
        report.all_bounds_damped &= check.bound_damped_ok;
        report.rows.push_back(check);
    }
    return report;
}

}  // namespace paucens
