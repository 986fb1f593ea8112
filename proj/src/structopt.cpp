#include "paucens/structopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "paucens/errors.hpp"

namespace paucens {

namespace {

void check_h(const WeakOutputMatrix& H) {
    if (H.tau() < 1 || H.m() < 1 || H.n() < 1)
        throw std::invalid_argument("weak output matrix: needs tau, m, n >= 1");
    if (H.neg.rows() != H.tau())
        throw std::invalid_argument("weak output matrix: row count mismatch");
}

std::vector<Eigen::Index> rank_negatives(const Eigen::VectorXd& neg_scores) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(neg_scores.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return neg_scores[a] > neg_scores[b];
    });
    return order;
}

}  // namespace

double pauc_loss(const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& pairs,
                 Eigen::Index m, Eigen::Index n, const PaucRange& range) {
    range.validate_for(n);
    const Eigen::Index ja = range.j_alpha(n);
    double active = 0;
    for (Eigen::Index j = ja; j < pairs.cols(); ++j)
        for (Eigen::Index i = 0; i < pairs.rows(); ++i) active += pairs(i, j);
    return active / range.risk_normalizer(m, n);
}

Eigen::VectorXd feature_map(
    const WeakOutputMatrix& H, std::span<const Eigen::Index> neg_subset,
    const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& pairs,
    const PaucRange& range) {
    check_h(H);
    const Eigen::Index m = H.m(), jb = static_cast<Eigen::Index>(neg_subset.size());
    if (pairs.rows() != m || pairs.cols() != jb)
        throw std::invalid_argument("feature_map: pair matrix shape mismatch");

    // phi = (1/c) * (H+ * a - H-[zeta] * b) with a_i / b_j the inactive-pair
    // counts of row i / column j.
    Eigen::VectorXd row_inactive = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd col_inactive = Eigen::VectorXd::Zero(jb);
    for (Eigen::Index j = 0; j < jb; ++j)
        for (Eigen::Index i = 0; i < m; ++i) {
            const double inactive = 1.0 - pairs(i, j);
            row_inactive[i] += inactive;
            col_inactive[j] += inactive;
        }
    Eigen::VectorXd phi = H.pos * row_inactive;
    for (Eigen::Index j = 0; j < jb; ++j)
        phi -= H.neg.col(neg_subset[static_cast<std::size_t>(j)]) * col_inactive[j];
    return phi / range.risk_normalizer(m, H.n());
}

OrderingConstraint make_constraint(
    const WeakOutputMatrix& H, std::vector<Eigen::Index> neg_subset,
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> pairs,
    const PaucRange& range) {
    check_h(H);
    const Eigen::Index m = H.m(), n = H.n();
    const Eigen::Index jb = range.j_beta(n);
    if (static_cast<Eigen::Index>(neg_subset.size()) != jb)
        throw std::invalid_argument("make_constraint: subset size must be j_beta");

    OrderingConstraint c;
    c.loss = pauc_loss(pairs, m, n, range);
    c.phi = feature_map(H, neg_subset, pairs, range);

    // phi_delta = (1/c) * sum over active pairs of (h_:i+ - h_:kj-).
    Eigen::VectorXd row_active = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd col_active = Eigen::VectorXd::Zero(jb);
    for (Eigen::Index j = 0; j < jb; ++j)
        for (Eigen::Index i = 0; i < m; ++i) {
            row_active[i] += pairs(i, j);
            col_active[j] += pairs(i, j);
        }
    Eigen::VectorXd delta = H.pos * row_active;
    for (Eigen::Index j = 0; j < jb; ++j)
        delta -= H.neg.col(neg_subset[static_cast<std::size_t>(j)]) * col_active[j];
    c.phi_delta = delta / range.risk_normalizer(m, n);

    c.neg_subset = std::move(neg_subset);
    c.pairs = std::move(pairs);
    return c;
}

OrderingConstraint correct_ordering_constraint(const WeakOutputMatrix& H,
                                               const PaucRange& range) {
    check_h(H);
    const Eigen::Index jb = range.j_beta(H.n());
    std::vector<Eigen::Index> subset(static_cast<std::size_t>(jb));
    std::iota(subset.begin(), subset.end(), Eigen::Index{0});
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> pairs =
        Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(H.m(), jb);
    return make_constraint(H, std::move(subset), std::move(pairs), range);
}

double constraint_violation(const OrderingConstraint& constraint,
                            const Eigen::Ref<const Eigen::VectorXd>& w) {
    return constraint.loss - w.dot(constraint.phi_delta);
}

MostViolated most_violated_constraint(const WeakOutputMatrix& H,
                                      const Eigen::Ref<const Eigen::VectorXd>& w,
                                      const PaucRange& range) {
    check_h(H);
    const Eigen::Index m = H.m(), n = H.n();
    range.validate_for(n);
    if (w.size() != H.tau())
        throw std::invalid_argument("most_violated_constraint: w size mismatch");
    if (range.j_alpha(n) != 0) return brute_force_most_violated(H, w, range);

    const Eigen::Index jb = range.j_beta(n);
    const Eigen::VectorXd pos_scores = H.pos.transpose() * w;
    const Eigen::VectorXd neg_scores = H.neg.transpose() * w;

    const auto order = rank_negatives(neg_scores);
    std::vector<Eigen::Index> subset(order.begin(), order.begin() + jb);

    // With alpha = 0 every column shares the loss window, so each pair can
    // be activated independently: y_ij = 1 exactly when its hinge term
    // 1 - (s_i+ - s_kj-) is strictly positive.
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> pairs(m, jb);
    for (Eigen::Index j = 0; j < jb; ++j) {
        const double neg_score = neg_scores[subset[static_cast<std::size_t>(j)]];
        for (Eigen::Index i = 0; i < m; ++i)
            pairs(i, j) = (1.0 - (pos_scores[i] - neg_score) > 0.0) ? 1 : 0;
    }

    MostViolated result;
    result.constraint = make_constraint(H, std::move(subset), std::move(pairs), range);
    result.q = constraint_violation(result.constraint, w);
    return result;
}

namespace {

std::size_t binomial(Eigen::Index n, Eigen::Index k) {
    if (k < 0 || k > n) return 0;
    std::size_t value = 1;
    for (Eigen::Index i = 0; i < k; ++i) {
        value = value * static_cast<std::size_t>(n - i) / static_cast<std::size_t>(i + 1);
        if (value > 1000000) return value;  // guard handles the rest
    }
    return value;
}

}  // namespace

MostViolated brute_force_most_violated(const WeakOutputMatrix& H,
                                       const Eigen::Ref<const Eigen::VectorXd>& w,
                                       const PaucRange& range) {
    check_h(H);
    const Eigen::Index m = H.m(), n = H.n();
    range.validate_for(n);
    const Eigen::Index ja = range.j_alpha(n), jb = range.j_beta(n);
    const Eigen::Index cells = m * jb;
    if (cells > 12 || binomial(n, jb) > 10000)
        throw std::invalid_argument(
            "brute_force_most_violated: instance too large (m*j_beta = " +
            std::to_string(cells) + ", C(n, j_beta) = " +
            std::to_string(binomial(n, jb)) + ")");

    const Eigen::VectorXd pos_scores = H.pos.transpose() * w;
    const Eigen::VectorXd neg_scores = H.neg.transpose() * w;
    const double c = range.risk_normalizer(m, n);

    // Per-pair gain of activating y_ij: the loss reward (columns at rank
    // position > j_alpha) minus the margin term.
    std::vector<Eigen::Index> pick(static_cast<std::size_t>(jb));
    std::iota(pick.begin(), pick.end(), Eigen::Index{0});

    MostViolated best;
    bool have_best = false;
    std::size_t evaluated = 0;
    std::vector<Eigen::Index> best_subset;
    std::uint64_t best_mask = 0;

    const std::uint64_t masks = std::uint64_t{1} << cells;
    while (true) {
        // Canonical in-subset order: descending score, ties by index.
        std::vector<Eigen::Index> subset = pick;
        std::stable_sort(subset.begin(), subset.end(), [&](Eigen::Index a, Eigen::Index b) {
            return neg_scores[a] > neg_scores[b];
        });

        Eigen::MatrixXd gain(m, jb);
        for (Eigen::Index j = 0; j < jb; ++j) {
            const double reward = j >= ja ? 1.0 : 0.0;
            for (Eigen::Index i = 0; i < m; ++i)
                gain(i, j) =
                    (reward - (pos_scores[i] - neg_scores[subset[static_cast<std::size_t>(j)]])) / c;
        }

        for (std::uint64_t mask = 0; mask < masks; ++mask) {
            double q = 0;
            for (Eigen::Index cell = 0; cell < cells; ++cell)
                if (mask >> cell & 1) q += gain(cell % m, cell / m);
            ++evaluated;
            if (!have_best || q > best.q) {
                best.q = q;
                best_subset = subset;
                best_mask = mask;
                have_best = true;
            }
        }

        // Next lexicographic combination.
        Eigen::Index slot = jb - 1;
        while (slot >= 0 && pick[static_cast<std::size_t>(slot)] == n - jb + slot) --slot;
        if (slot < 0) break;
        ++pick[static_cast<std::size_t>(slot)];
        for (Eigen::Index s = slot + 1; s < jb; ++s)
            pick[static_cast<std::size_t>(s)] = pick[static_cast<std::size_t>(s - 1)] + 1;
    }

    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> pairs(m, jb);
    for (Eigen::Index cell = 0; cell < cells; ++cell)
        pairs(cell % m, cell / m) = best_mask >> cell & 1 ? 1 : 0;
    best.constraint = make_constraint(H, std::move(best_subset), std::move(pairs), range);
    best.candidates_evaluated = evaluated;
    return best;
}

QpSolution solve_restricted_qp(std::span<const OrderingConstraint> working_set,
                               double nu, const Eigen::VectorXd& warm_lambda,
                               const QpOptions& opts) {
    const Eigen::Index k = static_cast<Eigen::Index>(working_set.size());
    if (k < 1) throw std::invalid_argument("solve_restricted_qp: empty working set");
    if (!(nu > 0)) throw std::invalid_argument("solve_restricted_qp: nu must be > 0");
    const Eigen::Index tau = working_set[0].phi_delta.size();

    Eigen::VectorXd losses(k);
    Eigen::MatrixXd basis(tau, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        losses[a] = working_set[static_cast<std::size_t>(a)].loss;
        basis.col(a) = working_set[static_cast<std::size_t>(a)].phi_delta;
    }
    const Eigen::MatrixXd gram = basis.transpose() * basis;

    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);
    if (warm_lambda.size() > 0) {
        lambda.head(std::min(k, warm_lambda.size())) =
            warm_lambda.head(std::min(k, warm_lambda.size()));
        lambda = lambda.cwiseMax(0.0);
        const double total = lambda.sum();
        if (total > nu) lambda *= nu / total;
    }

    Eigen::VectorXd grad_cache = gram * lambda;  // (G lambda)_a
    double mass = lambda.sum();

    auto kkt_residual = [&]() {
        // q_a = Q_w(Y_a); optimal when every supported constraint sits at
        // the common violation level xi and the budget is slack only if
        // that level is zero.
        double xi = 0;
        for (Eigen::Index a = 0; a < k; ++a)
            xi = std::max(xi, losses[a] - grad_cache[a]);
        double residual = std::min(nu - mass, xi);
        for (Eigen::Index a = 0; a < k; ++a) {
            if (lambda[a] > 0)
                residual = std::max(residual, xi - (losses[a] - grad_cache[a]));
        }
        return residual;
    };

    int pass = 0;
    double residual = kkt_residual();
    while (residual > opts.kkt_tol && pass < opts.max_passes) {
        ++pass;
        if (pass % 32 == 0) {  // cancel incremental drift in the cache
            grad_cache = gram * lambda;
            mass = lambda.sum();
        }
        // Single-coordinate steps.
        for (Eigen::Index a = 0; a < k; ++a) {
            const double q_a = losses[a] - grad_cache[a];
            double step;
            if (gram(a, a) > 0)
                step = q_a / gram(a, a);
            else
                step = q_a > 0 ? nu - mass : -lambda[a];
            step = std::clamp(step, -lambda[a], nu - mass);
            if (step == 0) continue;
            lambda[a] += step;
            mass += step;
            grad_cache += step * gram.col(a);
        }
        // Pairwise transfers handle the facet where the budget binds.
        if (nu - mass <= opts.kkt_tol) {
            for (Eigen::Index a = 0; a < k; ++a)
                for (Eigen::Index b = 0; b < k; ++b) {
                    if (a == b || lambda[b] <= 0) continue;
                    const double curvature = gram(a, a) - 2 * gram(a, b) + gram(b, b);
                    const double slope =
                        (losses[a] - grad_cache[a]) - (losses[b] - grad_cache[b]);
                    double t;
                    if (curvature > 0)
                        t = slope / curvature;
                    else
                        t = slope > 0 ? lambda[b] : -lambda[a];
                    t = std::clamp(t, -lambda[a], lambda[b]);
                    if (t == 0) continue;
                    lambda[a] += t;
                    lambda[b] -= t;
                    grad_cache += t * (gram.col(a) - gram.col(b));
                }
        }
        residual = kkt_residual();
    }
    if (residual > opts.kkt_tol)
        throw NumericError("restricted QP did not converge: KKT residual " +
                           std::to_string(residual) + " after " + std::to_string(pass) +
                           " passes");

    QpSolution sol;
    sol.lambda = lambda;
    sol.w = basis * lambda;  // KKT reconstruction, exact by construction
    sol.xi = 0;
    for (Eigen::Index a = 0; a < k; ++a)
        sol.xi = std::max(sol.xi, losses[a] - sol.w.dot(basis.col(a)));
    sol.dual_objective = losses.dot(lambda) - 0.5 * lambda.dot(gram * lambda);
    sol.primal_objective = 0.5 * sol.w.squaredNorm() + nu * sol.xi;
    sol.kkt_residual = residual;
    sol.passes = pass;
    return sol;
}

CuttingPlaneState cutting_plane(const WeakOutputMatrix& H, const PaucRange& range,
                                double nu, const CuttingPlaneOptions& opts) {
    check_h(H);
    range.validate_for(H.n());
    if (!(nu > 0)) throw std::invalid_argument("cutting_plane: nu must be > 0");
    if (!(opts.eps > 0)) throw std::invalid_argument("cutting_plane: eps must be > 0");

    CuttingPlaneState state;
    state.nu = nu;
    state.eps = opts.eps;
    state.w = Eigen::VectorXd::Zero(H.tau());
    state.xi = 0;
    double dual_objective = 0;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        MostViolated found = most_violated_constraint(H, state.w, range);
        state.iterations.push_back({found.q, state.xi,
                                    static_cast<int>(state.constraints.size()),
                                    dual_objective});
        if (found.q <= state.xi + opts.eps) {
            state.converged = true;
            return state;
        }
        state.constraints.push_back(std::move(found.constraint));
        QpSolution sol =
            solve_restricted_qp(state.constraints, nu, state.lambda, opts.qp);
        state.w = sol.w;
        state.xi = sol.xi;
        state.lambda = sol.lambda;
        dual_objective = sol.dual_objective;
    }
    throw NumericError("cutting plane exceeded " + std::to_string(opts.max_iterations) +
                       " iterations (last xi = " + std::to_string(state.xi) + ")");
}

}  // namespace paucens
