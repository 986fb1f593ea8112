#include "paucens/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "paucens/dataset.hpp"
#include "paucens/ensemble.hpp"
#include "paucens/features.hpp"
#include "paucens/image.hpp"
#include "paucens/metrics.hpp"
#include "paucens/structopt.hpp"

namespace paucens::selftest {

namespace {

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double uniform01() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(engine() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

void record_failure(SuiteResult& suite, const std::string& message) {
    ++suite.failures;
    if (suite.messages.size() < 5) suite.messages.push_back(message);
}

// Direct transcription of the partial-AUC risk: sort negatives by
// descending score, count pairs (pos <= neg) over ranks j_alpha+1..j_beta.
double pauc_pair_counting(const Eigen::VectorXd& pos, const Eigen::VectorXd& neg,
                          const PaucRange& range) {
    const Eigen::Index m = pos.size(), n = neg.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return neg[a] > neg[b]; });
    std::size_t misordered = 0;
    for (Eigen::Index r = range.j_alpha(n); r < range.j_beta(n); ++r)
        for (Eigen::Index i = 0; i < m; ++i)
            if (pos[i] <= neg[order[static_cast<std::size_t>(r)]]) ++misordered;
    return 1.0 - static_cast<double>(misordered) / range.risk_normalizer(m, n);
}

}  // namespace

SuiteResult run_metric_oracle(std::uint64_t seed) {
    SuiteResult suite{"metric-oracle", 0, 0, {}};
    Rng rng(seed);
    for (int round = 0; round < 200; ++round) {
        const int m = rng.uniform_int(1, 20), n = rng.uniform_int(2, 20);
        Eigen::VectorXd pos(m), neg(n);
        // Integer grid scores force ties between and within classes.
        for (int i = 0; i < m; ++i) pos[i] = rng.uniform_int(-5, 5);
        for (int j = 0; j < n; ++j) neg[j] = rng.uniform_int(-5, 5);
        const double beta = 0.1 * rng.uniform_int(1, 10);
        const PaucRange range(0.0, beta);
        if (range.j_beta(n) < 1) continue;
        ++suite.cases;
        const double fast = pauc(pos, neg, range);
        const double direct = pauc_pair_counting(pos, neg, range);
        if (fast != direct) {
            std::ostringstream msg;
            msg << "pauc mismatch (m=" << m << ", n=" << n << ", beta=" << beta
                << "): " << fast << " vs oracle " << direct;
            record_failure(suite, msg.str());
        }
        // Full-range consistency with plain AUC.
        if (pauc(pos, neg, PaucRange(0.0, 1.0)) != auc(pos, neg))
            record_failure(suite, "pauc(0,1) != auc");
    }
    return suite;
}

SuiteResult run_constraint_oracle(std::uint64_t seed) {
    SuiteResult suite{"constraint-oracle", 0, 0, {}};
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int round = 0; round < 100; ++round) {
        const int m = rng.uniform_int(1, 3), n = rng.uniform_int(2, 5);
        const int jb = rng.uniform_int(1, std::min(3, n));
        const int tau = rng.uniform_int(1, 4);
        WeakOutputMatrix H;
        H.pos.resize(tau, m);
        H.neg.resize(tau, n);
        for (int t = 0; t < tau; ++t) {
            for (int i = 0; i < m; ++i) H.pos(t, i) = rng.uniform01() < 0.5 ? -1.0 : 1.0;
            for (int j = 0; j < n; ++j) H.neg(t, j) = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        }
        Eigen::VectorXd w(tau);
        for (int t = 0; t < tau; ++t) w[t] = gauss(rng.engine);
        const PaucRange range(0.0, static_cast<double>(jb) / n);
        if (range.j_beta(n) != jb) continue;
        ++suite.cases;
        const MostViolated fast = most_violated_constraint(H, w, range);
        const MostViolated exhaustive = brute_force_most_violated(H, w, range);
        if (std::abs(fast.q - exhaustive.q) > 1e-9) {
            std::ostringstream msg;
            msg << "violation mismatch (m=" << m << ", n=" << n << ", jb=" << jb
                << "): " << fast.q << " vs " << exhaustive.q;
            record_failure(suite, msg.str());
        }
    }
    return suite;
}

SuiteResult run_covariance_oracle(std::uint64_t seed) {
    SuiteResult suite{"covariance-oracle", 0, 0, {}};
    Rng rng(seed);
    Image img = make_image(48, 48, 1);
    for (float& v : img.data) v = static_cast<float>(rng.uniform01());
    const BaseChannels base = compute_base_channels(img);
    const IntegralChannels integrals(base);

    for (int round = 0; round < 100; ++round) {
        const int size = rng.uniform_int(8, 32);
        const int px = rng.uniform_int(0, img.width - size);
        const int py = rng.uniform_int(0, img.height - size);
        ++suite.cases;
        const auto fast = integrals.patch_covariance({px, py, size, size});

        // Two-pass oracle straight off the channel planes.
        const double count = static_cast<double>(size) * size;
        Eigen::Matrix<double, kNumStats, 1> mean = Eigen::Matrix<double, kNumStats, 1>::Zero();
        for (int a = 0; a < kNumStats; ++a)
            for (int y = py; y < py + size; ++y)
                for (int x = px; x < px + size; ++x) mean[a] += base.stats[a](y, x);
        mean /= count;
        bool ok = true;
        for (int a = 0; a < kNumStats && ok; ++a)
            for (int b = a; b < kNumStats && ok; ++b) {
                double cov = 0;
                for (int y = py; y < py + size; ++y)
                    for (int x = px; x < px + size; ++x)
                        cov += (base.stats[a](y, x) - mean[a]) *
                               (base.stats[b](y, x) - mean[b]);
                cov /= count;
                double expected;
                if (a == b) {
                    expected = std::max(0.0, cov);
                    const double got = fast.variance[a];
                    ok = std::abs(got - expected) <= 1e-6 * std::max(1.0, std::abs(expected));
                } else {
                    const double va = std::max(0.0, fast.variance[a]);
                    const double vb = std::max(0.0, fast.variance[b]);
                    expected = va > 0 && vb > 0 ? cov / std::sqrt(va * vb) : 0.0;
                    expected = std::clamp(expected, -1.0, 1.0);
                    const double got = fast.correlation(a, b);
                    ok = std::abs(got - expected) <= 1e-6 * std::max(1.0, std::abs(expected));
                }
            }
        if (!ok) {
            std::ostringstream msg;
            msg << "patch covariance mismatch at (" << px << ", " << py << ") size "
                << size;
            record_failure(suite, msg.str());
        }
    }
    return suite;
}

SuiteResult run_convergence_invariants(std::uint64_t seed) {
    SuiteResult suite{"convergence-invariant", 0, 0, {}};

    // Fully-corrective training never increases the objective.
    for (int round = 0; round < 3; ++round) {
        ToyConfig cfg;
        cfg.seed = seed + static_cast<std::uint64_t>(round);
        cfg.n_train_per_class = 60;
        cfg.n_test_per_class = 1;
        TrainConfig train_cfg;
        train_cfg.range = PaucRange(0.0, 0.2);
        train_cfg.nu = 0.25;
        train_cfg.t_max = 6;
        train_cfg.tree_depth = 0;
        train_cfg.epsilon = 0;       // run all rounds
        train_cfg.cp.eps = 2e-9;     // nu * eps below the monotonicity slack
        train_cfg.cp.qp.kkt_tol = 1e-11;
        ++suite.cases;
        const TrainResult result = train(generate_toy(cfg).train, train_cfg);
        if (!convergence_report(result.log).all_monotone)
            record_failure(suite, "objective increased during training (seed " +
                                      std::to_string(cfg.seed) + ")");
    }

    // Cutting-plane termination: coefficients reconstruct from the duals and
    // no probe ordering violates beyond the tolerance.
    Rng rng(seed * 31 + 7);
    for (int round = 0; round < 3; ++round) {
        const int m = 8, n = 8, tau = 3;
        WeakOutputMatrix H;
        H.pos.resize(tau, m);
        H.neg.resize(tau, n);
        for (int t = 0; t < tau; ++t) {
            for (int i = 0; i < m; ++i) H.pos(t, i) = rng.uniform01() < 0.5 ? -1.0 : 1.0;
            for (int j = 0; j < n; ++j) H.neg(t, j) = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        }
        const PaucRange range(0.0, 0.5);
        ++suite.cases;
        const CuttingPlaneState state = cutting_plane(H, range, 0.5);

        Eigen::VectorXd rebuilt = Eigen::VectorXd::Zero(tau);
        for (std::size_t a = 0; a < state.constraints.size(); ++a)
            rebuilt += state.lambda[static_cast<Eigen::Index>(a)] *
                       state.constraints[a].phi_delta;
        if ((state.w - rebuilt).lpNorm<Eigen::Infinity>() > 1e-6)
            record_failure(suite, "coefficients do not reconstruct from the duals");

        const Eigen::Index jb = range.j_beta(n);
        for (int probe = 0; probe < 50; ++probe) {
            std::vector<Eigen::Index> all(n);
            std::iota(all.begin(), all.end(), Eigen::Index{0});
            for (std::size_t i = all.size(); i > 1; --i)
                std::swap(all[i - 1], all[static_cast<std::size_t>(rng.uniform_int(
                                          0, static_cast<int>(i) - 1))]);
            std::vector<Eigen::Index> subset(all.begin(), all.begin() + jb);
            Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> pairs(m, jb);
            for (Eigen::Index j = 0; j < jb; ++j)
                for (int i = 0; i < m; ++i) pairs(i, j) = rng.uniform01() < 0.5 ? 1 : 0;
            const OrderingConstraint y =
                make_constraint(H, std::move(subset), std::move(pairs), range);
            if (constraint_violation(y, state.w) > state.xi + state.eps + 1e-9) {
                record_failure(suite, "probe ordering violates the terminal slack");
                break;
            }
        }
    }
    return suite;
}

std::vector<SuiteResult> run_all(std::uint64_t seed) {
    return {run_metric_oracle(seed), run_constraint_oracle(seed + 1),
            run_covariance_oracle(seed + 2), run_convergence_invariants(seed + 3)};
}

}  // namespace paucens::selftest
