#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "paucens/baseline.hpp"
#include "paucens/dataset.hpp"

using namespace paucens;

namespace {

// First-round weighted error is exactly 0.25: the best stump misclassifies
// one of the four equally weighted samples.
Dataset quarter_error_instance() {
    Dataset ds;
    ds.positives.resize(2, 1);
    ds.positives << 1.0, 2.0;
    ds.negatives.resize(2, 1);
    ds.negatives << 0.0, 1.5;
    return ds;
}

Dataset stump_separable() {
    Dataset ds;
    ds.positives.resize(3, 1);
    ds.positives << 2.0, 3.0, 4.0;
    ds.negatives.resize(2, 1);
    ds.negatives << 0.0, 1.0;
    return ds;
}

}  // namespace

TEST_SUITE_BEGIN("baseline");

TEST_CASE("quarter-error round yields the half-log-three coefficient") {
    AdaBoostConfig cfg;
    cfg.t_max = 1;
    cfg.tree_depth = 0;
    const AdaBoostResult result = adaboost_train(quarter_error_instance(), cfg);
    REQUIRE(result.rounds.size() == 1);
    CHECK(result.rounds[0].weighted_error == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(result.rounds[0].coefficient - 0.5 * std::log(3.0)) <= 1e-12);
    CHECK(std::abs(result.rounds[0].coefficient - 0.5493061443340548) <= 1e-12);
}

TEST_CASE("weights renormalize and orthogonalize after every round") {
    ToyConfig toy;
    toy.seed = 10;
    toy.n_train_per_class = 60;
    toy.n_test_per_class = 1;
    AdaBoostConfig cfg;
    cfg.t_max = 8;
    cfg.tree_depth = 0;
    const AdaBoostResult result = adaboost_train(generate_toy(toy).train, cfg);
    REQUIRE(!result.rounds.empty());
    for (const AdaBoostRound& round : result.rounds) {
        CHECK(std::abs(round.weight_sum_after - 1.0) <= 1e-12);
        CHECK(std::abs(round.post_update_error - 0.5) <= 1e-9);
    }
    // Every accepted learner carries a positive coefficient.
    CHECK(result.model.w.minCoeff() > 0.0);
}

TEST_CASE("separable data reaches zero training error and capped rounds") {
    AdaBoostConfig cfg;
    cfg.t_max = 3;
    cfg.tree_depth = 0;
    const Dataset ds = stump_separable();
    const AdaBoostResult result = adaboost_train(ds, cfg);
    REQUIRE(result.rounds.size() >= 1);
    CHECK(result.rounds[0].weighted_error == 0.0);

    // Training error of the strong classifier is zero from round one.
    int mistakes = 0;
    for (Eigen::Index i = 0; i < ds.m(); ++i)
        if (result.model.score(ds.positives.row(i).transpose()) <= 0) ++mistakes;
    for (Eigen::Index j = 0; j < ds.n(); ++j)
        if (result.model.score(ds.negatives.row(j).transpose()) > 0) ++mistakes;
    CHECK(mistakes == 0);

    // Zero error hits the coefficient cap instead of infinity.
    const double cap = 0.5 * std::log((1.0 - 1e-10) / 1e-10);
    CHECK(result.rounds[0].coefficient == doctest::Approx(cap).epsilon(1e-12));
    CHECK(std::isfinite(result.model.w.sum()));
}

TEST_CASE("shrinkage scales every coefficient") {
    const Dataset ds = quarter_error_instance();
    AdaBoostConfig plain;
    plain.t_max = 1;
    plain.tree_depth = 0;
    AdaBoostConfig shrunk = plain;
    shrunk.shrinkage = 0.1;
    const AdaBoostResult a = adaboost_train(ds, plain);
    const AdaBoostResult b = adaboost_train(ds, shrunk);
    // Same single-round learner, so the coefficients differ by the factor.
    CHECK(b.rounds[0].coefficient == 0.1 * a.rounds[0].coefficient);
}

TEST_CASE("rounds with weighted error at one half stop the loop") {
    // Mirror-symmetric data: every stump has zero edge, error exactly 0.5.
    Dataset ds;
    ds.positives.resize(2, 1);
    ds.positives << 0.0, 2.0;
    ds.negatives.resize(2, 1);
    ds.negatives << 0.0, 2.0;
    AdaBoostConfig cfg;
    cfg.t_max = 5;
    cfg.tree_depth = 0;
    const AdaBoostResult result = adaboost_train(ds, cfg);
    CHECK(result.stopped_early);
    CHECK(result.model.learners.empty());
}

TEST_CASE("config validation") {
    AdaBoostConfig bad;
    bad.shrinkage = 0.0;
    CHECK_THROWS_AS(adaboost_train(stump_separable(), bad), std::invalid_argument);
    bad.shrinkage = 1.5;
    CHECK_THROWS_AS(adaboost_train(stump_separable(), bad), std::invalid_argument);
}

TEST_SUITE_END();
