#include <doctest.h>

#include <limits>

#include "oracles.hpp"
#include "paucens/weaklearn.hpp"

using namespace paucens;

namespace {

Eigen::MatrixXd column(std::initializer_list<double> values) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index i = 0;
    for (double v : values) m(i++, 0) = v;
    return m;
}

Eigen::VectorXd constant(Eigen::Index size, double value) {
    return Eigen::VectorXd::Constant(size, value);
}

}  // namespace

TEST_SUITE_BEGIN("weaklearn");

TEST_CASE("quantize maps ranges onto 256 bins") {
    Eigen::MatrixXd samples(3, 2);
    samples << 0, 5, 128, 5, 255, 5;  // second feature constant
    const QuantizedMatrix q = quantize(samples);
    CHECK(q.bins(0, 0) == 0);
    CHECK(q.bins(2, 0) == 255);
    CHECK(q.bins(1, 0) == 128);
    CHECK(q.bins(0, 1) == 0);
    CHECK(q.bins(1, 1) == 0);
    CHECK(q.bins(2, 1) == 0);
    // Edges non-decreasing, bins monotone in raw value.
    for (Eigen::Index f = 0; f < 2; ++f)
        for (int k = 1; k < 256; ++k) CHECK(q.bin_edges(k, f) >= q.bin_edges(k - 1, f));
}

TEST_CASE("quantized bins are monotone in the raw value") {
    oracles::Rng rng(31);
    Eigen::MatrixXd samples(100, 1);
    for (int i = 0; i < 100; ++i) samples(i, 0) = rng.uniform(-3, 3);
    const QuantizedMatrix q = quantize(samples);
    for (int a = 0; a < 100; ++a)
        for (int b = 0; b < 100; ++b)
            if (samples(a, 0) < samples(b, 0)) CHECK(q.bins(a, 0) <= q.bins(b, 0));
}

TEST_CASE("stump training on separable data recovers the full edge") {
    const Eigen::MatrixXd x = column({0, 1, 2, 5, 6, 7});
    Eigen::VectorXd labels(6);
    labels << -1, -1, -1, 1, 1, 1;
    const QuantizedMatrix q = quantize(x);
    const StumpFit fit = train_stump(q, labels, constant(6, 1.0));
    CHECK(fit.edge == 6.0);
    for (Eigen::Index r = 0; r < 6; ++r)
        CHECK(fit.stump.predict(x.row(r).transpose()) == labels[r]);
}

TEST_CASE("all weight on one point forces that point correct") {
    const Eigen::MatrixXd x = column({0, 1, 2, 3});
    Eigen::VectorXd labels(4);
    labels << 1, -1, -1, -1;  // the low point is "mislabeled" vs the bulk
    Eigen::VectorXd weights = Eigen::VectorXd::Zero(4);
    weights[0] = 1.0;
    const StumpFit fit = train_stump(quantize(x), labels, weights);
    CHECK(fit.stump.predict(x.row(0).transpose()) == 1.0);
    CHECK(fit.edge == 1.0);
}

TEST_CASE("stump edge matches the exhaustive candidate scan") {
    oracles::Rng rng(404);
    for (int round = 0; round < 10; ++round) {
        Eigen::MatrixXd samples(30, 5);
        Eigen::VectorXd labels(30), weights(30);
        for (int i = 0; i < 30; ++i) {
            for (int f = 0; f < 5; ++f) samples(i, f) = rng.uniform(-1, 1);
            labels[i] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
            // Dyadic weights keep every partial sum exact, so the scan and the
            // prefix-sum implementation agree bit for bit.
            weights[i] = rng.uniform_int(1, 8) / 64.0;
        }
        const QuantizedMatrix q = quantize(samples);
        const StumpFit fit = train_stump(q, labels, weights);
        CHECK(fit.edge == oracles::exhaustive_stump_edge(q.bins, labels, weights));
        // Returned stump evaluates to its reported edge.
        double edge = 0;
        for (Eigen::Index r = 0; r < 30; ++r)
            edge += weights[r] * labels[r] * fit.stump.predict_bins(q.bins.row(r).transpose());
        CHECK(edge == fit.edge);
    }
}

TEST_CASE("training is deterministic and negation-closed") {
    oracles::Rng rng(77);
    Eigen::MatrixXd samples(40, 3);
    Eigen::VectorXd labels(40), weights(40);
    for (int i = 0; i < 40; ++i) {
        for (int f = 0; f < 3; ++f) samples(i, f) = rng.uniform(-2, 2);
        labels[i] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        weights[i] = rng.uniform(0.1, 1.0);
    }
    const QuantizedMatrix q = quantize(samples);
    const StumpFit a = train_stump(q, labels, weights);
    const StumpFit b = train_stump(q, labels, weights);
    CHECK(a.stump.feature == b.stump.feature);
    CHECK(a.stump.cut == b.stump.cut);
    CHECK(a.stump.polarity == b.stump.polarity);
    CHECK(a.edge == b.edge);

    DecisionStump flipped = a.stump;
    flipped.polarity = -flipped.polarity;
    double edge = 0;
    for (Eigen::Index r = 0; r < 40; ++r)
        edge += weights[r] * labels[r] * flipped.predict_bins(q.bins.row(r).transpose());
    CHECK(edge == doctest::Approx(-a.edge).epsilon(1e-12));
}

TEST_CASE("constant features predict consistently in raw and bin space") {
    // With every feature constant and negatively weighted labels, the edge
    // maximizer is the always-minus side of a constant feature; the raw rule
    // must match the bin rule on seen and unseen inputs alike.
    Eigen::MatrixXd samples = Eigen::MatrixXd::Zero(4, 2);
    samples.col(0).setConstant(5.0);
    samples.col(1).setConstant(7.0);
    Eigen::VectorXd labels(4), weights(4);
    labels << -1, -1, -1, 1;
    weights << 1, 1, 1, 0.1;
    const QuantizedMatrix q = quantize(samples);
    CHECK(q.threshold_for_cut(0, 0) == std::numeric_limits<double>::infinity());
    const StumpFit fit = train_stump(q, labels, weights);
    CHECK(fit.edge == doctest::Approx(2.9).epsilon(1e-12));
    for (Eigen::Index r = 0; r < 4; ++r)
        CHECK(fit.stump.predict(samples.row(r).transpose()) ==
              fit.stump.predict_bins(q.bins.row(r).transpose()));
    Eigen::VectorXd unseen(2);
    unseen << 100.0, -3.0;
    CHECK(fit.stump.predict(unseen) == -1.0);
}

TEST_CASE("raw thresholds agree with bin cuts") {
    oracles::Rng rng(55);
    Eigen::MatrixXd samples(64, 2);
    for (int i = 0; i < 64; ++i)
        for (int f = 0; f < 2; ++f) samples(i, f) = rng.uniform(-5, 5);
    Eigen::VectorXd labels(64);
    for (int i = 0; i < 64; ++i) labels[i] = i % 2 ? 1.0 : -1.0;
    const QuantizedMatrix q = quantize(samples);
    const StumpFit fit = train_stump(q, labels, constant(64, 1.0));
    for (Eigen::Index r = 0; r < 64; ++r)
        CHECK(fit.stump.predict(samples.row(r).transpose()) ==
              fit.stump.predict_bins(q.bins.row(r).transpose()));
}

TEST_CASE("depth-1 tree equals the best stump on balanced data") {
    oracles::Rng rng(21);
    Eigen::MatrixXd samples(30, 4);
    Eigen::VectorXd labels(30);
    for (int i = 0; i < 30; ++i) {
        for (int f = 0; f < 4; ++f) samples(i, f) = rng.uniform(-1, 1);
        labels[i] = i < 15 ? 1.0 : -1.0;
    }
    const QuantizedMatrix q = quantize(samples);
    const Eigen::VectorXd weights = constant(30, 1.0 / 30);
    const StumpFit stump = train_stump(q, labels, weights);
    const TreeFit tree = train_tree(q, labels, weights, 1);
    for (Eigen::Index r = 0; r < 30; ++r)
        CHECK(tree.tree.predict_bins(q.bins.row(r).transpose()) ==
              stump.stump.predict_bins(q.bins.row(r).transpose()));
    CHECK(tree.edge == doctest::Approx(stump.edge).epsilon(1e-12));
}

TEST_CASE("depth-2 tree shatters the xor layout") {
    Eigen::MatrixXd samples(4, 2);
    samples << 0, 0, 1, 1, 0, 1, 1, 0;
    Eigen::VectorXd labels(4);
    labels << 1, 1, -1, -1;
    const TreeFit fit = train_tree(quantize(samples), labels, constant(4, 0.25), 2);
    for (Eigen::Index r = 0; r < 4; ++r)
        CHECK(fit.tree.predict(samples.row(r).transpose()) == labels[r]);
    CHECK(fit.edge == doctest::Approx(1.0).epsilon(1e-12));  // zero weighted error
}

TEST_CASE("trees are negation-closed through their leaves") {
    oracles::Rng rng(713);
    Eigen::MatrixXd samples(40, 3);
    Eigen::VectorXd labels(40), weights(40);
    for (int i = 0; i < 40; ++i) {
        for (int f = 0; f < 3; ++f) samples(i, f) = rng.uniform(-2, 2);
        labels[i] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        weights[i] = rng.uniform(0.1, 1.0);
    }
    const QuantizedMatrix q = quantize(samples);
    const TreeFit fit = train_tree(q, labels, weights, 2);

    DecisionTree flipped = fit.tree;
    for (DecisionTree::Node& node : flipped.nodes)
        if (node.leaf()) node.label = -node.label;
    double edge = 0;
    for (Eigen::Index r = 0; r < 40; ++r) {
        const double prediction = flipped.predict_bins(q.bins.row(r).transpose());
        CHECK((prediction == 1.0 || prediction == -1.0));
        edge += weights[r] * labels[r] * prediction;
    }
    CHECK(edge == doctest::Approx(-fit.edge).epsilon(1e-12));
}

TEST_CASE("pure nodes become leaves") {
    Eigen::MatrixXd samples(3, 2);
    samples << 0, 1, 2, 3, 4, 5;
    const Eigen::VectorXd labels = constant(3, 1.0);
    const TreeFit fit = train_tree(quantize(samples), labels, constant(3, 1.0), 3);
    CHECK(fit.tree.nodes.size() == 1);
    CHECK(fit.tree.nodes[0].leaf());
    CHECK(fit.tree.nodes[0].label == 1);
}

TEST_CASE("degenerate weights are rejected") {
    const Eigen::MatrixXd x = column({0, 1});
    Eigen::VectorXd labels(2);
    labels << 1, -1;
    CHECK_THROWS_AS(train_stump(quantize(x), labels, constant(2, 0.0)),
                    std::invalid_argument);
    Eigen::VectorXd negative(2);
    negative << 0.5, -0.1;
    CHECK_THROWS_AS(train_stump(quantize(x), labels, negative), std::invalid_argument);
}

TEST_SUITE_END();
