#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "paucens/dataset.hpp"
#include "paucens/errors.hpp"

using namespace paucens;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "paucens_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_SUITE_BEGIN("dataset");

TEST_CASE("toy generator is deterministic and sized as configured") {
    ToyConfig cfg;
    cfg.seed = 7;
    cfg.n_train_per_class = 200;
    cfg.n_test_per_class = 50;
    const ToyData a = generate_toy(cfg);
    const ToyData b = generate_toy(cfg);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    CHECK(a.train.m() == 200);
    CHECK(a.train.n() == 200);
    CHECK(a.train.dim() == 2);
    CHECK(a.test.m() == 50);

    cfg.seed = 8;
    CHECK_FALSE(generate_toy(cfg).train == a.train);
}

TEST_CASE("positive radii never exceed the configured maximum") {
    ToyConfig cfg;
    cfg.seed = 3;
    cfg.n_train_per_class = 5000;
    cfg.n_test_per_class = 5000;
    const ToyData data = generate_toy(cfg);
    int outside = 0;
    for (const auto& split : {data.train, data.test})
        for (Eigen::Index i = 0; i < split.m(); ++i)
            if (split.positives.row(i).norm() > cfg.pos_radius_max * (1 + 1e-12)) ++outside;
    CHECK(outside == 0);
}

TEST_CASE("negative radii follow the configured normal distribution") {
    ToyConfig cfg;
    cfg.seed = 11;
    cfg.n_train_per_class = 100000;
    cfg.n_test_per_class = 1;
    const Dataset train = generate_toy(cfg).train;
    double mean = 0;
    for (Eigen::Index i = 0; i < train.n(); ++i) mean += train.negatives.row(i).norm();
    mean /= static_cast<double>(train.n());
    CHECK(mean == doctest::Approx(2.0).epsilon(0.005));

    double var = 0;
    for (Eigen::Index i = 0; i < train.n(); ++i)
        var += std::pow(train.negatives.row(i).norm() - mean, 2);
    var /= static_cast<double>(train.n());
    CHECK(std::sqrt(var) == doctest::Approx(0.4).epsilon(0.02));
}

TEST_CASE("csv split by label convention") {
    const auto path = temp_file("labels10.csv");
    write_file(path, "f0,f1,label\n1,2,1\n3,4,1\n5,6,0\n");
    const Dataset ds = load_csv(path.string());
    CHECK(ds.m() == 2);
    CHECK(ds.n() == 1);
    CHECK(ds.dim() == 2);
    CHECK(ds.negatives(0, 0) == 5.0);

    const auto pm = temp_file("labels_pm.csv");
    write_file(pm, "f0,label\n0.5,-1\n0.25,1\n");
    const Dataset ds2 = load_csv(pm.string());
    CHECK(ds2.m() == 1);
    CHECK(ds2.n() == 1);
}

TEST_CASE("csv errors name the offending row and column") {
    const auto path = temp_file("bad_cell.csv");
    write_file(path, "f0,f1,label\n1,2,1\n1,oops,0\n");
    CHECK_THROWS_WITH_AS(load_csv(path.string()),
                         doctest::Contains(":3: column 'f1'"), DataError);

    const auto ragged = temp_file("ragged.csv");
    write_file(ragged, "f0,f1,label\n1,2,1\n3,0\n");
    CHECK_THROWS_WITH_AS(load_csv(ragged.string()), doctest::Contains(":3:"), DataError);

    const auto single = temp_file("single_class.csv");
    write_file(single, "f0,label\n1,1\n2,1\n");
    CHECK_THROWS_AS(load_csv(single.string()), DataError);

    const auto mixed = temp_file("mixed_labels.csv");
    write_file(mixed, "f0,label\n1,1\n2,0\n3,-1\n");
    CHECK_THROWS_AS(load_csv(mixed.string()), DataError);

    const auto missing = temp_file("missing_value.csv");
    write_file(missing, "f0,f1,label\n1,,1\n2,3,0\n");
    CHECK_THROWS_WITH_AS(load_csv(missing.string()), doctest::Contains("missing value"),
                         DataError);

    const auto nonfinite = temp_file("nonfinite.csv");
    write_file(nonfinite, "f0,label\ninf,1\n2,0\n");
    CHECK_THROWS_WITH_AS(load_csv(nonfinite.string()), doctest::Contains("non-finite"),
                         DataError);

    const auto no_label = temp_file("no_label.csv");
    write_file(no_label, "f0,f1\n1,2\n");
    CHECK_THROWS_AS(load_csv(no_label.string()), DataError);
}

TEST_CASE("save/load round trip is exact") {
    ToyConfig cfg;
    cfg.seed = 21;
    cfg.n_train_per_class = 37;
    cfg.n_test_per_class = 1;
    const Dataset original = generate_toy(cfg).train;
    const auto path = temp_file("roundtrip.csv");
    save_csv(original, path.string());
    const Dataset reloaded = load_csv(path.string());
    CHECK(reloaded == original);
}

TEST_CASE("validation rejects degenerate datasets") {
    Dataset ds;
    ds.positives.resize(1, 2);
    ds.positives << 1, 2;
    ds.negatives.resize(1, 3);
    ds.negatives << 1, 2, 3;
    CHECK_THROWS_AS(ds.validate(), std::invalid_argument);

    ToyConfig bad;
    bad.n_train_per_class = 0;
    CHECK_THROWS_AS(generate_toy(bad), std::invalid_argument);
    ToyConfig bad_std;
    bad_std.neg_radius_std = 0;
    CHECK_THROWS_AS(generate_toy(bad_std), std::invalid_argument);
}

TEST_SUITE_END();
