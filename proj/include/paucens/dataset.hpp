#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

namespace paucens {

/// Two-class training data. Rows are samples, columns are features.
struct Dataset {
    Eigen::MatrixXd positives;  // m x d
    Eigen::MatrixXd negatives;  // n x d

    Eigen::Index m() const { return positives.rows(); }
    Eigen::Index n() const { return negatives.rows(); }
    Eigen::Index dim() const { return positives.cols(); }

    /// Throws std::invalid_argument unless m >= 1, n >= 1, matching
    /// dimensions and all values finite.
    void validate() const;

    bool operator==(const Dataset& other) const;
};

/// Configuration for the synthetic radial two-class generator: positive
/// points have radius ~ Uniform[0, pos_radius_max], negative points have
/// radius ~ Normal(neg_radius_mean, neg_radius_std), angles are uniform
/// on [0, 2*pi) for both classes.
struct ToyConfig {
    int n_train_per_class = 200;
    int n_val_per_class = 0;
    int n_test_per_class = 2000;
    std::uint64_t seed = 0;
    double pos_radius_max = 1.5;
    double neg_radius_mean = 2.0;
    double neg_radius_std = 0.4;

    void validate() const;
};

struct ToyData {
    Dataset train;
    Dataset val;   // empty matrices when n_val_per_class == 0
    Dataset test;
};

/// Deterministic generator for the radial toy problem (d = 2).
///
/// Reproducibility contract: each (split, class) pair draws from its own
/// mt19937_64 stream whose seed is splitmix64(splitmix64(seed) ^ stream_id),
/// stream ids 0..5 for (train+, train-, val+, val-, test+, test-).
/// Uniform doubles come from the top 53 bits of the engine; normals use the
/// Box-Muller cosine branch, one normal per two uniforms. Per sample the
/// radius is drawn first, then the angle.
ToyData generate_toy(const ToyConfig& cfg);

/// Reads a header-carrying CSV and splits rows on the named label column.
/// Accepted label conventions: {+1,-1} or {1,0}; mixed or single-class
/// files are rejected. Feature order is column order with the label column
/// removed. Throws DataError naming the offending row/column on bad input.
Dataset load_csv(const std::string& path, const std::string& label_column = "label");

/// Writes features plus a +1/-1 label column; floats use shortest
/// round-trip decimals so load_csv(save_csv(ds)) == ds exactly.
void save_csv(const Dataset& ds, const std::string& path,
              const std::string& label_column = "label");

}  // namespace paucens
