#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "paucens/image.hpp"

namespace paucens {

/// The nine per-pixel statistics entering patch covariance, in storage
/// order: pixel coordinates, absolute first/second derivatives, gradient
/// magnitude, and the two edge orientations. orient2 lives in [0, pi].
enum Stat : int {
    kStatX = 0,
    kStatY,
    kStatAbsGx,
    kStatAbsGy,
    kStatAbsGxx,
    kStatAbsGyy,
    kStatMag,
    kStatOrient1,
    kStatOrient2,
};
constexpr int kNumStats = 9;

/// Index of the first non-coordinate statistic; stats kStatAbsGx.. are the
/// seven that enter pooled descriptors and base channels.
constexpr int kFirstDerivedStat = 2;
constexpr int kNumDerivedStats = 7;

struct BaseChannels {
    int width = 0, height = 0;
    std::array<Eigen::ArrayXXf, kNumStats> stats;  // each (height, width)
    std::vector<Eigen::ArrayXXf> luv;              // L*, u*, v*
};

/// Derivatives use the centered kernels [-1, 0, 1] and [1, -2, 1] with
/// replicate padding; RGB collapses to BT.601 luma before differentiation.
/// LUV uses the D65 white point on [0,1] inputs. Requires width,height >= 3.
BaseChannels compute_base_channels(const Image& img);

struct Rect {
    int x = 0, y = 0, w = 0, h = 0;
};

/// Cumulative-sum tables over the nine statistics and their pairwise
/// products, giving O(1) rectangular sums and patch moments.
class IntegralChannels {
  public:
    explicit IntegralChannels(const BaseChannels& base);

    int width() const { return width_; }
    int height() const { return height_; }

    double rect_sum(int stat, const Rect& rect) const;
    double rect_dot(int stat_a, int stat_b, const Rect& rect) const;

    struct PatchMoments {
        Eigen::Matrix<double, kNumStats, 1> variance;
        Eigen::Matrix<double, kNumStats, kNumStats> correlation;
    };

    /// Population moments over the rect's pixels. Zero-variance statistics
    /// correlate to 0 with everything; correlations clamp to [-1, 1].
    /// Requires rect inside the image with area >= 2.
    PatchMoments patch_covariance(const Rect& rect) const;

  private:
    int width_ = 0, height_ = 0;
    std::array<Eigen::ArrayXXd, kNumStats> sums_;
    std::array<Eigen::ArrayXXd, kNumStats*(kNumStats + 1) / 2> products_;
};

/// Grid of pooled descriptors. Cell (cx, cy) covers patch anchors in
/// [cx*pool_stride, cx*pool_stride + pool_cell) x (same for y) and holds
/// the element-wise max of their descriptors; grid_w =
/// floor((image_w - patch_size) / pool_stride) + 1 and likewise for h.
struct PooledFeatureMap {
    std::string name;
    int patch_size = 0;
    int pool_cell = 0, pool_stride = 0;
    int grid_w = 0, grid_h = 0, depth = 0;
    std::vector<float> data;  // [cy][cx][k]

    float at(int cy, int cx, int k) const {
        return data[static_cast<std::size_t>((cy * grid_w + cx) * depth + k)];
    }
    float& at(int cy, int cx, int k) {
        return data[static_cast<std::size_t>((cy * grid_w + cx) * depth + k)];
    }
};

struct SpCovConfig {
    std::vector<int> patch_sizes{8, 16, 32};
    int pool_cell = 4;
    int pool_stride = 4;
};

/// Max-pooled covariance descriptors, one map per patch scale. Each cell
/// holds 42 values: the variances of the seven derived statistics followed
/// by the 35 pairwise correlations (all pairs of the nine statistics except
/// coordinate-vs-coordinate), upper-triangular row-major. Scales the image
/// cannot fit are skipped and reported through `skipped` when given.
std::vector<PooledFeatureMap> sp_cov(const Image& img, const SpCovConfig& cfg = {},
                                     std::vector<std::string>* skipped = nullptr);

constexpr int kSpCovDepth = kNumDerivedStats + 35;  // 42

/// 8-bit local binary pattern per pixel: the 3x3 neighbours, clockwise from
/// the top-left, each contribute a 1 bit when >= the center (replicate
/// padding at borders). A constant image codes to 255 everywhere.
Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> lbp_codes(
    const Eigen::ArrayXXf& gray);

/// Number of circular 0/1 transitions of an 8-bit code.
int lbp_transitions(std::uint8_t code);

/// Histogram bin in [0, 58]: the 58 uniform patterns (at most two circular
/// transitions) in ascending code order, then one catch-all bin.
int lbp_uniform_bin(std::uint8_t code);

constexpr int kLbpBins = 59;

struct SpLbpConfig {
    std::vector<int> patch_sizes{4, 8, 16};
    int pool_cell = 8;
    int pool_stride = 4;
};

/// Max-pooled uniform-LBP histograms, one map per patch size; each cell
/// holds 59 patch-frequency bins (counts normalized by patch area).
std::vector<PooledFeatureMap> sp_lbp(const Image& img, const SpLbpConfig& cfg = {},
                                     std::vector<std::string>* skipped = nullptr);

struct FeatureConfig {
    bool sp_cov = true;   // pooled covariance + the seven base statistic channels
    bool sp_lbp = false;
    bool luv = true;
    bool mag = false;     // gradient magnitude channel (subsumed by sp_cov)
    bool orient = false;  // both orientation channels (subsumed by sp_cov)
    SpCovConfig cov{};
    SpLbpConfig lbp{};
};

/// The assembled channel list. `channel_count` counts planes the way the
/// descriptor is sized: a depth-42 covariance map contributes 42.
struct FeatureMaps {
    int image_width = 0, image_height = 0;
    std::vector<PooledFeatureMap> channels;

    int channel_count() const;
};

/// Computes every requested channel group. Base statistics and LUV planes
/// are aggregated to the pooled grid by 4x4 mean cells (stride 4) so all
/// channels share the cell geometry.
FeatureMaps extract_feature_maps(const Image& img, const FeatureConfig& cfg = {},
                                 std::vector<std::string>* skipped = nullptr);

/// Concatenates, channel-major, every cell whose support rectangle
/// [cx*stride, cx*stride + patch_size) lies inside the window. Within one
/// channel, cells run row-major; depth-k maps emit all cells of component 0
/// before component 1, and so on.
Eigen::VectorXd window_features(const FeatureMaps& maps, const Rect& window);

}  // namespace paucens
