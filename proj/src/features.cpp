#include "paucens/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "paucens/errors.hpp"

namespace paucens {

namespace {

Eigen::ArrayXXf to_gray(const Image& img) {
    Eigen::ArrayXXf gray(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            if (img.channels >= 3)
                gray(y, x) = 0.299f * img.at(0, y, x) + 0.587f * img.at(1, y, x) +
                             0.114f * img.at(2, y, x);
            else
                gray(y, x) = img.at(0, y, x);
        }
    return gray;
}

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// sRGB-primary, D65 white point; inputs are linear [0,1] intensities.
void rgb_to_luv(float r, float g, float b, float& l_out, float& u_out, float& v_out) {
    const double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double Y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    constexpr double Xn = 0.95047, Yn = 1.0, Zn = 1.08883;
    constexpr double un = 4.0 * Xn / (Xn + 15.0 * Yn + 3.0 * Zn);
    constexpr double vn = 9.0 * Yn / (Xn + 15.0 * Yn + 3.0 * Zn);
    const double yr = Y / Yn;
    const double L =
        yr > 216.0 / 24389.0 ? 116.0 * std::cbrt(yr) - 16.0 : 24389.0 / 27.0 * yr;
    const double denom = X + 15.0 * Y + 3.0 * Z;
    const double up = denom > 0 ? 4.0 * X / denom : un;
    const double vp = denom > 0 ? 9.0 * Y / denom : vn;
    l_out = static_cast<float>(L);
    u_out = static_cast<float>(13.0 * L * (up - un));
    v_out = static_cast<float>(13.0 * L * (vp - vn));
}

}  // namespace

BaseChannels compute_base_channels(const Image& img) {
    if (img.width < 3 || img.height < 3)
        throw std::invalid_argument("compute_base_channels: image must be at least 3x3");

    const int W = img.width, H = img.height;
    const Eigen::ArrayXXf gray = to_gray(img);

    BaseChannels base;
    base.width = W;
    base.height = H;
    for (auto& plane : base.stats) plane.resize(H, W);

    for (int y = 0; y < H; ++y) {
        const int ym = clampi(y - 1, 0, H - 1), yp = clampi(y + 1, 0, H - 1);
        for (int x = 0; x < W; ++x) {
            const int xm = clampi(x - 1, 0, W - 1), xp = clampi(x + 1, 0, W - 1);
            const float gx = gray(y, xp) - gray(y, xm);
            const float gy = gray(yp, x) - gray(ym, x);
            const float gxx = gray(y, xp) - 2.0f * gray(y, x) + gray(y, xm);
            const float gyy = gray(yp, x) - 2.0f * gray(y, x) + gray(ym, x);
            base.stats[kStatX](y, x) = static_cast<float>(x);
            base.stats[kStatY](y, x) = static_cast<float>(y);
            base.stats[kStatAbsGx](y, x) = std::abs(gx);
            base.stats[kStatAbsGy](y, x) = std::abs(gy);
            base.stats[kStatAbsGxx](y, x) = std::abs(gxx);
            base.stats[kStatAbsGyy](y, x) = std::abs(gyy);
            base.stats[kStatMag](y, x) = std::sqrt(gx * gx + gy * gy);
            base.stats[kStatOrient1](y, x) =
                (gx != 0.0f || gy != 0.0f) ? std::atan2(std::abs(gy), std::abs(gx)) : 0.0f;
            const float theta = std::atan2(gy, gx);
            base.stats[kStatOrient2](y, x) =
                theta > 0.0f ? theta : theta + static_cast<float>(std::numbers::pi);
        }
    }

    base.luv.assign(3, Eigen::ArrayXXf(H, W));
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const float r = img.at(0, y, x);
            const float g = img.channels >= 3 ? img.at(1, y, x) : r;
            const float b = img.channels >= 3 ? img.at(2, y, x) : r;
            rgb_to_luv(r, g, b, base.luv[0](y, x), base.luv[1](y, x), base.luv[2](y, x));
        }
    return base;
}

namespace {

constexpr int pair_index(int a, int b) {
    // Upper-triangular (a <= b) row-major index into the 45 product tables.
    return a * kNumStats - a * (a - 1) / 2 + (b - a);
}

Eigen::ArrayXXd integral_of_product(const Eigen::ArrayXXf& a, const Eigen::ArrayXXf& b) {
    const int H = static_cast<int>(a.rows()), W = static_cast<int>(a.cols());
    Eigen::ArrayXXd table = Eigen::ArrayXXd::Zero(H + 1, W + 1);
    for (int y = 0; y < H; ++y) {
        double row = 0;
        for (int x = 0; x < W; ++x) {
            row += static_cast<double>(a(y, x)) * static_cast<double>(b(y, x));
            table(y + 1, x + 1) = table(y, x + 1) + row;
        }
    }
    return table;
}

double lookup(const Eigen::ArrayXXd& table, const Rect& r) {
    return table(r.y + r.h, r.x + r.w) - table(r.y, r.x + r.w) - table(r.y + r.h, r.x) +
           table(r.y, r.x);
}

Eigen::ArrayXXf ones_like(const Eigen::ArrayXXf& a) {
    return Eigen::ArrayXXf::Ones(a.rows(), a.cols());
}

}  // namespace

IntegralChannels::IntegralChannels(const BaseChannels& base)
    : width_(base.width), height_(base.height) {
    const Eigen::ArrayXXf one = ones_like(base.stats[0]);
    for (int a = 0; a < kNumStats; ++a) {
        sums_[static_cast<std::size_t>(a)] = integral_of_product(base.stats[a], one);
        for (int b = a; b < kNumStats; ++b)
            products_[static_cast<std::size_t>(pair_index(a, b))] =
                integral_of_product(base.stats[a], base.stats[b]);
    }
}

double IntegralChannels::rect_sum(int stat, const Rect& rect) const {
    return lookup(sums_[static_cast<std::size_t>(stat)], rect);
}

double IntegralChannels::rect_dot(int stat_a, int stat_b, const Rect& rect) const {
    const int a = std::min(stat_a, stat_b), b = std::max(stat_a, stat_b);
    return lookup(products_[static_cast<std::size_t>(pair_index(a, b))], rect);
}

IntegralChannels::PatchMoments IntegralChannels::patch_covariance(const Rect& rect) const {
    if (rect.x < 0 || rect.y < 0 || rect.w < 1 || rect.h < 1 ||
        rect.x + rect.w > width_ || rect.y + rect.h > height_)
        throw std::invalid_argument("patch_covariance: rect outside image");
    const double count = static_cast<double>(rect.w) * rect.h;
    if (count < 2) throw std::invalid_argument("patch_covariance: rect area must be >= 2");

    Eigen::Matrix<double, kNumStats, 1> mean;
    for (int a = 0; a < kNumStats; ++a) mean[a] = rect_sum(a, rect) / count;

    PatchMoments out;
    Eigen::Matrix<double, kNumStats, kNumStats> cov;
    for (int a = 0; a < kNumStats; ++a)
        for (int b = a; b < kNumStats; ++b) {
            const double v = rect_dot(a, b, rect) / count - mean[a] * mean[b];
            cov(a, b) = v;
            cov(b, a) = v;
        }
    for (int a = 0; a < kNumStats; ++a) out.variance[a] = std::max(0.0, cov(a, a));

    for (int a = 0; a < kNumStats; ++a)
        for (int b = 0; b < kNumStats; ++b) {
            if (a == b) {
                out.correlation(a, b) = out.variance[a] > 0 ? 1.0 : 0.0;
            } else if (out.variance[a] > 0 && out.variance[b] > 0) {
                out.correlation(a, b) = std::clamp(
                    cov(a, b) / std::sqrt(out.variance[a] * out.variance[b]), -1.0, 1.0);
            } else {
                out.correlation(a, b) = 0.0;
            }
        }
    return out;
}

namespace {

struct PoolAccumulator {
    PooledFeatureMap map;

    PoolAccumulator(std::string name, int image_w, int image_h, int patch, int cell,
                    int stride, int depth) {
        map.name = std::move(name);
        map.patch_size = patch;
        map.pool_cell = cell;
        map.pool_stride = stride;
        map.grid_w = (image_w - patch) / stride + 1;
        map.grid_h = (image_h - patch) / stride + 1;
        map.depth = depth;
        map.data.assign(
            static_cast<std::size_t>(map.grid_w) * map.grid_h * depth,
            -std::numeric_limits<float>::infinity());
    }

    // Cells whose anchor span [c*stride, c*stride + cell) contains `anchor`.
    void pool(int px, int py, const float* descriptor) {
        const int cx_lo = std::max(0, (px - map.pool_cell + map.pool_stride) / map.pool_stride);
        const int cx_hi = std::min(map.grid_w - 1, px / map.pool_stride);
        const int cy_lo = std::max(0, (py - map.pool_cell + map.pool_stride) / map.pool_stride);
        const int cy_hi = std::min(map.grid_h - 1, py / map.pool_stride);
        for (int cy = cy_lo; cy <= cy_hi; ++cy)
            for (int cx = cx_lo; cx <= cx_hi; ++cx) {
                float* cell = &map.at(cy, cx, 0);
                for (int k = 0; k < map.depth; ++k)
                    cell[k] = std::max(cell[k], descriptor[k]);
            }
    }
};

}  // namespace

std::vector<PooledFeatureMap> sp_cov(const Image& img, const SpCovConfig& cfg,
                                     std::vector<std::string>* skipped) {
    const BaseChannels base = compute_base_channels(img);
    const IntegralChannels integrals(base);

    std::vector<PooledFeatureMap> maps;
    for (int patch : cfg.patch_sizes) {
        if (patch > img.width || patch > img.height) {
            if (skipped)
                skipped->push_back("sp-cov patch " + std::to_string(patch) +
                                   " skipped: image " + std::to_string(img.width) + "x" +
                                   std::to_string(img.height) + " too small");
            continue;
        }
        PoolAccumulator acc("cov" + std::to_string(patch), img.width, img.height, patch,
                            cfg.pool_cell, cfg.pool_stride, kSpCovDepth);
        float descriptor[kSpCovDepth];
        for (int py = 0; py + patch <= img.height; ++py)
            for (int px = 0; px + patch <= img.width; ++px) {
                const auto moments =
                    integrals.patch_covariance({px, py, patch, patch});
                int k = 0;
                for (int a = kFirstDerivedStat; a < kNumStats; ++a)
                    descriptor[k++] = static_cast<float>(moments.variance[a]);
                for (int a = 0; a < kNumStats; ++a)
                    for (int b = a + 1; b < kNumStats; ++b) {
                        if (a == kStatX && b == kStatY) continue;
                        descriptor[k++] = static_cast<float>(moments.correlation(a, b));
                    }
                acc.pool(px, py, descriptor);
            }
        maps.push_back(std::move(acc.map));
    }
    return maps;
}

Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> lbp_codes(
    const Eigen::ArrayXXf& gray) {
    const int H = static_cast<int>(gray.rows()), W = static_cast<int>(gray.cols());
    // Clockwise from the top-left neighbour.
    constexpr int dy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
    constexpr int dx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
    Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> codes(H, W);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const float center = gray(y, x);
            unsigned code = 0;
            for (int k = 0; k < 8; ++k) {
                const int ny = clampi(y + dy[k], 0, H - 1);
                const int nx = clampi(x + dx[k], 0, W - 1);
                if (gray(ny, nx) >= center) code |= 1u << k;
            }
            codes(y, x) = static_cast<std::uint8_t>(code);
        }
    return codes;
}

int lbp_transitions(std::uint8_t code) {
    int transitions = 0;
    for (int k = 0; k < 8; ++k) {
        const int bit = code >> k & 1;
        const int next = code >> ((k + 1) % 8) & 1;
        transitions += bit != next;
    }
    return transitions;
}

namespace {

const std::array<std::uint8_t, 256>& uniform_bin_table() {
    static const std::array<std::uint8_t, 256> table = [] {
        std::array<std::uint8_t, 256> t{};
        int next = 0;
        for (int code = 0; code < 256; ++code)
            t[static_cast<std::size_t>(code)] =
                lbp_transitions(static_cast<std::uint8_t>(code)) <= 2
                    ? static_cast<std::uint8_t>(next++)
                    : static_cast<std::uint8_t>(kLbpBins - 1);
        return t;
    }();
    return table;
}

}  // namespace

int lbp_uniform_bin(std::uint8_t code) {
    return uniform_bin_table()[static_cast<std::size_t>(code)];
}

std::vector<PooledFeatureMap> sp_lbp(const Image& img, const SpLbpConfig& cfg,
                                     std::vector<std::string>* skipped) {
    if (img.width < 1 || img.height < 1)
        throw std::invalid_argument("sp_lbp: empty image");
    const Eigen::ArrayXXf gray = to_gray(img);
    const auto codes = lbp_codes(gray);

    // One integral table per histogram bin.
    std::array<Eigen::ArrayXXd, kLbpBins> integrals;
    {
        const int H = img.height, W = img.width;
        for (auto& t : integrals) t = Eigen::ArrayXXd::Zero(H + 1, W + 1);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                const int bin = lbp_uniform_bin(codes(y, x));
                integrals[static_cast<std::size_t>(bin)](y + 1, x + 1) += 1.0;
            }
        for (auto& t : integrals)
            for (int y = 1; y <= H; ++y)
                for (int x = 1; x <= W; ++x)
                    t(y, x) += t(y - 1, x) + t(y, x - 1) - t(y - 1, x - 1);
    }

    std::vector<PooledFeatureMap> maps;
    for (int patch : cfg.patch_sizes) {
        if (patch > img.width || patch > img.height) {
            if (skipped)
                skipped->push_back("sp-lbp patch " + std::to_string(patch) +
                                   " skipped: image " + std::to_string(img.width) + "x" +
                                   std::to_string(img.height) + " too small");
            continue;
        }
        PoolAccumulator acc("lbp" + std::to_string(patch), img.width, img.height, patch,
                            cfg.pool_cell, cfg.pool_stride, kLbpBins);
        const float area = static_cast<float>(patch) * static_cast<float>(patch);
        float descriptor[kLbpBins];
        for (int py = 0; py + patch <= img.height; ++py)
            for (int px = 0; px + patch <= img.width; ++px) {
                const Rect r{px, py, patch, patch};
                for (int bin = 0; bin < kLbpBins; ++bin)
                    descriptor[bin] = static_cast<float>(
                        lookup(integrals[static_cast<std::size_t>(bin)], r) / area);
                acc.pool(px, py, descriptor);
            }
        maps.push_back(std::move(acc.map));
    }
    return maps;
}

namespace {

// 4x4 mean cells on a stride-4 grid turn a per-pixel plane into a channel
// with the same cell geometry as the pooled descriptors.
PooledFeatureMap shrink_plane(const std::string& name, const Eigen::ArrayXXf& plane) {
    constexpr int kCell = 4;
    const int H = static_cast<int>(plane.rows()), W = static_cast<int>(plane.cols());
    PooledFeatureMap map;
    map.name = name;
    map.patch_size = kCell;
    map.pool_cell = kCell;
    map.pool_stride = kCell;
    map.grid_w = W >= kCell ? (W - kCell) / kCell + 1 : 0;
    map.grid_h = H >= kCell ? (H - kCell) / kCell + 1 : 0;
    map.depth = 1;
    map.data.assign(static_cast<std::size_t>(map.grid_w) *
                        static_cast<std::size_t>(map.grid_h),
                    0.0f);
    for (int cy = 0; cy < map.grid_h; ++cy)
        for (int cx = 0; cx < map.grid_w; ++cx) {
            float sum = 0;
            for (int y = 0; y < kCell; ++y)
                for (int x = 0; x < kCell; ++x)
                    sum += plane(cy * kCell + y, cx * kCell + x);
            map.at(cy, cx, 0) = sum / (kCell * kCell);
        }
    return map;
}

const char* stat_name(int stat) {
    switch (stat) {
        case kStatAbsGx: return "abs_gx";
        case kStatAbsGy: return "abs_gy";
        case kStatAbsGxx: return "abs_gxx";
        case kStatAbsGyy: return "abs_gyy";
        case kStatMag: return "mag";
        case kStatOrient1: return "orient1";
        case kStatOrient2: return "orient2";
        default: return "coord";
    }
}

}  // namespace

int FeatureMaps::channel_count() const {
    int count = 0;
    for (const PooledFeatureMap& map : channels) count += map.depth;
    return count;
}

FeatureMaps extract_feature_maps(const Image& img, const FeatureConfig& cfg,
                                 std::vector<std::string>* skipped) {
    FeatureMaps maps;
    maps.image_width = img.width;
    maps.image_height = img.height;

    BaseChannels base;
    const bool needs_base = cfg.sp_cov || cfg.luv || cfg.mag || cfg.orient;
    if (needs_base) base = compute_base_channels(img);

    if (cfg.sp_cov) {
        for (int stat = kFirstDerivedStat; stat < kNumStats; ++stat)
            maps.channels.push_back(shrink_plane(stat_name(stat), base.stats[stat]));
        for (PooledFeatureMap& map : sp_cov(img, cfg.cov, skipped))
            maps.channels.push_back(std::move(map));
    } else {
        if (cfg.mag) maps.channels.push_back(shrink_plane("mag", base.stats[kStatMag]));
        if (cfg.orient) {
            maps.channels.push_back(shrink_plane("orient1", base.stats[kStatOrient1]));
            maps.channels.push_back(shrink_plane("orient2", base.stats[kStatOrient2]));
        }
    }
    if (cfg.sp_lbp)
        for (PooledFeatureMap& map : sp_lbp(img, cfg.lbp, skipped))
            maps.channels.push_back(std::move(map));
    if (cfg.luv) {
        const char* names[3] = {"luv_l", "luv_u", "luv_v"};
        for (int c = 0; c < 3; ++c)
            maps.channels.push_back(shrink_plane(names[c], base.luv[static_cast<std::size_t>(c)]));
    }
    return maps;
}

Eigen::VectorXd window_features(const FeatureMaps& maps, const Rect& window) {
    if (window.x < 0 || window.y < 0 || window.w < 1 || window.h < 1 ||
        window.x + window.w > maps.image_width ||
        window.y + window.h > maps.image_height)
        throw std::invalid_argument("window_features: window outside image");

    std::vector<double> values;
    for (const PooledFeatureMap& map : maps.channels) {
        const int stride = map.pool_stride, patch = map.patch_size;
        if (window.w < patch || window.h < patch) continue;  // no cell fits
        const int cx_lo = (window.x + stride - 1) / stride;
        const int cy_lo = (window.y + stride - 1) / stride;
        const int cx_hi = std::min(map.grid_w - 1, (window.x + window.w - patch) / stride);
        const int cy_hi = std::min(map.grid_h - 1, (window.y + window.h - patch) / stride);
        for (int k = 0; k < map.depth; ++k)
            for (int cy = cy_lo; cy <= cy_hi; ++cy)
                for (int cx = cx_lo; cx <= cx_hi; ++cx)
                    values.push_back(map.at(cy, cx, k));
    }
    if (values.empty()) return Eigen::VectorXd();
    return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                             static_cast<Eigen::Index>(values.size()));
}

}  // namespace paucens
