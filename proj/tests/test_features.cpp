#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "paucens/errors.hpp"
#include "paucens/features.hpp"
#include "paucens/image.hpp"

using namespace paucens;

namespace {

Image random_image(oracles::Rng& rng, int w, int h, int channels = 1) {
    Image img = make_image(w, h, channels);
    for (float& v : img.data) v = static_cast<float>(rng.uniform01());
    return img;
}

// Values on a coarse dyadic grid so adding another dyadic offset is exact
// in float arithmetic.
Image dyadic_image(oracles::Rng& rng, int w, int h) {
    Image img = make_image(w, h, 1);
    for (float& v : img.data) v = static_cast<float>(rng.uniform_int(0, 14)) / 16.0f;
    return img;
}

}  // namespace

TEST_SUITE_BEGIN("features");

TEST_CASE("constant image kills every derivative statistic") {
    const Image img = make_image(16, 16, 1, 0.5f);
    const BaseChannels base = compute_base_channels(img);
    for (int stat : {kStatAbsGx, kStatAbsGy, kStatAbsGxx, kStatAbsGyy, kStatMag,
                     kStatOrient1})
        CHECK(base.stats[stat].abs().maxCoeff() == 0.0f);
    // atan2(0, 0) maps to the top of the orientation interval.
    CHECK(base.stats[kStatOrient2].minCoeff() ==
          doctest::Approx(std::numbers::pi).epsilon(1e-6));
}

TEST_CASE("vertical step edge has zero vertical derivative") {
    Image img = make_image(16, 16, 1);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) img.at(0, y, x) = x < 8 ? 0.0f : 1.0f;
    const BaseChannels base = compute_base_channels(img);
    for (int y = 1; y < 15; ++y)
        for (int x = 0; x < 16; ++x) CHECK(base.stats[kStatAbsGy](y, x) == 0.0f);
    // On the edge columns the orientation collapses to the interval ends.
    for (int y = 0; y < 16; ++y) {
        const float o2 = base.stats[kStatOrient2](y, 7);
        CHECK((o2 == doctest::Approx(0.0) || o2 == doctest::Approx(std::numbers::pi)));
    }
}

TEST_CASE("orientation stays inside its interval on random images") {
    oracles::Rng rng(99);
    for (int round = 0; round < 10; ++round) {
        const Image img = random_image(rng, 64, 64);
        const BaseChannels base = compute_base_channels(img);
        CHECK(base.stats[kStatOrient2].minCoeff() >= 0.0f);
        CHECK(base.stats[kStatOrient2].maxCoeff() <=
              static_cast<float>(std::numbers::pi) * (1 + 1e-6f));
        CHECK(base.stats[kStatOrient1].minCoeff() >= 0.0f);
    }
}

TEST_CASE("rectangular sums are exact on integer planes") {
    oracles::Rng rng(3);
    BaseChannels base;
    base.width = 20;
    base.height = 15;
    for (auto& plane : base.stats) {
        plane.resize(15, 20);
        for (int y = 0; y < 15; ++y)
            for (int x = 0; x < 20; ++x)
                plane(y, x) = static_cast<float>(rng.uniform_int(0, 9));
    }
    const IntegralChannels integrals(base);
    for (int round = 0; round < 50; ++round) {
        const int w = rng.uniform_int(1, 20), h = rng.uniform_int(1, 15);
        const int x = rng.uniform_int(0, 20 - w), y = rng.uniform_int(0, 15 - h);
        const int stat = rng.uniform_int(0, kNumStats - 1);
        double direct = 0;
        for (int yy = y; yy < y + h; ++yy)
            for (int xx = x; xx < x + w; ++xx) direct += base.stats[stat](yy, xx);
        CHECK(integrals.rect_sum(stat, {x, y, w, h}) == direct);
    }
}

TEST_CASE("patch covariance matches a naive two-pass oracle") {
    oracles::Rng rng(41);
    const Image img = random_image(rng, 40, 40);
    const BaseChannels base = compute_base_channels(img);
    const IntegralChannels integrals(base);
    for (int round = 0; round < 30; ++round) {
        const int size = rng.uniform_int(8, 24);
        const int px = rng.uniform_int(0, 40 - size), py = rng.uniform_int(0, 40 - size);
        const auto moments = integrals.patch_covariance({px, py, size, size});
        const double count = static_cast<double>(size) * size;
        for (int a = 0; a < kNumStats; ++a) {
            double mean_a = 0;
            for (int y = py; y < py + size; ++y)
                for (int x = px; x < px + size; ++x) mean_a += base.stats[a](y, x);
            mean_a /= count;
            for (int b = a; b < kNumStats; ++b) {
                double mean_b = 0, cov = 0;
                for (int y = py; y < py + size; ++y)
                    for (int x = px; x < px + size; ++x) mean_b += base.stats[b](y, x);
                mean_b /= count;
                for (int y = py; y < py + size; ++y)
                    for (int x = px; x < px + size; ++x)
                        cov += (base.stats[a](y, x) - mean_a) *
                               (base.stats[b](y, x) - mean_b);
                cov /= count;
                if (a == b) {
                    CHECK(moments.variance[a] ==
                          doctest::Approx(std::max(0.0, cov)).epsilon(1e-6));
                } else {
                    const double va = moments.variance[a], vb = moments.variance[b];
                    const double expected =
                        va > 0 && vb > 0
                            ? std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0)
                            : 0.0;
                    CHECK(moments.correlation(a, b) ==
                          doctest::Approx(expected).epsilon(1e-6));
                }
                CHECK(moments.correlation(a, b) >= -1.0);
                CHECK(moments.correlation(a, b) <= 1.0);
                if (a == b) CHECK(moments.variance[a] >= 0.0);
            }
        }
    }
}

TEST_CASE("constant patches have zero variances and correlations") {
    const Image img = make_image(24, 24, 1, 0.25f);
    const IntegralChannels integrals{compute_base_channels(img)};
    const auto moments = integrals.patch_covariance({4, 4, 8, 8});
    for (int a = kFirstDerivedStat; a < kNumStats; ++a) {
        if (a == kStatOrient2) continue;  // constant pi, still zero variance
        CHECK(moments.variance[a] == doctest::Approx(0.0));
    }
    CHECK(moments.variance[kStatOrient2] == doctest::Approx(0.0).epsilon(1e-9));
    // Zero variance forces correlation zero, even against the varying coordinates.
    CHECK(moments.correlation(kStatX, kStatMag) == 0.0);
    CHECK(moments.correlation(kStatAbsGx, kStatAbsGy) == 0.0);
    // The coordinate planes do vary inside the patch.
    CHECK(moments.variance[kStatX] == doctest::Approx(5.25));
    CHECK(moments.correlation(kStatX, kStatY) == 0.0);
}

TEST_CASE("identical derivative planes correlate to one") {
    // I = ((x + y)/64)^2 makes the two first derivatives bit-identical.
    Image img = make_image(32, 32, 1);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            const float s = static_cast<float>(x + y) / 64.0f;
            img.at(0, y, x) = s * s;
        }
    const IntegralChannels integrals{compute_base_channels(img)};
    const auto moments = integrals.patch_covariance({4, 4, 16, 16});
    CHECK(moments.variance[kStatAbsGx] > 0);
    CHECK(moments.correlation(kStatAbsGx, kStatAbsGy) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rect validation") {
    const Image img = make_image(16, 16, 1, 0.1f);
    const IntegralChannels integrals{compute_base_channels(img)};
    CHECK_THROWS_AS(integrals.patch_covariance({10, 10, 8, 8}), std::invalid_argument);
    CHECK_THROWS_AS(integrals.patch_covariance({0, 0, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(compute_base_channels(make_image(2, 8, 1)), std::invalid_argument);
}

TEST_CASE("default channel stack counts 136 planes") {
    oracles::Rng rng(8);
    const Image img = random_image(rng, 64, 64, 3);
    const FeatureMaps maps = extract_feature_maps(img);  // sp-cov + luv
    CHECK(maps.channel_count() == 136);
    // 7 base statistics + 3 scales x 42 + 3 LUV planes.
    CHECK(maps.channels.size() == 7 + 3 + 3);
}

TEST_CASE("channel groups can be selected independently") {
    oracles::Rng rng(12);
    const Image img = random_image(rng, 40, 40);
    FeatureConfig cfg;
    cfg.sp_cov = false;
    cfg.luv = false;
    cfg.mag = true;
    cfg.orient = true;
    const FeatureMaps maps = extract_feature_maps(img, cfg);
    CHECK(maps.channel_count() == 3);  // magnitude + two orientations
    CHECK(maps.channels[0].name == "mag");

    FeatureConfig lbp_only;
    lbp_only.sp_cov = lbp_only.luv = false;
    lbp_only.sp_lbp = true;
    CHECK(extract_feature_maps(img, lbp_only).channel_count() == 3 * kLbpBins);
}

TEST_CASE("small images drop the scales that no longer fit") {
    oracles::Rng rng(18);
    const Image img = random_image(rng, 24, 24);
    std::vector<std::string> skipped;
    const auto maps = sp_cov(img, {}, &skipped);
    CHECK(maps.size() == 2);  // 8 and 16 fit, 32 does not
    REQUIRE(skipped.size() == 1);
    CHECK(skipped[0].find("32") != std::string::npos);
}

TEST_CASE("pooled cells are the max of their contributing patches") {
    oracles::Rng rng(29);
    const Image img = random_image(rng, 20, 20);
    const auto maps = sp_cov(img, {{8}, 4, 4});
    REQUIRE(maps.size() == 1);
    const PooledFeatureMap& map = maps[0];
    const IntegralChannels integrals{compute_base_channels(img)};

    for (int cy = 0; cy < map.grid_h; ++cy)
        for (int cx = 0; cx < map.grid_w; ++cx) {
            std::vector<float> best(static_cast<std::size_t>(map.depth),
                                    -std::numeric_limits<float>::infinity());
            for (int py = cy * 4; py < std::min(cy * 4 + 4, 20 - 8 + 1); ++py)
                for (int px = cx * 4; px < std::min(cx * 4 + 4, 20 - 8 + 1); ++px) {
                    const auto moments = integrals.patch_covariance({px, py, 8, 8});
                    int k = 0;
                    for (int a = kFirstDerivedStat; a < kNumStats; ++a)
                        best[k] = std::max(best[k],
                                           static_cast<float>(moments.variance[a])),
                        ++k;
                    for (int a = 0; a < kNumStats; ++a)
                        for (int b = a + 1; b < kNumStats; ++b) {
                            if (a == kStatX && b == kStatY) continue;
                            best[k] = std::max(
                                best[k], static_cast<float>(moments.correlation(a, b)));
                            ++k;
                        }
                }
            for (int k = 0; k < map.depth; ++k) CHECK(map.at(cy, cx, k) == best[k]);
        }
}

TEST_CASE("four-pixel translation shifts the pooled grid by one cell") {
    oracles::Rng rng(61);
    const Image master = random_image(rng, 72, 72);
    Image a = make_image(64, 64), b = make_image(64, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            a.at(0, y, x) = master.at(0, y, x);
            b.at(0, y, x) = master.at(0, y + 4, x + 4);
        }
    const auto maps_a = sp_cov(a), maps_b = sp_cov(b);
    REQUIRE(maps_a.size() == maps_b.size());
    for (std::size_t s = 0; s < maps_a.size(); ++s) {
        const PooledFeatureMap& ma = maps_a[s];
        const PooledFeatureMap& mb = maps_b[s];
        // Interior cells: one cell of margin keeps clamped borders out of
        // every contributing patch.
        for (int cy = 1; cy + 2 < mb.grid_h; ++cy)
            for (int cx = 1; cx + 2 < mb.grid_w; ++cx)
                for (int k = 0; k < mb.depth; ++k)
                    CHECK(mb.at(cy, cx, k) == ma.at(cy + 1, cx + 1, k));
    }
}

TEST_CASE("derivative statistics ignore constant intensity offsets") {
    oracles::Rng rng(70);
    const Image img = dyadic_image(rng, 32, 32);
    Image shifted = img;
    for (float& v : shifted.data) v += 1.0f / 16.0f;
    const BaseChannels a = compute_base_channels(img);
    const BaseChannels b = compute_base_channels(shifted);
    for (int stat = kFirstDerivedStat; stat < kNumStats; ++stat)
        CHECK((a.stats[stat] == b.stats[stat]).all());
    const auto cov_a = sp_cov(img), cov_b = sp_cov(shifted);
    for (std::size_t s = 0; s < cov_a.size(); ++s)
        CHECK(cov_a[s].data == cov_b[s].data);
}

TEST_CASE("lbp codes and uniform binning") {
    CHECK(lbp_transitions(0b00001111) == 2);
    CHECK(lbp_transitions(0b01010101) == 8);
    CHECK(lbp_transitions(0x00) == 0);
    CHECK(lbp_transitions(0xFF) == 0);
    int uniform = 0;
    for (int code = 0; code < 256; ++code)
        if (lbp_transitions(static_cast<std::uint8_t>(code)) <= 2) ++uniform;
    CHECK(uniform == 58);
    CHECK(lbp_uniform_bin(0b01010101) == kLbpBins - 1);
    CHECK(lbp_uniform_bin(0b00001111) < 58);

    const Eigen::ArrayXXf flat = Eigen::ArrayXXf::Constant(8, 8, 0.3f);
    const auto codes = lbp_codes(flat);
    CHECK((codes == 255).all());
}

TEST_CASE("constant image pools a single lbp bin") {
    const Image img = make_image(24, 24, 1, 0.7f);
    const auto maps = sp_lbp(img, {{8}, 8, 4});
    REQUIRE(maps.size() == 1);
    const int constant_bin = lbp_uniform_bin(255);
    for (int cy = 0; cy < maps[0].grid_h; ++cy)
        for (int cx = 0; cx < maps[0].grid_w; ++cx)
            for (int k = 0; k < kLbpBins; ++k)
                CHECK(maps[0].at(cy, cx, k) == (k == constant_bin ? 1.0f : 0.0f));
}

TEST_CASE("window features have the documented fixed length") {
    oracles::Rng rng(90);
    const Image img = random_image(rng, 64, 96, 3);
    const FeatureMaps maps = extract_feature_maps(img);
    const Eigen::VectorXd window = window_features(maps, {0, 0, 32, 64});
    // Cells per channel for a 32x64 window: floor((side - patch)/4) + 1.
    const int cov8 = (7 * 15) * 42, cov16 = (5 * 13) * 42, cov32 = (1 * 9) * 42;
    const int base = (8 * 16) * 7, luv = (8 * 16) * 3;
    CHECK(window.size() == cov8 + cov16 + cov32 + base + luv);
    CHECK(window.size() == 8798);
}

TEST_CASE("whole-image window concatenates every cell") {
    oracles::Rng rng(91);
    const Image img = random_image(rng, 48, 48);
    FeatureConfig cfg;
    cfg.luv = false;
    const FeatureMaps maps = extract_feature_maps(img, cfg);
    const Eigen::VectorXd all = window_features(maps, {0, 0, 48, 48});
    Eigen::Index expected = 0;
    for (const auto& map : maps.channels)
        expected += static_cast<Eigen::Index>(map.grid_w) * map.grid_h * map.depth;
    CHECK(all.size() == expected);

    Eigen::Index offset = 0;
    for (const auto& map : maps.channels)
        for (int k = 0; k < map.depth; ++k)
            for (int cy = 0; cy < map.grid_h; ++cy)
                for (int cx = 0; cx < map.grid_w; ++cx)
                    CHECK(all[offset++] == static_cast<double>(map.at(cy, cx, k)));

    CHECK_THROWS_AS(window_features(maps, {40, 0, 16, 16}), std::invalid_argument);
}

TEST_CASE("periodic images give identical windows at stride offsets") {
    // Period 4 in x: windows 4 pixels apart see identical pixels.
    Image img = make_image(48, 32, 1);
    oracles::Rng rng(92);
    float pattern[4][32];
    for (int p = 0; p < 4; ++p)
        for (int y = 0; y < 32; ++y) pattern[p][y] = static_cast<float>(rng.uniform01());
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 48; ++x) img.at(0, y, x) = pattern[x % 4][y];

    FeatureConfig cfg;
    cfg.luv = false;
    cfg.cov.patch_sizes = {8};
    const FeatureMaps maps = extract_feature_maps(img, cfg);
    const Eigen::VectorXd wa = window_features(maps, {4, 4, 16, 24});
    const Eigen::VectorXd wb = window_features(maps, {8, 4, 16, 24});
    REQUIRE(wa.size() == wb.size());
    CHECK((wa - wb).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("pnm and rawfloat io") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "paucens_tests";
    fs::create_directories(dir);

    {
        std::ofstream out(dir / "gray.pgm", std::ios::binary);
        out << "P5\n# comment\n3 2\n255\n";
        const unsigned char bytes[6] = {0, 128, 255, 10, 20, 30};
        out.write(reinterpret_cast<const char*>(bytes), 6);
    }
    const Image gray = read_image((dir / "gray.pgm").string());
    CHECK(gray.width == 3);
    CHECK(gray.height == 2);
    CHECK(gray.channels == 1);
    CHECK(gray.at(0, 0, 2) == doctest::Approx(1.0f));
    CHECK(gray.at(0, 0, 1) == doctest::Approx(128.0f / 255.0f));

    {
        std::ofstream out(dir / "color.ppm", std::ios::binary);
        out << "P6\n2 1\n255\n";
        const unsigned char bytes[6] = {255, 0, 0, 0, 255, 0};
        out.write(reinterpret_cast<const char*>(bytes), 6);
    }
    const Image color = read_image((dir / "color.ppm").string());
    CHECK(color.channels == 3);
    CHECK(color.at(0, 0, 0) == doctest::Approx(1.0f));
    CHECK(color.at(1, 0, 1) == doctest::Approx(1.0f));
    CHECK(color.at(2, 0, 0) == doctest::Approx(0.0f));

    oracles::Rng rng(93);
    const Image noise = random_image(rng, 7, 5, 3);
    write_raw_float(noise, (dir / "noise.rawf").string());
    const Image reloaded = read_image((dir / "noise.rawf").string());
    CHECK(reloaded.width == 7);
    CHECK(reloaded.channels == 3);
    CHECK(reloaded.data == noise.data);

    CHECK_THROWS_AS(read_image((dir / "does_not_exist.pgm").string()), DataError);
}

TEST_SUITE_END();
