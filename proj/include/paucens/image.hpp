#pragma once

#include <string>
#include <vector>

namespace paucens {

/// Planar float image with values in [0, 1]. data[c*W*H + y*W + x].
struct Image {
    int width = 0, height = 0, channels = 1;
    std::vector<float> data;

    float at(int c, int y, int x) const {
        return data[static_cast<std::size_t>((c * height + y) * width + x)];
    }
    float& at(int c, int y, int x) {
        return data[static_cast<std::size_t>((c * height + y) * width + x)];
    }
};

Image make_image(int width, int height, int channels = 1, float fill = 0.0f);

/// Binary PGM (P5) or PPM (P6), maxval <= 255; pixels scaled to [0, 1].
Image read_pnm(const std::string& path);

/// Test-friendly planar float format: a "rawfloat W H C" header line
/// followed by little-endian float32 planes.
Image read_raw_float(const std::string& path);
void write_raw_float(const Image& img, const std::string& path);

/// Dispatches on the file's magic bytes (P5/P6/rawfloat).
Image read_image(const std::string& path);

}  // namespace paucens
