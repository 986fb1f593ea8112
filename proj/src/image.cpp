#include "paucens/image.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "paucens/errors.hpp"

namespace paucens {

Image make_image(int width, int height, int channels, float fill) {
    Image img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.data.assign(static_cast<std::size_t>(width) * height * channels, fill);
    return img;
}

namespace {

// Skips whitespace and '#' comments between PNM header fields.
int read_pnm_int(std::istream& in, const std::string& path) {
    int c = in.get();
    while (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#') {
        if (c == '#')
            while (c != '\n' && c != EOF) c = in.get();
        c = in.get();
    }
    int value = 0;
    bool any = false;
    while (c >= '0' && c <= '9') {
        value = value * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    if (!any) throw DataError(path + ": malformed PNM header");
    return value;
}

}  // namespace

Image read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
        throw DataError(path + ": not a binary PGM/PPM file");
    const int channels = magic[1] == '5' ? 1 : 3;
    const int width = read_pnm_int(in, path);
    const int height = read_pnm_int(in, path);
    const int maxval = read_pnm_int(in, path);
    if (width < 1 || height < 1) throw DataError(path + ": bad dimensions");
    if (maxval < 1 || maxval > 255)
        throw DataError(path + ": only 8-bit PNM supported (maxval " +
                        std::to_string(maxval) + ")");

    std::vector<std::uint8_t> raw(static_cast<std::size_t>(width) * height * channels);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw DataError(path + ": truncated pixel data");

    Image img = make_image(width, height, channels);
    const float scale = 1.0f / static_cast<float>(maxval);
    // PNM interleaves channels; we store planes.
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < channels; ++c)
                img.at(c, y, x) =
                    scale * raw[static_cast<std::size_t>((y * width + x) * channels + c)];
    return img;
}

Image read_raw_float(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string magic;
    int width = 0, height = 0, channels = 0;
    hs >> magic >> width >> height >> channels;
    if (magic != "rawfloat" || width < 1 || height < 1 || channels < 1)
        throw DataError(path + ": bad rawfloat header '" + header + "'");
    Image img = make_image(width, height, channels);
    in.read(reinterpret_cast<char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(img.data.size() * sizeof(float)))
        throw DataError(path + ": truncated rawfloat data");
    return img;
}

void write_raw_float(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "rawfloat " << img.width << ' ' << img.height << ' ' << img.channels << '\n';
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size() * sizeof(float)));
    if (!out) throw DataError("write failed for '" + path + "'");
}

Image read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    char magic[8] = {};
    in.read(magic, sizeof(magic));
    in.close();
    if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) return read_pnm(path);
    if (std::memcmp(magic, "rawfloat", 8) == 0) return read_raw_float(path);
    throw DataError(path + ": unrecognized image format");
}

}  // namespace paucens
