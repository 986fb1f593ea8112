#include "paucens/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "paucens/errors.hpp"

namespace paucens {

void Dataset::validate() const {
    if (positives.rows() < 1 || negatives.rows() < 1)
        throw std::invalid_argument("dataset: need at least one sample per class");
    if (positives.cols() != negatives.cols())
        throw std::invalid_argument("dataset: positive/negative feature dimensions differ");
    if (positives.cols() < 1)
        throw std::invalid_argument("dataset: feature dimension must be >= 1");
    if (!positives.allFinite() || !negatives.allFinite())
        throw std::invalid_argument("dataset: non-finite feature value");
}

bool Dataset::operator==(const Dataset& other) const {
    return positives.rows() == other.positives.rows() &&
           negatives.rows() == other.negatives.rows() &&
           positives.cols() == other.positives.cols() &&
           positives == other.positives && negatives == other.negatives;
}

void ToyConfig::validate() const {
    if (n_train_per_class < 1 || n_test_per_class < 1 || n_val_per_class < 0)
        throw std::invalid_argument("toy config: sample counts must be positive");
    if (!(neg_radius_std > 0))
        throw std::invalid_argument("toy config: neg_radius_std must be > 0");
    if (!(pos_radius_max > 0))
        throw std::invalid_argument("toy config: pos_radius_max must be > 0");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Explicit uniform/normal draws so the stream is identical on every
// platform regardless of the standard library's distribution code.
struct ToyStream {
    std::mt19937_64 engine;

    explicit ToyStream(std::uint64_t seed, std::uint64_t stream_id)
        : engine(splitmix64(splitmix64(seed) ^ stream_id)) {}

    double uniform01() {  // [0, 1)
        return static_cast<double>(engine() >> 11) * 0x1.0p-53;
    }

    double normal() {  // Box-Muller, cosine branch
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }
};

Eigen::MatrixXd draw_radial(Eigen::Index count, ToyStream& rng, bool positive,
                            const ToyConfig& cfg) {
    Eigen::MatrixXd out(count, 2);
    for (Eigen::Index i = 0; i < count; ++i) {
        double radius = positive
                            ? cfg.pos_radius_max * rng.uniform01()
                            : cfg.neg_radius_mean + cfg.neg_radius_std * rng.normal();
        double angle = 2.0 * std::numbers::pi * rng.uniform01();
        out(i, 0) = radius * std::cos(angle);
        out(i, 1) = radius * std::sin(angle);
    }
    return out;
}

Dataset draw_split(Eigen::Index per_class, std::uint64_t seed,
                   std::uint64_t first_stream, const ToyConfig& cfg) {
    ToyStream pos_rng(seed, first_stream);
    ToyStream neg_rng(seed, first_stream + 1);
    Dataset ds;
    ds.positives = draw_radial(per_class, pos_rng, true, cfg);
    ds.negatives = draw_radial(per_class, neg_rng, false, cfg);
    return ds;
}

}  // namespace

ToyData generate_toy(const ToyConfig& cfg) {
    cfg.validate();
    ToyData data;
    data.train = draw_split(cfg.n_train_per_class, cfg.seed, 0, cfg);
    if (cfg.n_val_per_class > 0)
        data.val = draw_split(cfg.n_val_per_class, cfg.seed, 2, cfg);
    data.test = draw_split(cfg.n_test_per_class, cfg.seed, 4, cfg);
    return data;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    auto end = s.find_last_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& raw, const std::string& path, std::size_t row,
                  const std::string& column) {
    const std::string text = trim(raw);
    if (text.empty())
        throw DataError(path + ":" + std::to_string(row) + ": column '" + column +
                        "': missing value");
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw DataError(path + ":" + std::to_string(row) + ": column '" + column +
                        "': not a number: '" + text + "'");
    if (!std::isfinite(value))
        throw DataError(path + ":" + std::to_string(row) + ": column '" + column +
                        "': non-finite value '" + text + "'");
    return value;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    const auto header = split_line(line);
    std::ptrdiff_t label_idx = -1;
    std::vector<std::string> feature_names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == label_column)
            label_idx = static_cast<std::ptrdiff_t>(i);
        else
            feature_names.push_back(trim(header[i]));
    }
    if (label_idx < 0)
        throw DataError(path + ": no column named '" + label_column + "' in header");
    const std::size_t dim = header.size() - 1;
    if (dim == 0) throw DataError(path + ": no feature columns");

    std::vector<std::vector<double>> pos_rows, neg_rows;
    bool saw_zero = false, saw_minus_one = false;
    std::size_t row = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw DataError(path + ":" + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        std::vector<double> features;
        features.reserve(dim);
        double label = 0;
        std::size_t feat = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (static_cast<std::ptrdiff_t>(i) == label_idx) {
                label = parse_cell(cells[i], path, row, label_column);
            } else {
                features.push_back(parse_cell(cells[i], path, row, feature_names[feat]));
                ++feat;
            }
        }
        if (label == 1.0) {
            pos_rows.push_back(std::move(features));
        } else if (label == -1.0) {
            saw_minus_one = true;
            neg_rows.push_back(std::move(features));
        } else if (label == 0.0) {
            saw_zero = true;
            neg_rows.push_back(std::move(features));
        } else {
            throw DataError(path + ":" + std::to_string(row) + ": column '" +
                            label_column + "': label must be +1/-1 or 1/0, got '" +
                            format_double(label) + "'");
        }
    }
    if (saw_zero && saw_minus_one)
        throw DataError(path + ": labels mix the 1/0 and +1/-1 conventions");
    if (pos_rows.empty() || neg_rows.empty())
        throw DataError(path + ": need both classes, got " +
                        std::to_string(pos_rows.size()) + " positive / " +
                        std::to_string(neg_rows.size()) + " negative rows");

    Dataset ds;
    ds.positives.resize(static_cast<Eigen::Index>(pos_rows.size()),
                        static_cast<Eigen::Index>(dim));
    ds.negatives.resize(static_cast<Eigen::Index>(neg_rows.size()),
                        static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < pos_rows.size(); ++i)
        for (std::size_t j = 0; j < dim; ++j)
            ds.positives(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                pos_rows[i][j];
    for (std::size_t i = 0; i < neg_rows.size(); ++i)
        for (std::size_t j = 0; j < dim; ++j)
            ds.negatives(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                neg_rows[i][j];
    ds.validate();
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path,
              const std::string& label_column) {
    ds.validate();
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    for (Eigen::Index j = 0; j < ds.dim(); ++j) out << 'f' << j << ',';
    out << label_column << '\n';
    auto write_rows = [&](const Eigen::MatrixXd& rows, const char* label) {
        for (Eigen::Index i = 0; i < rows.rows(); ++i) {
            for (Eigen::Index j = 0; j < rows.cols(); ++j)
                out << format_double(rows(i, j)) << ',';
            out << label << '\n';
        }
    };
    write_rows(ds.positives, "1");
    write_rows(ds.negatives, "-1");
    if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace paucens
