#include "sunpatch/image.hpp"

#include <cmath>
#include <string>

namespace sunpatch {

const char* to_string(Modality m) {
    return m == Modality::continuum ? "continuum" : "magnetogram";
}

const char* to_string(Region r) {
    switch (r) {
        case Region::background: return "background";
        case Region::penumbra: return "penumbra";
        case Region::umbra: return "umbra";
    }
    return "?";
}

ImageGrid::ImageGrid(int rows, int cols, std::vector<double> values, Modality modality)
    : rows_(rows), cols_(cols), modality_(modality), values_(std::move(values)) {
    if (rows_ < 1 || cols_ < 1) {
        throw InvalidParameterError("ImageGrid dimensions must be positive, got " +
                                    std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    if (values_.size() != static_cast<std::size_t>(rows_) * cols_) {
        throw DimensionMismatchError("ImageGrid value count " + std::to_string(values_.size()) +
                                     " does not match " + std::to_string(rows_) + "x" +
                                     std::to_string(cols_));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw InvalidParameterError("ImageGrid values must be finite");
        }
    }
}

ImageGrid ImageGrid::constant(int rows, int cols, double value, Modality modality) {
    return ImageGrid(rows, cols,
                     std::vector<double>(static_cast<std::size_t>(rows) * cols, value),
                     modality);
}

double ImageGrid::mean() const {
    double sum = 0.0;
    for (double v : values_) sum += v;
    return sum / static_cast<double>(values_.size());
}

double ImageGrid::stddev() const {
    const double m = mean();
    double ss = 0.0;
    for (double v : values_) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values_.size()));
}

ImagePair::ImagePair(ImageGrid cont_grid, ImageGrid mag_grid)
    : cont(std::move(cont_grid)), mag(std::move(mag_grid)) {
    if (cont.rows() != mag.rows() || cont.cols() != mag.cols()) {
        throw DimensionMismatchError("ImagePair modalities are not co-registered: cont " +
                                     std::to_string(cont.rows()) + "x" + std::to_string(cont.cols()) +
                                     " vs mag " + std::to_string(mag.rows()) + "x" +
                                     std::to_string(mag.cols()));
    }
}

RegionMask::RegionMask(int rows, int cols, std::vector<std::uint8_t> labels)
    : rows_(rows), cols_(cols), labels_(std::move(labels)) {
    if (rows_ < 1 || cols_ < 1) {
        throw InvalidParameterError("RegionMask dimensions must be positive");
    }
    if (labels_.size() != static_cast<std::size_t>(rows_) * cols_) {
        throw DimensionMismatchError("RegionMask label count does not match dimensions");
    }
    for (std::uint8_t l : labels_) {
        if (l > 2) {
            throw InvalidParameterError("RegionMask labels must be 0 (background), 1 (penumbra) or 2 (umbra)");
        }
    }
}

RegionMask RegionMask::all_background(int rows, int cols) {
    return RegionMask(rows, cols,
                      std::vector<std::uint8_t>(static_cast<std::size_t>(rows) * cols, 0));
}

std::size_t RegionMask::count(Region reg) const {
    std::size_t n = 0;
    for (std::uint8_t l : labels_) {
        if (l == static_cast<std::uint8_t>(reg)) ++n;
    }
    return n;
}

void RegionMask::require_matches(int rows, int cols, const char* what) const {
    if (rows_ != rows || cols_ != cols) {
        throw DimensionMismatchError(std::string("mask dimensions ") + std::to_string(rows_) + "x" +
                                     std::to_string(cols_) + " do not match " + what + " " +
                                     std::to_string(rows) + "x" + std::to_string(cols));
    }
}

MaskedGrid::MaskedGrid(int rows_, int cols_)
    : rows(rows_), cols(cols_),
      values(static_cast<std::size_t>(rows_) * cols_, 0.0),
      present(static_cast<std::size_t>(rows_) * cols_, 0) {}

} // namespace sunpatch
