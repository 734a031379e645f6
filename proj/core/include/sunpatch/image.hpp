#ifndef SUNPATCH_IMAGE_HPP
#define SUNPATCH_IMAGE_HPP

#include <cstdint>
#include <vector>

#include "sunpatch/errors.hpp"

namespace sunpatch {

enum class Modality : std::uint8_t { continuum, magnetogram };

enum class Region : std::uint8_t { background = 0, penumbra = 1, umbra = 2 };

const char* to_string(Modality m);
const char* to_string(Region r);

/// One image modality: a rows x cols grid of finite intensities, row-major.
class ImageGrid {
public:
    ImageGrid(int rows, int cols, std::vector<double> values, Modality modality);

    /// Constant-valued grid.
    static ImageGrid constant(int rows, int cols, double value, Modality modality);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Modality modality() const { return modality_; }

    double at(int r, int c) const { return values_[static_cast<std::size_t>(r) * cols_ + c]; }
    double& at(int r, int c) { return values_[static_cast<std::size_t>(r) * cols_ + c]; }

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    double mean() const;
    /// Population standard deviation over all pixels.
    double stddev() const;

private:
    int rows_;
    int cols_;
    Modality modality_;
    std::vector<double> values_;
};

/// Co-registered continuum / magnetogram pair.
struct ImagePair {
    ImageGrid cont;
    ImageGrid mag;

    ImagePair(ImageGrid cont_grid, ImageGrid mag_grid);

    int rows() const { return cont.rows(); }
    int cols() const { return cont.cols(); }
};

/// Per-pixel region labels annotating an ImagePair.
class RegionMask {
public:
    RegionMask(int rows, int cols, std::vector<std::uint8_t> labels);

    static RegionMask all_background(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Region at(int r, int c) const {
        return static_cast<Region>(labels_[static_cast<std::size_t>(r) * cols_ + c]);
    }
    void set(int r, int c, Region reg) {
        labels_[static_cast<std::size_t>(r) * cols_ + c] = static_cast<std::uint8_t>(reg);
    }

    const std::vector<std::uint8_t>& labels() const { return labels_; }
    std::size_t count(Region reg) const;

    void require_matches(int rows, int cols, const char* what) const;

private:
    int rows_;
    int cols_;
    std::vector<std::uint8_t> labels_;
};

/// A grid in which only some pixels carry a value. In-memory there is no NaN
/// sentinel; absence is explicit. The GRD1 writer maps absent pixels to NaN.
struct MaskedGrid {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;        // meaningful only where present
    std::vector<std::uint8_t> present; // 0/1 per pixel

    MaskedGrid() = default;
    MaskedGrid(int rows_, int cols_);

    void set(int r, int c, double v) {
        const std::size_t i = static_cast<std::size_t>(r) * cols + c;
        values[i] = v;
        present[i] = 1;
    }
    bool has(int r, int c) const {
        return present[static_cast<std::size_t>(r) * cols + c] != 0;
    }
    double at(int r, int c) const {
        return values[static_cast<std::size_t>(r) * cols + c];
    }
};

} // namespace sunpatch

#endif
