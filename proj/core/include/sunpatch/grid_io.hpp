#ifndef SUNPATCH_GRID_IO_HPP
#define SUNPATCH_GRID_IO_HPP

#include <string>
#include <vector>

#include "sunpatch/image.hpp"

namespace sunpatch {

// GRD1 file format, used for images and masks:
//   ASCII header line "GRD1 <rows> <cols> <dtype>" with dtype in {f64, u8},
//   a newline, then rows*cols little-endian binary values row-major.
// Masks are u8 with values {0,1,2}. NaN is legal in f64 files only as the
// absent-pixel sentinel of a masked grid.

void write_grid(const std::string& path, const ImageGrid& grid);
ImageGrid read_grid(const std::string& path, Modality modality);

void write_mask(const std::string& path, const RegionMask& mask);
RegionMask read_mask(const std::string& path);

/// f64 grid without the ImageGrid finiteness/modality contract (dimension
/// maps, layer grids). Values must still be finite.
void write_values(const std::string& path, int rows, int cols, const std::vector<double>& values);
std::vector<double> read_values(const std::string& path, int& rows, int& cols);

/// Masked grid: absent pixels are written as a fixed quiet-NaN bit pattern.
void write_masked_grid(const std::string& path, const MaskedGrid& grid);
MaskedGrid read_masked_grid(const std::string& path);

} // namespace sunpatch

#endif
