#ifndef SUNPATCH_PATCHES_HPP
#define SUNPATCH_PATCHES_HPP

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sunpatch/image.hpp"

namespace sunpatch {

enum class Padding : std::uint8_t {
    mirror, ///< reflect at borders; one column per pixel
    valid   ///< only fully interior centers
};

enum class PatchKind : std::uint8_t { single_modality, joint };

struct PixelCoord {
    int row = 0;
    int col = 0;
    bool operator==(const PixelCoord&) const = default;
};

/// D x n matrix of vectorized patches. Column i is the patch centered at
/// pixel_index[i]; joint matrices stack the continuum block on top of the
/// magnetogram block, row-major within each patch.
struct PatchMatrix {
    Eigen::MatrixXd columns;             // D x n
    std::vector<PixelCoord> pixel_index; // n entries, unique, within bounds
    int patch_side = 1;
    PatchKind kind = PatchKind::joint;
    int source_rows = 0; // grid the patches were taken from
    int source_cols = 0;

    Eigen::Index dim() const { return columns.rows(); }
    Eigen::Index count() const { return columns.cols(); }
};

/// Vectorize joint cont/mag patches around every center admitted by `padding`.
/// With standardize, each modality is z-scored by its global per-image
/// mean/stddev before stacking (makes the joint metric comparable across
/// modalities; continuum and magnetogram units are incommensurate).
PatchMatrix extract_patches(const ImagePair& pair, int patch_side, Padding padding,
                            bool standardize);

/// Keep exactly the columns whose center pixel carries `region`.
PatchMatrix restrict_to_region(const PatchMatrix& patches, const RegionMask& mask, Region region);

/// Split a joint matrix into its continuum and magnetogram blocks.
std::pair<PatchMatrix, PatchMatrix> split_joint(const PatchMatrix& joint);

/// Mirror (symmetric, edge-inclusive) index reflection onto [0, n).
/// Bounces as often as needed, so arbitrarily long extensions are defined.
int mirror_index(int i, int n);

} // namespace sunpatch

#endif
