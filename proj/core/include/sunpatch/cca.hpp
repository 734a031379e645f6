#ifndef SUNPATCH_CCA_HPP
#define SUNPATCH_CCA_HPP

#include <vector>

#include <Eigen/Core>

#include "sunpatch/image.hpp"
#include "sunpatch/patches.hpp"

namespace sunpatch {

/// Canonical correlation decomposition of two paired patch blocks.
struct CcaResult {
    Eigen::VectorXd correlations;  // nonincreasing, in [0, 1]
    Eigen::MatrixXd a_vectors;     // x-side directions, one column per pair
    Eigen::MatrixXd b_vectors;     // y-side directions
    MaskedGrid u_image;            // first canonical variable per center pixel
    MaskedGrid v_image;
};

/// Ridge value derived from the joint covariance scale: 1e-8 * trace / dim.
double default_cca_ridge(const Eigen::MatrixXd& x_block, const Eigen::MatrixXd& y_block);

/// CCA between paired blocks (columns matched by pixel). Covariance blocks are
/// regularized by `ridge` (0 = none; throws on singular blocks). Directions
/// are scaled to unit sample variance of the canonical variates. Sign
/// convention: the largest-magnitude entry of each a_i is positive and b_i is
/// flipped so that corr(u_i, v_i) >= 0.
CcaResult cca(const PatchMatrix& x_block, const PatchMatrix& y_block, double ridge);

struct RegionCcaRow {
    Region region = Region::background;
    int patch_side = 1;
    Eigen::VectorXd correlations;
    MaskedGrid u_image; // populated at in-region pixels only
    MaskedGrid v_image;
};

using RegionCcaReport = std::vector<RegionCcaRow>;

struct RegionCcaParams {
    std::vector<int> patch_sides = {1, 3, 5};
    double ridge = -1.0; // negative = default_cca_ridge
    std::vector<Region> regions = {Region::background, Region::penumbra, Region::umbra};
};

/// CCA separately per region and patch size, on raw (unstandardized) patches;
/// canonical correlations are affine-invariant, so standardization would only
/// rescale the canonical images.
RegionCcaReport region_cca_report(const ImagePair& pair, const RegionMask& mask,
                                  const RegionCcaParams& params);

} // namespace sunpatch

#endif
