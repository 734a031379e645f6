#ifndef SUNPATCH_MRA_HPP
#define SUNPATCH_MRA_HPP

#include <string>
#include <vector>

#include "sunpatch/dimension.hpp"
#include "sunpatch/image.hpp"

namespace sunpatch {

/// Full-resolution wavelet layers. layers[j] for j < levels reconstructs only
/// the level-(j+1) Haar detail subbands; layers[levels] reconstructs the final
/// approximation. The layers sum pointwise to the input image.
struct LayerStack {
    std::vector<ImageGrid> layers;
    int levels = 0;
};

/// Orthonormal 2-D Haar decomposition into `levels` detail layers plus the
/// coarse remainder. Non-dyadic sizes are mirror-extended to the next multiple
/// of 2^levels and the layers cropped back, which preserves the sum identity.
LayerStack haar_layers(const ImageGrid& img, int levels);

struct ScaleDimensionParams {
    RegionReportParams report; // patch side, standardize, thresholds, knn params
    int levels = 2;
};

struct ScaleDimensionRow {
    int scale = 0; // layer index
    Region region = Region::background;
    std::string method; // "pca" or "knn"
    double estimate = 0.0;
    double spread_lo = 0.0;
    double spread_hi = 0.0;
};

using ScaleDimensionTable = std::vector<ScaleDimensionRow>;

/// Intrinsic dimension of the joint patches at every layer, per region.
/// Layers below the deepest are estimated per image and averaged; the deepest
/// layer pools patches across images before estimating. knn spreads are one
/// standard deviation; pca spreads are the estimates at the lowest and highest
/// configured thresholds.
ScaleDimensionTable dimension_by_scale(const std::vector<ImagePair>& pairs,
                                       const std::vector<RegionMask>& masks,
                                       const ScaleDimensionParams& params);

} // namespace sunpatch

#endif
