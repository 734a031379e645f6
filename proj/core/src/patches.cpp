#include "sunpatch/patches.hpp"

#include <string>

namespace sunpatch {

int mirror_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

namespace {

// Scale/shift per modality; identity unless standardizing.
struct Affine {
    double shift = 0.0;
    double scale = 1.0;
    double apply(double v) const { return (v - shift) * scale; }
};

Affine standardizer(const ImageGrid& img, bool standardize) {
    if (!standardize) return {};
    const double sd = img.stddev();
    if (sd <= 0.0) {
        throw ZeroVarianceError(std::string("cannot standardize zero-variance ") +
                                to_string(img.modality()) + " image");
    }
    return {img.mean(), 1.0 / sd};
}

void fill_block(Eigen::MatrixXd& columns, Eigen::Index col, Eigen::Index row_offset,
                const ImageGrid& img, const Affine& aff, int cr, int cc, int half,
                Padding padding) {
    Eigen::Index r = row_offset;
    for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
            int pr = cr + dr;
            int pc = cc + dc;
            if (padding == Padding::mirror) {
                pr = mirror_index(pr, img.rows());
                pc = mirror_index(pc, img.cols());
            }
            columns(r++, col) = aff.apply(img.at(pr, pc));
        }
    }
}

} // namespace

PatchMatrix extract_patches(const ImagePair& pair, int patch_side, Padding padding,
                            bool standardize) {
    if (patch_side < 1 || patch_side % 2 == 0) {
        throw InvalidParameterError("patch_side must be an odd positive integer, got " +
                                    std::to_string(patch_side));
    }
    const int rows = pair.rows();
    const int cols = pair.cols();
    if (patch_side > rows || patch_side > cols) {
        throw InvalidParameterError("patch_side " + std::to_string(patch_side) +
                                    " exceeds image dimensions " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
    }

    const Affine cont_aff = standardizer(pair.cont, standardize);
    const Affine mag_aff = standardizer(pair.mag, standardize);

    const int half = patch_side / 2;
    const int block = patch_side * patch_side;

    int r0 = 0, r1 = rows, c0 = 0, c1 = cols;
    if (padding == Padding::valid) {
        r0 = half;
        r1 = rows - half;
        c0 = half;
        c1 = cols - half;
    }

    PatchMatrix out;
    out.patch_side = patch_side;
    out.kind = PatchKind::joint;
    out.source_rows = rows;
    out.source_cols = cols;

    const Eigen::Index n = static_cast<Eigen::Index>(r1 - r0) * (c1 - c0);
    out.columns.resize(2 * block, n);
    out.pixel_index.reserve(static_cast<std::size_t>(n));

    Eigen::Index col = 0;
    for (int cr = r0; cr < r1; ++cr) {
        for (int cc = c0; cc < c1; ++cc) {
            fill_block(out.columns, col, 0, pair.cont, cont_aff, cr, cc, half, padding);
            fill_block(out.columns, col, block, pair.mag, mag_aff, cr, cc, half, padding);
            out.pixel_index.push_back({cr, cc});
            ++col;
        }
    }
    return out;
}

PatchMatrix restrict_to_region(const PatchMatrix& patches, const RegionMask& mask, Region region) {
    mask.require_matches(patches.source_rows, patches.source_cols, "patch source image");

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < patches.count(); ++i) {
        const PixelCoord& px = patches.pixel_index[static_cast<std::size_t>(i)];
        if (mask.at(px.row, px.col) == region) keep.push_back(i);
    }
    if (keep.empty()) {
        throw EmptyRegionError(std::string("no patch centers labeled ") + to_string(region));
    }

    PatchMatrix out;
    out.patch_side = patches.patch_side;
    out.kind = patches.kind;
    out.source_rows = patches.source_rows;
    out.source_cols = patches.source_cols;
    out.columns.resize(patches.dim(), static_cast<Eigen::Index>(keep.size()));
    out.pixel_index.reserve(keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.columns.col(static_cast<Eigen::Index>(j)) = patches.columns.col(keep[j]);
        out.pixel_index.push_back(patches.pixel_index[static_cast<std::size_t>(keep[j])]);
    }
    return out;
}

std::pair<PatchMatrix, PatchMatrix> split_joint(const PatchMatrix& joint) {
    if (joint.kind != PatchKind::joint) {
        throw InvalidParameterError("split_joint requires a joint patch matrix");
    }
    const Eigen::Index block = joint.dim() / 2;

    PatchMatrix cont, mag;
    for (PatchMatrix* m : {&cont, &mag}) {
        m->patch_side = joint.patch_side;
        m->kind = PatchKind::single_modality;
        m->source_rows = joint.source_rows;
        m->source_cols = joint.source_cols;
        m->pixel_index = joint.pixel_index;
    }
    cont.columns = joint.columns.topRows(block);
    mag.columns = joint.columns.bottomRows(block);
    return {std::move(cont), std::move(mag)};
}

} // namespace sunpatch
