#include "sunpatch/mra.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace sunpatch {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

// One forward Haar step over the top-left (rows x cols) block, rows then
// columns; averages land in the first half, details in the second.
void forward_step(Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols,
                  Eigen::VectorXd& tmp) {
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols / 2; ++c) {
            const double a = m(r, 2 * c), b = m(r, 2 * c + 1);
            tmp(c) = (a + b) * kInvSqrt2;
            tmp(cols / 2 + c) = (a - b) * kInvSqrt2;
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = tmp(c);
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows / 2; ++r) {
            const double a = m(2 * r, c), b = m(2 * r + 1, c);
            tmp(r) = (a + b) * kInvSqrt2;
            tmp(rows / 2 + r) = (a - b) * kInvSqrt2;
        }
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = tmp(r);
    }
}

void inverse_step(Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols,
                  Eigen::VectorXd& tmp) {
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows / 2; ++r) {
            const double avg = m(r, c), diff = m(rows / 2 + r, c);
            tmp(2 * r) = (avg + diff) * kInvSqrt2;
            tmp(2 * r + 1) = (avg - diff) * kInvSqrt2;
        }
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = tmp(r);
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols / 2; ++c) {
            const double avg = m(r, c), diff = m(r, cols / 2 + c);
            tmp(2 * c) = (avg + diff) * kInvSqrt2;
            tmp(2 * c + 1) = (avg - diff) * kInvSqrt2;
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = tmp(c);
    }
}

Eigen::Index next_multiple(Eigen::Index n, Eigen::Index unit) {
    return ((n + unit - 1) / unit) * unit;
}

} // namespace

LayerStack haar_layers(const ImageGrid& img, int levels) {
    if (levels < 1) throw InvalidParameterError("levels must be >= 1");
    const Eigen::Index unit = Eigen::Index{1} << levels;
    if (unit > img.rows() && unit > img.cols()) {
        throw InvalidParameterError("2^levels exceeds both image dimensions");
    }

    const Eigen::Index rows = img.rows(), cols = img.cols();
    const Eigen::Index ext_rows = next_multiple(rows, unit);
    const Eigen::Index ext_cols = next_multiple(cols, unit);

    Eigen::MatrixXd coeffs(ext_rows, ext_cols);
    for (Eigen::Index r = 0; r < ext_rows; ++r) {
        const int sr = mirror_index(static_cast<int>(r), static_cast<int>(rows));
        for (Eigen::Index c = 0; c < ext_cols; ++c) {
            coeffs(r, c) = img.at(sr, mirror_index(static_cast<int>(c), static_cast<int>(cols)));
        }
    }

    Eigen::VectorXd tmp(std::max(ext_rows, ext_cols));
    for (int l = 0; l < levels; ++l) {
        forward_step(coeffs, ext_rows >> l, ext_cols >> l, tmp);
    }

    auto reconstruct_crop = [&](Eigen::MatrixXd& sel) {
        for (int l = levels; l >= 1; --l) {
            inverse_step(sel, ext_rows >> (l - 1), ext_cols >> (l - 1), tmp);
        }
        std::vector<double> values(static_cast<std::size_t>(rows) * cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                values[static_cast<std::size_t>(r) * cols + c] = sel(r, c);
            }
        }
        return ImageGrid(static_cast<int>(rows), static_cast<int>(cols), std::move(values),
                         img.modality());
    };

    LayerStack stack;
    stack.levels = levels;
    stack.layers.reserve(static_cast<std::size_t>(levels) + 1);

    Eigen::MatrixXd sel(ext_rows, ext_cols);
    for (int j = 0; j < levels; ++j) {
        const Eigen::Index hr = ext_rows >> (j + 1);
        const Eigen::Index hc = ext_cols >> (j + 1);
        sel.setZero();
        sel.block(0, hc, hr, hc) = coeffs.block(0, hc, hr, hc);
        sel.block(hr, 0, hr, hc) = coeffs.block(hr, 0, hr, hc);
        sel.block(hr, hc, hr, hc) = coeffs.block(hr, hc, hr, hc);
        stack.layers.push_back(reconstruct_crop(sel));
    }

    const Eigen::Index ar = ext_rows >> levels;
    const Eigen::Index ac = ext_cols >> levels;
    sel.setZero();
    sel.block(0, 0, ar, ac) = coeffs.block(0, 0, ar, ac);
    stack.layers.push_back(reconstruct_crop(sel));

    return stack;
}

namespace {

std::vector<Eigen::Index> region_columns(const PatchMatrix& patches, const RegionMask& mask,
                                         Region region) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < patches.count(); ++i) {
        const PixelCoord& px = patches.pixel_index[static_cast<std::size_t>(i)];
        if (mask.at(px.row, px.col) == region) cols.push_back(i);
    }
    return cols;
}

struct KnnSummary {
    double mean = 0.0;
    double run_std = 0.0;
};

KnnSummary knn_region_summary(const Eigen::MatrixXi& runs, const std::vector<Eigen::Index>& cols) {
    KnnSummary s;
    const int num_runs = static_cast<int>(runs.rows());
    std::vector<double> run_means(static_cast<std::size_t>(num_runs));
    for (int r = 0; r < num_runs; ++r) {
        double acc = 0.0;
        for (Eigen::Index c : cols) acc += runs(r, c);
        run_means[static_cast<std::size_t>(r)] = acc / static_cast<double>(cols.size());
        s.mean += run_means[static_cast<std::size_t>(r)];
    }
    s.mean /= num_runs;
    double var = 0.0;
    for (double v : run_means) var += (v - s.mean) * (v - s.mean);
    s.run_std = std::sqrt(var / num_runs);
    return s;
}

struct PcaTriple {
    double lo = 0.0, mid = 0.0, hi = 0.0;
};

PcaTriple pca_region_triple(const Eigen::MatrixXd& cols, const std::vector<double>& thresholds) {
    const PcaSpectrum spec = pca_spectrum(cols);
    PcaTriple t;
    if (thresholds.size() == 1) {
        t.lo = t.mid = t.hi = pca_dimension(spec, thresholds[0]);
    } else {
        t.lo = pca_dimension(spec, thresholds.front());
        t.mid = pca_dimension(spec, thresholds[thresholds.size() / 2]);
        t.hi = pca_dimension(spec, thresholds.back());
    }
    return t;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var / static_cast<double>(v.size()));
}

} // namespace

ScaleDimensionTable dimension_by_scale(const std::vector<ImagePair>& pairs,
                                       const std::vector<RegionMask>& masks,
                                       const ScaleDimensionParams& params) {
    if (pairs.empty()) throw InvalidParameterError("dimension_by_scale needs at least one pair");
    if (pairs.size() != masks.size()) {
        throw DimensionMismatchError("pair and mask counts differ");
    }
    if (params.report.pca_thresholds.empty()) {
        throw InvalidParameterError("at least one PCA threshold is required");
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        masks[i].require_matches(pairs[i].rows(), pairs[i].cols(), "image pair");
    }
    std::vector<double> thresholds = params.report.pca_thresholds;
    std::sort(thresholds.begin(), thresholds.end());

    const int levels = params.levels;
    const std::size_t n_images = pairs.size();

    // layer-aligned joint patches for every image
    std::vector<std::vector<PatchMatrix>> layer_patches(n_images);
    for (std::size_t i = 0; i < n_images; ++i) {
        const LayerStack cont = haar_layers(pairs[i].cont, levels);
        const LayerStack mag = haar_layers(pairs[i].mag, levels);
        layer_patches[i].reserve(static_cast<std::size_t>(levels) + 1);
        for (int j = 0; j <= levels; ++j) {
            ImagePair layer_pair(cont.layers[static_cast<std::size_t>(j)],
                                 mag.layers[static_cast<std::size_t>(j)]);
            layer_patches[i].push_back(extract_patches(layer_pair, params.report.patch_side,
                                                       Padding::mirror,
                                                       params.report.standardize));
        }
    }

    ScaleDimensionTable table;

    for (int j = 0; j <= levels; ++j) {
        const bool pooled = (j == levels);

        if (!pooled) {
            // per-image estimation, then averaged across images
            std::vector<Eigen::MatrixXi> runs(n_images);
            for (std::size_t i = 0; i < n_images; ++i) {
                runs[i] = local_dimension_runs(layer_patches[i][static_cast<std::size_t>(j)].columns,
                                               params.report.local);
            }
            for (Region region : params.report.regions) {
                std::vector<double> knn_means, knn_stds, pca_lo, pca_mid, pca_hi;
                for (std::size_t i = 0; i < n_images; ++i) {
                    const PatchMatrix& patches = layer_patches[i][static_cast<std::size_t>(j)];
                    const std::vector<Eigen::Index> cols = region_columns(patches, masks[i], region);
                    if (cols.empty()) {
                        throw EmptyRegionError(std::string("no pixels labeled ") + to_string(region));
                    }
                    const KnnSummary ks = knn_region_summary(runs[i], cols);
                    knn_means.push_back(ks.mean);
                    knn_stds.push_back(ks.run_std);
                    const PcaTriple pt = pca_region_triple(gather(patches.columns, cols), thresholds);
                    pca_lo.push_back(pt.lo);
                    pca_mid.push_back(pt.mid);
                    pca_hi.push_back(pt.hi);
                }
                const double km = mean_of(knn_means);
                const double spread =
                    n_images > 1 ? std_of(knn_means, km) : mean_of(knn_stds);
                table.push_back({j, region, "knn", km, km - spread, km + spread});
                table.push_back({j, region, "pca", mean_of(pca_mid), mean_of(pca_lo), mean_of(pca_hi)});
            }
        } else {
            // deepest layer: pool patches across images before estimating
            Eigen::Index total = 0;
            for (std::size_t i = 0; i < n_images; ++i) {
                total += layer_patches[i][static_cast<std::size_t>(j)].count();
            }
            Eigen::MatrixXd pooled_cols(layer_patches[0][static_cast<std::size_t>(j)].dim(), total);
            std::vector<Region> column_region(static_cast<std::size_t>(total));
            Eigen::Index at = 0;
            for (std::size_t i = 0; i < n_images; ++i) {
                const PatchMatrix& patches = layer_patches[i][static_cast<std::size_t>(j)];
                pooled_cols.middleCols(at, patches.count()) = patches.columns;
                for (Eigen::Index c = 0; c < patches.count(); ++c) {
                    const PixelCoord& px = patches.pixel_index[static_cast<std::size_t>(c)];
                    column_region[static_cast<std::size_t>(at + c)] = masks[i].at(px.row, px.col);
                }
                at += patches.count();
            }

            const Eigen::MatrixXi runs = local_dimension_runs(pooled_cols, params.report.local);
            for (Region region : params.report.regions) {
                std::vector<Eigen::Index> cols;
                for (Eigen::Index c = 0; c < total; ++c) {
                    if (column_region[static_cast<std::size_t>(c)] == region) cols.push_back(c);
                }
                if (cols.empty()) {
                    throw EmptyRegionError(std::string("no pixels labeled ") + to_string(region));
                }
                const KnnSummary ks = knn_region_summary(runs, cols);
                table.push_back({j, region, "knn", ks.mean, ks.mean - ks.run_std,
                                 ks.mean + ks.run_std});
                const PcaTriple pt = pca_region_triple(gather(pooled_cols, cols), thresholds);
                table.push_back({j, region, "pca", pt.mid, pt.lo, pt.hi});
            }
        }
    }
    return table;
}

} // namespace sunpatch
