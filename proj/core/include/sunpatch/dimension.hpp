#ifndef SUNPATCH_DIMENSION_HPP
#define SUNPATCH_DIMENSION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sunpatch/image.hpp"
#include "sunpatch/patches.hpp"

namespace sunpatch {

/// Parameters of the k-NN graph length statistic and its randomized use.
struct GraphLengthParams {
    int k = 5;
    double gamma = 1.0; // power weight; the growth-rate fit needs gamma >= 1
    int num_runs = 20;  // repetitions for local estimates (fresh subsample seeds)
    std::uint64_t rng_seed = 0;
};

/// Result of fitting L(n) = c * n^alpha with alpha = (m - gamma) / m over an
/// integer grid of candidate dimensions m.
struct DimensionFit {
    int m_hat = 0;
    double alpha_hat = 0.0;
    double c_hat = 0.0;
    double residual = 0.0;
    /// Set when m_hat sits at or below the validity edge of the growth model
    /// (m_hat == 1 or alpha_hat == 0); such estimates are reported, not hidden.
    bool low_dimension_warning = false;
};

/// Per-pixel local dimension estimates: mean and standard deviation across
/// the randomized runs.
struct DimensionMap {
    int rows = 0;
    int cols = 0;
    std::vector<double> mean_dim; // row-major
    std::vector<double> std_dim;  // population std across runs
};

struct PcaSpectrum {
    Eigen::VectorXd eigenvalues; // nonincreasing, clipped at zero
    Eigen::MatrixXd components;  // orthonormal columns, matching order
};

/// Total edge length of the k-NN graph: sum over points of the gamma-powered
/// Euclidean distances to their k nearest neighbors. Distance ties are broken
/// by column index, so the value is deterministic.
double knn_total_edge_length(const Eigen::MatrixXd& points, int k, double gamma);

/// n x k matrix of each column's nearest-neighbor column indices, ordered by
/// ascending (distance, index). Deterministic; `threads` only parallelizes.
Eigen::MatrixXi nearest_neighbors(const Eigen::MatrixXd& points, int k, int threads = 1);

/// Default subsample schedule {n/2, 5n/8, 3n/4, 7n/8, n}, deduplicated.
std::vector<int> default_subsample_sizes(int count);

/// Global intrinsic dimension from the growth rate of the mean graph length
/// over bootstrapped subsamples of the given sizes.
DimensionFit estimate_global_dimension(const Eigen::MatrixXd& points,
                                       const GraphLengthParams& params,
                                       const std::vector<int>& subsample_sizes,
                                       int bootstraps_per_size);

struct LocalDimensionParams {
    GraphLengthParams graph;
    int local_neighborhood = 100; // points per local estimate (incl. the center)
    int smoothing_neighbors = 6;  // majority-vote neighborhood size
    std::vector<double> subsample_fractions = {0.5, 0.625, 0.75, 0.875, 1.0};
    int bootstraps_per_size = 5;
    int threads = 0; // 0 = hardware concurrency
};

/// Smoothed local estimates for every column, one row per run. Each entry is
/// the majority vote over the column's `smoothing_neighbors` nearest columns
/// of the raw per-run estimates (ties -> smaller dimension). Per-column seeds
/// derive from (rng_seed, run, column), so results are independent of the
/// parallel execution order.
Eigen::MatrixXi local_dimension_runs(const Eigen::MatrixXd& points,
                                     const LocalDimensionParams& params);

/// Per-pixel dimension map. The patch matrix must cover every pixel of its
/// source grid (mirror padding); per-pixel outputs are defined everywhere.
DimensionMap estimate_local_dimension(const PatchMatrix& patches,
                                      const LocalDimensionParams& params);

/// Majority vote of `estimates` over explicit neighbor lists (n x s matrix of
/// column indices). Ties pick the smaller value.
std::vector<int> majority_vote_smooth(const std::vector<int>& estimates,
                                      const Eigen::MatrixXi& neighbors);

/// Eigendecomposition of the sample covariance (n-1 denominator) of the
/// columns, centered by their mean.
PcaSpectrum pca_spectrum(const Eigen::MatrixXd& points);

/// Smallest r whose leading eigenvalues explain at least `variance_threshold`
/// of the total variance.
int pca_dimension(const PcaSpectrum& spectrum, double variance_threshold);

struct RegionReportParams {
    LocalDimensionParams local;
    std::vector<double> pca_thresholds = {0.95, 0.97, 0.99};
    int patch_side = 3;
    bool standardize = true;
    std::vector<Region> regions = {Region::background, Region::penumbra, Region::umbra};
};

struct RegionDimensionRow {
    Region region = Region::background;
    std::string method;      // "pca" or "knn"
    double threshold = 0.0;  // pca rows only
    double estimate = 0.0;
    double spread = 0.0;     // knn rows: std across runs of the region mean
};

using RegionDimensionReport = std::vector<RegionDimensionRow>;

/// Both estimators per region. PCA runs on the region-restricted patches at
/// each threshold; the k-NN entry is the in-region mean of the smoothed local
/// estimates, averaged over runs.
RegionDimensionReport region_dimension_report(const ImagePair& pair, const RegionMask& mask,
                                              const RegionReportParams& params);

} // namespace sunpatch

#endif
