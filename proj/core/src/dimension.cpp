#include "sunpatch/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <Eigen/Dense>

#include "sunpatch/rng.hpp"

namespace sunpatch {

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(begin, end) over [0, total) split into contiguous chunks, one per
/// worker. Workers write disjoint output slots, so the result cannot depend
/// on scheduling.
template <typename Fn>
void parallel_chunks(Eigen::Index total, int threads, Fn&& fn) {
    threads = std::min<Eigen::Index>(std::max(threads, 1), std::max<Eigen::Index>(total, 1));
    if (threads <= 1) {
        fn(Eigen::Index{0}, total);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    const Eigen::Index chunk = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const Eigen::Index begin = t * chunk;
        const Eigen::Index end = std::min(total, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, t, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

double powered_distance(double d2, double gamma) {
    if (d2 < 0.0) d2 = 0.0;
    if (gamma == 1.0) return std::sqrt(d2);
    if (gamma == 2.0) return d2;
    return std::pow(d2, 0.5 * gamma);
}

void validate_graph_params(const GraphLengthParams& p) {
    if (p.k < 1) throw InvalidParameterError("neighbor count k must be >= 1");
    if (p.gamma < 1.0) {
        throw InvalidParameterError("growth-model fits need gamma >= 1");
    }
    if (p.num_runs < 1) throw InvalidParameterError("num_runs must be >= 1");
}

/// Least-squares fit of Lbar(n) = c * n^alpha over the integer dimension grid
/// m in [1, ambient_dim], alpha(m) = (m - gamma) / m. Candidates with
/// alpha < 0 are not admissible. For fixed alpha the optimal c is closed form.
DimensionFit fit_dimension(const std::vector<int>& sizes, const std::vector<double>& length_means,
                           double gamma, int ambient_dim) {
    double lo = length_means[0], hi = length_means[0];
    for (double v : length_means) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
        throw DegenerateFitError("graph length does not vary across subsample sizes; "
                                 "points are degenerate (duplicated or constant)");
    }

    DimensionFit best;
    double best_residual = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= ambient_dim; ++m) {
        const double alpha = (m - gamma) / m;
        if (alpha < 0.0) continue;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            const double na = std::pow(static_cast<double>(sizes[i]), alpha);
            num += length_means[i] * na;
            den += na * na;
        }
        const double c = num / den;
        double residual = 0.0;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            const double na = std::pow(static_cast<double>(sizes[i]), alpha);
            const double r = length_means[i] - c * na;
            residual += r * r;
        }
        if (residual < best_residual) {
            best_residual = residual;
            best.m_hat = m;
            best.alpha_hat = alpha;
            best.c_hat = c;
        }
    }
    best.residual = std::sqrt(best_residual);
    best.low_dimension_warning = (best.m_hat <= 1) || (best.alpha_hat <= 0.0);
    return best;
}

void validate_subsample_sizes(const std::vector<int>& sizes, Eigen::Index count, int k) {
    if (sizes.size() < 3) {
        throw InvalidParameterError("need at least 3 subsample sizes, got " +
                                    std::to_string(sizes.size()));
    }
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        if (sizes[i] >= sizes[i + 1]) {
            throw InvalidParameterError("subsample sizes must be strictly increasing");
        }
    }
    if (sizes.front() < k + 1) {
        throw InvalidParameterError("smallest subsample size must exceed the neighbor count k");
    }
    if (sizes.back() > count) {
        throw InvalidParameterError("largest subsample size " + std::to_string(sizes.back()) +
                                    " exceeds the point count " + std::to_string(count));
    }
}

} // namespace

double knn_total_edge_length(const Eigen::MatrixXd& points, int k, double gamma) {
    const Eigen::Index n = points.cols();
    if (k < 1) throw InvalidParameterError("neighbor count k must be >= 1");
    if (gamma <= 0.0) throw InvalidParameterError("gamma must be positive");
    if (n < k + 1) {
        throw SmallSampleError("k-NN graph needs at least k+1 points, got " + std::to_string(n));
    }

    const Eigen::VectorXd sq_norms = points.colwise().squaredNorm();
    const Eigen::Index block = std::min<Eigen::Index>(n, 256);

    double total = 0.0;
    std::vector<std::pair<double, Eigen::Index>> cand(static_cast<std::size_t>(n));
    Eigen::MatrixXd cross;
    for (Eigen::Index b0 = 0; b0 < n; b0 += block) {
        const Eigen::Index bs = std::min(block, n - b0);
        cross.noalias() = points.middleCols(b0, bs).transpose() * points;
        for (Eigen::Index bi = 0; bi < bs; ++bi) {
            const Eigen::Index i = b0 + bi;
            std::size_t m = 0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                const double d2 = sq_norms(i) + sq_norms(j) - 2.0 * cross(bi, j);
                cand[m++] = {d2, j};
            }
            std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.begin() + m);
            std::sort(cand.begin(), cand.begin() + k);
            for (int t = 0; t < k; ++t) total += powered_distance(cand[t].first, gamma);
        }
    }
    return total;
}

Eigen::MatrixXi nearest_neighbors(const Eigen::MatrixXd& points, int k, int threads) {
    const Eigen::Index n = points.cols();
    if (k < 1 || k >= n) {
        throw InvalidParameterError("nearest_neighbors needs 1 <= k < count");
    }
    const Eigen::VectorXd sq_norms = points.colwise().squaredNorm();
    Eigen::MatrixXi out(n, k);

    parallel_chunks(n, resolve_threads(threads), [&](Eigen::Index begin, Eigen::Index end) {
        std::vector<std::pair<double, Eigen::Index>> cand(static_cast<std::size_t>(n));
        Eigen::MatrixXd cross;
        const Eigen::Index block = 128;
        for (Eigen::Index b0 = begin; b0 < end; b0 += block) {
            const Eigen::Index bs = std::min(block, end - b0);
            cross.noalias() = points.middleCols(b0, bs).transpose() * points;
            for (Eigen::Index bi = 0; bi < bs; ++bi) {
                const Eigen::Index i = b0 + bi;
                std::size_t m = 0;
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const double d2 = sq_norms(i) + sq_norms(j) - 2.0 * cross(bi, j);
                    cand[m++] = {d2, j};
                }
                std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.begin() + m);
                std::sort(cand.begin(), cand.begin() + k);
                for (int t = 0; t < k; ++t) out(i, t) = static_cast<int>(cand[t].second);
            }
        }
    });
    return out;
}

std::vector<int> default_subsample_sizes(int count) {
    std::vector<int> sizes;
    for (double f : {0.5, 0.625, 0.75, 0.875, 1.0}) {
        const int s = std::max(2, static_cast<int>(std::lround(f * count)));
        if (sizes.empty() || s > sizes.back()) sizes.push_back(s);
    }
    return sizes;
}

DimensionFit estimate_global_dimension(const Eigen::MatrixXd& points,
                                       const GraphLengthParams& params,
                                       const std::vector<int>& subsample_sizes,
                                       int bootstraps_per_size) {
    validate_graph_params(params);
    validate_subsample_sizes(subsample_sizes, points.cols(), params.k);
    if (bootstraps_per_size < 1) {
        throw InvalidParameterError("bootstraps_per_size must be >= 1");
    }

    const Eigen::Index n = points.cols();
    std::vector<double> length_means(subsample_sizes.size(), 0.0);

    Eigen::MatrixXd sub;
    for (std::size_t si = 0; si < subsample_sizes.size(); ++si) {
        const int s = subsample_sizes[si];
        double acc = 0.0;
        bool full_cached = false;
        double full_value = 0.0;
        for (int b = 0; b < bootstraps_per_size; ++b) {
            if (s == n) {
                // the full set: every draw is the same point set
                if (!full_cached) {
                    full_value = knn_total_edge_length(points, params.k, params.gamma);
                    full_cached = true;
                }
                acc += full_value;
                continue;
            }
            Rng rng(derive_seed(params.rng_seed, si, static_cast<std::uint64_t>(b)));
            std::vector<std::size_t> idx = rng.sample_without_replacement(
                static_cast<std::size_t>(n), static_cast<std::size_t>(s));
            std::sort(idx.begin(), idx.end());
            sub.resize(points.rows(), s);
            for (int j = 0; j < s; ++j) {
                sub.col(j) = points.col(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
            }
            acc += knn_total_edge_length(sub, params.k, params.gamma);
        }
        length_means[si] = acc / bootstraps_per_size;
    }

    return fit_dimension(subsample_sizes, length_means, params.gamma,
                         static_cast<int>(points.rows()));
}

namespace {

std::vector<int> local_subsample_sizes(const LocalDimensionParams& p) {
    std::vector<int> sizes;
    for (double f : p.subsample_fractions) {
        if (f <= 0.0 || f > 1.0) {
            throw InvalidParameterError("subsample fractions must lie in (0, 1]");
        }
        const int s = std::max(2, static_cast<int>(std::lround(f * p.local_neighborhood)));
        if (sizes.empty() || s > sizes.back()) sizes.push_back(s);
    }
    validate_subsample_sizes(sizes, p.local_neighborhood, p.graph.k);
    return sizes;
}

} // namespace

Eigen::MatrixXi local_dimension_runs(const Eigen::MatrixXd& points,
                                     const LocalDimensionParams& params) {
    validate_graph_params(params.graph);
    const Eigen::Index n = points.cols();
    const int local_n = params.local_neighborhood;
    if (local_n < 2 || local_n > n) {
        throw InvalidParameterError("local_neighborhood must lie in [2, count]; count = " +
                                    std::to_string(n));
    }
    if (params.smoothing_neighbors < 1 || params.smoothing_neighbors >= n) {
        throw InvalidParameterError("smoothing_neighbors must lie in [1, count)");
    }
    const std::vector<int> sizes = local_subsample_sizes(params);
    if (params.bootstraps_per_size < 1) {
        throw InvalidParameterError("bootstraps_per_size must be >= 1");
    }

    const int ambient = static_cast<int>(points.rows());
    const int num_runs = params.graph.num_runs;
    const int k = params.graph.k;
    const double gamma = params.graph.gamma;
    const int threads = resolve_threads(params.threads);

    const int neighbor_count = std::max(local_n - 1, params.smoothing_neighbors);
    const Eigen::MatrixXi nn = nearest_neighbors(points, neighbor_count, threads);

    Eigen::MatrixXi raw(num_runs, n);

    parallel_chunks(n, threads, [&](Eigen::Index begin, Eigen::Index end) {
        const std::size_t L = static_cast<std::size_t>(local_n);
        std::vector<Eigen::Index> local_idx(L);
        Eigen::MatrixXd xloc(points.rows(), local_n);
        Eigen::MatrixXd weights(local_n, local_n); // gamma-powered distances
        std::vector<std::uint16_t> sorted_lists(L * (L - 1));
        std::vector<std::pair<double, std::uint16_t>> order(L - 1);
        std::vector<std::uint16_t> draw_pool(L);
        std::vector<std::uint8_t> included(L);
        std::vector<double> length_means(sizes.size());

        for (Eigen::Index i = begin; i < end; ++i) {
            // local point set: the column itself plus its nearest neighbors,
            // kept in ascending column order so tie-breaking matches the
            // brute-force path
            local_idx[0] = i;
            for (int t = 0; t < local_n - 1; ++t) {
                local_idx[static_cast<std::size_t>(t) + 1] = nn(i, t);
            }
            std::sort(local_idx.begin(), local_idx.end());
            for (int a = 0; a < local_n; ++a) xloc.col(a) = points.col(local_idx[static_cast<std::size_t>(a)]);

            for (int a = 0; a < local_n; ++a) {
                for (int b = a; b < local_n; ++b) {
                    const double d2 = (xloc.col(a) - xloc.col(b)).squaredNorm();
                    const double w = powered_distance(d2, gamma);
                    weights(a, b) = w;
                    weights(b, a) = w;
                }
            }
            for (int a = 0; a < local_n; ++a) {
                std::size_t m = 0;
                for (int b = 0; b < local_n; ++b) {
                    if (b == a) continue;
                    order[m++] = {weights(a, b), static_cast<std::uint16_t>(b)};
                }
                std::sort(order.begin(), order.end());
                std::uint16_t* dst = sorted_lists.data() + static_cast<std::size_t>(a) * (L - 1);
                for (std::size_t t = 0; t < L - 1; ++t) dst[t] = order[t].second;
            }

            for (int run = 0; run < num_runs; ++run) {
                Rng rng(derive_seed(params.graph.rng_seed, static_cast<std::uint64_t>(run),
                                    static_cast<std::uint64_t>(i)));
                for (std::size_t si = 0; si < sizes.size(); ++si) {
                    const int s = sizes[si];
                    double acc = 0.0;
                    for (int b = 0; b < params.bootstraps_per_size; ++b) {
                        std::fill(included.begin(), included.end(), std::uint8_t{0});
                        if (s == local_n) {
                            std::fill(included.begin(), included.end(), std::uint8_t{1});
                        } else {
                            for (std::size_t t = 0; t < L; ++t) draw_pool[t] = static_cast<std::uint16_t>(t);
                            for (int t = 0; t < s; ++t) {
                                const std::size_t j =
                                    t + static_cast<std::size_t>(rng.next_below(L - t));
                                std::swap(draw_pool[static_cast<std::size_t>(t)], draw_pool[j]);
                                included[draw_pool[static_cast<std::size_t>(t)]] = 1;
                            }
                        }
                        double total = 0.0;
                        for (int a = 0; a < local_n; ++a) {
                            if (!included[static_cast<std::size_t>(a)]) continue;
                            const std::uint16_t* lst =
                                sorted_lists.data() + static_cast<std::size_t>(a) * (L - 1);
                            int found = 0;
                            for (std::size_t t = 0; t < L - 1 && found < k; ++t) {
                                const std::uint16_t e = lst[t];
                                if (!included[e]) continue;
                                total += weights(a, e);
                                ++found;
                            }
                        }
                        acc += total;
                    }
                    length_means[si] = acc / params.bootstraps_per_size;
                }
                raw(run, i) = fit_dimension(sizes, length_means, gamma, ambient).m_hat;
            }
        }
    });

    // simultaneous majority-vote smoothing, per run
    Eigen::MatrixXi smoothed(num_runs, n);
    const int s_n = params.smoothing_neighbors;
    std::vector<int> counts(static_cast<std::size_t>(ambient) + 1);
    for (int run = 0; run < num_runs; ++run) {
        for (Eigen::Index i = 0; i < n; ++i) {
            std::fill(counts.begin(), counts.end(), 0);
            for (int t = 0; t < s_n; ++t) ++counts[static_cast<std::size_t>(raw(run, nn(i, t)))];
            int best = 0, best_count = -1;
            for (std::size_t v = 1; v < counts.size(); ++v) {
                if (counts[v] > best_count) {
                    best_count = counts[v];
                    best = static_cast<int>(v);
                }
            }
            smoothed(run, i) = best;
        }
    }
    return smoothed;
}

std::vector<int> majority_vote_smooth(const std::vector<int>& estimates,
                                      const Eigen::MatrixXi& neighbors) {
    if (static_cast<Eigen::Index>(estimates.size()) != neighbors.rows()) {
        throw DimensionMismatchError("estimate count does not match neighbor list rows");
    }
    int max_v = 0;
    for (int v : estimates) {
        if (v < 0) throw InvalidParameterError("estimates must be nonnegative");
        max_v = std::max(max_v, v);
    }
    std::vector<int> counts(static_cast<std::size_t>(max_v) + 1);
    std::vector<int> out(estimates.size());
    for (Eigen::Index i = 0; i < neighbors.rows(); ++i) {
        std::fill(counts.begin(), counts.end(), 0);
        for (Eigen::Index t = 0; t < neighbors.cols(); ++t) {
            ++counts[static_cast<std::size_t>(estimates[static_cast<std::size_t>(neighbors(i, t))])];
        }
        int best = 0, best_count = -1;
        for (std::size_t v = 0; v < counts.size(); ++v) {
            if (counts[v] > best_count) {
                best_count = counts[v];
                best = static_cast<int>(v);
            }
        }
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

DimensionMap estimate_local_dimension(const PatchMatrix& patches,
                                      const LocalDimensionParams& params) {
    const Eigen::Index n = patches.count();
    const std::size_t full = static_cast<std::size_t>(patches.source_rows) * patches.source_cols;
    if (static_cast<std::size_t>(n) != full) {
        throw InvalidParameterError("per-pixel dimension maps need one patch per pixel; "
                                    "extract with mirror padding");
    }

    const Eigen::MatrixXi runs = local_dimension_runs(patches.columns, params);
    const int num_runs = static_cast<int>(runs.rows());

    DimensionMap map;
    map.rows = patches.source_rows;
    map.cols = patches.source_cols;
    map.mean_dim.assign(full, 0.0);
    map.std_dim.assign(full, 0.0);

    for (Eigen::Index i = 0; i < n; ++i) {
        const PixelCoord& px = patches.pixel_index[static_cast<std::size_t>(i)];
        const std::size_t slot = static_cast<std::size_t>(px.row) * map.cols + px.col;
        double mean = 0.0;
        for (int r = 0; r < num_runs; ++r) mean += runs(r, i);
        mean /= num_runs;
        double var = 0.0;
        for (int r = 0; r < num_runs; ++r) {
            const double d = runs(r, i) - mean;
            var += d * d;
        }
        map.mean_dim[slot] = mean;
        map.std_dim[slot] = std::sqrt(var / num_runs);
    }
    return map;
}

PcaSpectrum pca_spectrum(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.cols();
    if (n < 2) throw SmallSampleError("covariance needs at least 2 columns");

    const Eigen::VectorXd mean = points.rowwise().mean();
    const Eigen::MatrixXd centered = points.colwise() - mean;
    const Eigen::MatrixXd cov = (centered * centered.transpose()) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw DegenerateFitError("covariance eigendecomposition failed");
    }

    const Eigen::Index d = cov.rows();
    PcaSpectrum spec;
    spec.eigenvalues.resize(d);
    spec.components.resize(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        spec.eigenvalues(j) = std::max(0.0, solver.eigenvalues()(d - 1 - j));
        spec.components.col(j) = solver.eigenvectors().col(d - 1 - j);
    }
    return spec;
}

int pca_dimension(const PcaSpectrum& spectrum, double variance_threshold) {
    if (variance_threshold <= 0.0 || variance_threshold > 1.0) {
        throw InvalidParameterError("variance threshold must lie in (0, 1]");
    }
    const double total = spectrum.eigenvalues.sum();
    if (spectrum.eigenvalues.size() == 0 || total <= 0.0) {
        throw ZeroVarianceError("spectrum carries no variance");
    }
    double cum = 0.0;
    for (Eigen::Index j = 0; j < spectrum.eigenvalues.size(); ++j) {
        cum += spectrum.eigenvalues(j);
        if (cum / total >= variance_threshold) return static_cast<int>(j) + 1;
    }
    return static_cast<int>(spectrum.eigenvalues.size());
}

RegionDimensionReport region_dimension_report(const ImagePair& pair, const RegionMask& mask,
                                              const RegionReportParams& params) {
    mask.require_matches(pair.rows(), pair.cols(), "image pair");

    const PatchMatrix patches =
        extract_patches(pair, params.patch_side, Padding::mirror, params.standardize);

    // one smoothed-run matrix serves every region (neighborhoods are global,
    // as in the per-pixel maps; regions only gather)
    const Eigen::MatrixXi runs = local_dimension_runs(patches.columns, params.local);
    const int num_runs = static_cast<int>(runs.rows());

    RegionDimensionReport report;
    for (Region region : params.regions) {
        std::vector<Eigen::Index> cols;
        for (Eigen::Index i = 0; i < patches.count(); ++i) {
            const PixelCoord& px = patches.pixel_index[static_cast<std::size_t>(i)];
            if (mask.at(px.row, px.col) == region) cols.push_back(i);
        }
        if (cols.empty()) {
            throw EmptyRegionError(std::string("no pixels labeled ") + to_string(region));
        }

        // PCA at each threshold
        const PatchMatrix restricted = restrict_to_region(patches, mask, region);
        const PcaSpectrum spec = pca_spectrum(restricted.columns);
        for (double thr : params.pca_thresholds) {
            RegionDimensionRow row;
            row.region = region;
            row.method = "pca";
            row.threshold = thr;
            row.estimate = pca_dimension(spec, thr);
            report.push_back(row);
        }

        // k-NN: per-run region means, then mean/std across runs
        double mean = 0.0;
        std::vector<double> run_means(static_cast<std::size_t>(num_runs));
        for (int r = 0; r < num_runs; ++r) {
            double acc = 0.0;
            for (Eigen::Index c : cols) acc += runs(r, c);
            run_means[static_cast<std::size_t>(r)] = acc / static_cast<double>(cols.size());
            mean += run_means[static_cast<std::size_t>(r)];
        }
        mean /= num_runs;
        double var = 0.0;
        for (double v : run_means) var += (v - mean) * (v - mean);

        RegionDimensionRow row;
        row.region = region;
        row.method = "knn";
        row.estimate = mean;
        row.spread = std::sqrt(var / num_runs);
        report.push_back(row);
    }
    return report;
}

} // namespace sunpatch
