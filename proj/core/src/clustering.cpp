#include "sunpatch/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "sunpatch/rng.hpp"

namespace sunpatch {

SimilarityMatrix SimilarityMatrix::validated(Eigen::MatrixXd entries) {
    const Eigen::Index n = entries.rows();
    if (n < 1 || entries.cols() != n) {
        throw InvalidParameterError("similarity matrix must be square and nonempty");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(entries(i, i) - 1.0) > 1e-12) {
            throw InvalidParameterError("similarity diagonal must be 1");
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(entries(i, j) - entries(j, i)) > 1e-12) {
                throw InvalidParameterError("similarity matrix must be symmetric");
            }
            if (entries(i, j) < 0.0 || entries(i, j) > 1.0) {
                throw InvalidParameterError("similarity entries must lie in [0,1]");
            }
        }
    }
    SimilarityMatrix sim;
    sim.entries = std::move(entries);
    return sim;
}

namespace {

/// Outcome of one dual-rooted growth: hitting-edge weight and per-vertex
/// membership (0 = free, 1 = tree A, 2 = tree B).
struct DualRootedRun {
    double hit_weight = 0.0;
    std::vector<std::uint8_t> membership;
};

// Prim growth from two roots over a precomputed distance matrix. Candidate
// edges leave one tree toward a vertex outside it; an edge landing in the
// other tree is the hit and is not added.
DualRootedRun dual_rooted_run(const Eigen::MatrixXd& dist, Eigen::Index root_a,
                              Eigen::Index root_b) {
    const Eigen::Index n = dist.rows();
    DualRootedRun run;
    run.membership.assign(static_cast<std::size_t>(n), 0);
    run.membership[static_cast<std::size_t>(root_a)] = 1;
    run.membership[static_cast<std::size_t>(root_b)] = 2;

    // best known connection into each tree, per outside vertex
    std::vector<double> best_w[2];
    std::vector<Eigen::Index> best_from[2];
    for (int t = 0; t < 2; ++t) {
        best_w[t].assign(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
        best_from[t].assign(static_cast<std::size_t>(n), -1);
    }
    for (Eigen::Index v = 0; v < n; ++v) {
        if (v != root_a) {
            best_w[0][static_cast<std::size_t>(v)] = dist(root_a, v);
            best_from[0][static_cast<std::size_t>(v)] = root_a;
        }
        if (v != root_b) {
            best_w[1][static_cast<std::size_t>(v)] = dist(root_b, v);
            best_from[1][static_cast<std::size_t>(v)] = root_b;
        }
    }

    for (;;) {
        // cheapest edge leaving either tree, ordered by (weight, from, to)
        int take_tree = -1;
        double take_w = std::numeric_limits<double>::infinity();
        Eigen::Index take_from = -1, take_to = -1;
        for (int t = 0; t < 2; ++t) {
            const std::uint8_t own = static_cast<std::uint8_t>(t + 1);
            for (Eigen::Index v = 0; v < n; ++v) {
                if (run.membership[static_cast<std::size_t>(v)] == own) continue;
                const double w = best_w[t][static_cast<std::size_t>(v)];
                const Eigen::Index f = best_from[t][static_cast<std::size_t>(v)];
                if (f < 0) continue;
                if (w < take_w || (w == take_w && (f < take_from || (f == take_from && v < take_to)))) {
                    take_tree = t;
                    take_w = w;
                    take_from = f;
                    take_to = v;
                }
            }
        }
        // both roots exist, so a candidate always exists before the hit
        const std::uint8_t other = static_cast<std::uint8_t>(2 - take_tree);
        if (run.membership[static_cast<std::size_t>(take_to)] == other) {
            run.hit_weight = take_w;
            return run;
        }
        run.membership[static_cast<std::size_t>(take_to)] = static_cast<std::uint8_t>(take_tree + 1);
        auto& w_arr = best_w[take_tree];
        auto& f_arr = best_from[take_tree];
        for (Eigen::Index v = 0; v < n; ++v) {
            if (v == take_to) continue;
            const double w = dist(take_to, v);
            if (w < w_arr[static_cast<std::size_t>(v)] ||
                (w == w_arr[static_cast<std::size_t>(v)] &&
                 take_to < f_arr[static_cast<std::size_t>(v)])) {
                w_arr[static_cast<std::size_t>(v)] = w;
                f_arr[static_cast<std::size_t>(v)] = take_to;
            }
        }
    }
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points) {
    const Eigen::VectorXd sq = points.colwise().squaredNorm();
    Eigen::MatrixXd dist = -2.0 * points.transpose() * points;
    dist.colwise() += sq;
    dist.rowwise() += sq.transpose();
    return dist.cwiseMax(0.0).cwiseSqrt();
}

} // namespace

double dual_rooted_mst_distance(const Eigen::MatrixXd& points, Eigen::Index root_a,
                                Eigen::Index root_b) {
    if (points.cols() < 2) throw SmallSampleError("dual-rooted growth needs at least 2 points");
    const Eigen::Index n = points.cols();
    if (root_a < 0 || root_a >= n || root_b < 0 || root_b >= n) {
        throw InvalidParameterError("root index out of range");
    }
    if (root_a == root_b) throw InvalidParameterError("roots must be distinct");
    return dual_rooted_run(pairwise_distances(points), root_a, root_b).hit_weight;
}

int default_ensemble_size(Eigen::Index count) {
    return static_cast<int>(10 * count);
}

SimilarityMatrix eac_dc_similarity(const Eigen::MatrixXd& points, int ensemble_size,
                                   std::uint64_t rng_seed) {
    const Eigen::Index n = points.cols();
    if (n < 2) throw SmallSampleError("similarity ensemble needs at least 2 items");
    if (ensemble_size < 1) throw InvalidParameterError("ensemble_size must be >= 1");

    const Eigen::MatrixXd dist = pairwise_distances(points);

    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(n, n);
    for (int r = 0; r < ensemble_size; ++r) {
        Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(r)));
        const Eigen::Index a = static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(n)));
        Eigen::Index b = static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
        if (b >= a) ++b;

        const DualRootedRun run = dual_rooted_run(dist, a, b);
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::uint8_t mi = run.membership[static_cast<std::size_t>(i)];
            if (mi == 0) continue;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                if (run.membership[static_cast<std::size_t>(j)] == mi) {
                    counts(i, j) += 1;
                }
            }
        }
    }

    Eigen::MatrixXd entries(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        entries(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double s = static_cast<double>(counts(i, j)) / ensemble_size;
            entries(i, j) = s;
            entries(j, i) = s;
        }
    }
    return SimilarityMatrix::validated(std::move(entries));
}

namespace {

struct LaplacianEigen {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // matching columns
};

LaplacianEigen normalized_laplacian_eigen(const SimilarityMatrix& sim) {
    const Eigen::Index n = sim.size();
    const Eigen::VectorXd degrees = sim.entries.rowwise().sum();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (degrees(i) <= 0.0) {
            throw InvalidParameterError("similarity row " + std::to_string(i) +
                                        " has zero degree; graph is disconnected at an item");
        }
    }
    const Eigen::VectorXd inv_sqrt = degrees.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd lap = -(inv_sqrt * inv_sqrt.transpose()).cwiseProduct(sim.entries);
    lap.diagonal().array() += 1.0;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    if (solver.info() != Eigen::Success) {
        throw InvalidParameterError("Laplacian eigendecomposition failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

struct KMeansResult {
    std::vector<int> labels;
    double inertia = std::numeric_limits<double>::infinity();
};

double sq_dist(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
    return (a - b).squaredNorm();
}

KMeansResult kmeans_once(const Eigen::MatrixXd& rows, int k, Rng& rng) {
    const Eigen::Index n = rows.rows();
    Eigen::MatrixXd centers(k, rows.cols());

    // k-means++ seeding
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    const Eigen::Index first = static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(n)));
    centers.row(0) = rows.row(first);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = sq_dist(rows.row(i), centers.row(c - 1));
            d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], d);
            total += d2[static_cast<std::size_t>(i)];
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            const double target = rng.next_double() * total;
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2[static_cast<std::size_t>(i)];
                if (acc >= target) {
                    pick = i;
                    break;
                }
                pick = i;
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(n)));
        }
        centers.row(c) = rows.row(pick);
    }

    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k), 0);
    constexpr int kMaxIters = 300;
    constexpr double kTol = 1e-9;

    for (int iter = 0; iter < kMaxIters; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(rows.row(i), centers.row(0));
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(rows.row(i), centers.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[static_cast<std::size_t>(i)] != best) {
                labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }

        std::fill(sizes.begin(), sizes.end(), 0);
        Eigen::MatrixXd new_centers = Eigen::MatrixXd::Zero(k, rows.cols());
        for (Eigen::Index i = 0; i < n; ++i) {
            new_centers.row(labels[static_cast<std::size_t>(i)]) += rows.row(i);
            ++sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (sizes[static_cast<std::size_t>(c)] > 0) {
                new_centers.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
            } else {
                // move the empty center onto the point farthest from its center
                Eigen::Index far = 0;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double d = sq_dist(rows.row(i), centers.row(labels[static_cast<std::size_t>(i)]));
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                new_centers.row(c) = rows.row(far);
                labels[static_cast<std::size_t>(far)] = c;
                changed = true;
            }
        }

        double shift = 0.0;
        for (int c = 0; c < k; ++c) shift = std::max(shift, sq_dist(new_centers.row(c), centers.row(c)));
        centers = new_centers;
        if (!changed || shift <= kTol) break;
    }

    KMeansResult result;
    result.labels = std::move(labels);
    result.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        result.inertia += sq_dist(rows.row(i), centers.row(result.labels[static_cast<std::size_t>(i)]));
    }
    return result;
}

} // namespace

ClusterAssignment spectral_cluster(const SimilarityMatrix& sim, std::optional<int> k) {
    const Eigen::Index n = sim.size();
    if (n < 2) throw SmallSampleError("clustering needs at least 2 items");

    const LaplacianEigen eig = normalized_laplacian_eigen(sim);

    int kk;
    if (k.has_value()) {
        kk = *k;
        if (kk < 1 || kk > n) throw InvalidParameterError("k must lie in [1, N]");
    } else {
        const int k_max = static_cast<int>(std::min<Eigen::Index>(10, n - 1));
        int best_k = -1;
        double best_gap = 0.0;
        for (int cand = 2; cand <= k_max; ++cand) {
            const double gap = eig.values(cand) - eig.values(cand - 1);
            if (gap > best_gap + 1e-15) {
                best_gap = gap;
                best_k = cand;
            }
        }
        if (best_k < 0 || best_gap <= 1e-12) {
            throw EigengapError("no usable eigengap; pass k explicitly");
        }
        kk = best_k;
    }

    if (kk == 1) {
        return {std::vector<int>(static_cast<std::size_t>(n), 0), 1};
    }

    Eigen::MatrixXd embedding = eig.vectors.leftCols(kk);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0) embedding.row(i) /= norm;
    }

    KMeansResult best;
    constexpr int kRestarts = 8;
    Rng rng(derive_seed(0x5c3a17a1u, static_cast<std::uint64_t>(n)));
    for (int restart = 0; restart < kRestarts; ++restart) {
        KMeansResult cand = kmeans_once(embedding, kk, rng);
        if (cand.inertia < best.inertia) best = std::move(cand);
    }

    // relabel clusters by first occurrence so output is stable
    std::vector<int> remap(static_cast<std::size_t>(kk), -1);
    int next = 0;
    ClusterAssignment assignment;
    assignment.k = kk;
    assignment.labels.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        int& slot = remap[static_cast<std::size_t>(best.labels[static_cast<std::size_t>(i)])];
        if (slot < 0) slot = next++;
        assignment.labels[static_cast<std::size_t>(i)] = slot;
    }
    return assignment;
}

Embedding laplacian_mds(const SimilarityMatrix& sim, int q) {
    const Eigen::Index n = sim.size();
    if (q < 1 || q > n - 1) {
        throw InvalidParameterError("q must lie in [1, N-1]; the trivial eigenvector is skipped");
    }
    const LaplacianEigen eig = normalized_laplacian_eigen(sim);
    Embedding emb;
    emb.coordinates = sim.entries * eig.vectors.middleCols(1, q);
    return emb;
}

} // namespace sunpatch
