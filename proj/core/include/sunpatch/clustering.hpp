#ifndef SUNPATCH_CLUSTERING_HPP
#define SUNPATCH_CLUSTERING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sunpatch/errors.hpp"

namespace sunpatch {

/// Symmetric image-to-image affinity with unit diagonal and entries in [0,1].
struct SimilarityMatrix {
    Eigen::MatrixXd entries;

    Eigen::Index size() const { return entries.rows(); }

    /// Validates symmetry (1e-12), unit diagonal, and the [0,1] range.
    static SimilarityMatrix validated(Eigen::MatrixXd entries);
};

struct ClusterAssignment {
    std::vector<int> labels; // 0..k-1, every cluster nonempty
    int k = 0;
};

struct Embedding {
    Eigen::MatrixXd coordinates; // N x q, columns ordered by eigenvalue
};

/// Hitting weight of two Prim trees grown from the roots: at each step the
/// globally cheapest edge leaving either tree is taken; growth stops when the
/// trees would share a vertex and the weight of that final edge is returned.
/// Equal-weight edges are ordered by their (from, to) index pair.
double dual_rooted_mst_distance(const Eigen::MatrixXd& points, Eigen::Index root_a,
                                Eigen::Index root_b);

/// Default ensemble size: 10 root pairs per item.
int default_ensemble_size(Eigen::Index count);

/// Evidence accumulation over `ensemble_size` seeded random root pairs: items
/// that end in the same rooted subtree co-associate with weight 1; similarity
/// is the co-association count divided by the ensemble size, diagonal forced
/// to 1.
SimilarityMatrix eac_dc_similarity(const Eigen::MatrixXd& points, int ensemble_size,
                                   std::uint64_t rng_seed);

/// Consensus spectral clustering on the normalized Laplacian
/// L = I - D^{-1/2} S D^{-1/2}: embed into the bottom-k eigenvectors,
/// row-normalize, k-means with fixed internal seeding. Without k, the largest
/// eigengap among 2..min(10, N-1) picks the cluster count.
ClusterAssignment spectral_cluster(const SimilarityMatrix& sim, std::optional<int> k);

/// Rows of the similarity matrix projected onto the first q nontrivial
/// eigenvectors of the normalized Laplacian (ascending eigenvalue, the
/// trivial bottom vector skipped).
Embedding laplacian_mds(const SimilarityMatrix& sim, int q);

void save_similarity(const std::string& path, const SimilarityMatrix& sim);
SimilarityMatrix load_similarity(const std::string& path);

void save_embedding(const std::string& path, const Embedding& embedding);

} // namespace sunpatch

#endif
