#include "sunpatch/cca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace sunpatch {

namespace {

struct CenteredBlock {
    Eigen::MatrixXd centered; // d x n
    Eigen::MatrixXd cov;      // d x d, (n-1) denominator
};

CenteredBlock center_and_cov(const Eigen::MatrixXd& block) {
    CenteredBlock out;
    const Eigen::VectorXd mean = block.rowwise().mean();
    out.centered = block.colwise() - mean;
    out.cov = (out.centered * out.centered.transpose()) /
              static_cast<double>(block.cols() - 1);
    return out;
}

/// Symmetric inverse square root of cov + ridge*I. Throws when the
/// unregularized block is numerically singular.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& cov, double ridge, const char* side) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw SingularCovarianceError(std::string(side) + " covariance eigensolve failed");
    }
    const Eigen::VectorXd& ev = solver.eigenvalues(); // ascending
    const double floor = std::max(ev(ev.size() - 1), 0.0) * 1e-12;
    if (ridge <= 0.0 && ev(0) <= floor) {
        throw SingularCovarianceError(std::string(side) +
                                      " covariance is singular; supply a positive ridge");
    }
    Eigen::VectorXd inv_sqrt(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        inv_sqrt(i) = 1.0 / std::sqrt(std::max(ev(i), 0.0) + ridge);
    }
    return solver.eigenvectors() * inv_sqrt.asDiagonal() * solver.eigenvectors().transpose();
}

MaskedGrid variate_image(const Eigen::VectorXd& direction, const Eigen::MatrixXd& centered,
                         const std::vector<PixelCoord>& pixels, int rows, int cols) {
    MaskedGrid grid(rows, cols);
    const Eigen::VectorXd values = centered.transpose() * direction;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const PixelCoord& px = pixels[static_cast<std::size_t>(i)];
        grid.set(px.row, px.col, values(i));
    }
    return grid;
}

} // namespace

double default_cca_ridge(const Eigen::MatrixXd& x_block, const Eigen::MatrixXd& y_block) {
    const CenteredBlock cx = center_and_cov(x_block);
    const CenteredBlock cy = center_and_cov(y_block);
    const double dim = static_cast<double>(x_block.rows() + y_block.rows());
    return 1e-8 * (cx.cov.trace() + cy.cov.trace()) / dim;
}

CcaResult cca(const PatchMatrix& x_block, const PatchMatrix& y_block, double ridge) {
    const Eigen::Index n = x_block.count();
    if (n != y_block.count()) {
        throw DimensionMismatchError("x and y blocks must have the same column count");
    }
    if (x_block.pixel_index != y_block.pixel_index) {
        throw DimensionMismatchError("x and y columns must be paired by pixel");
    }
    const Eigen::Index dx = x_block.dim();
    const Eigen::Index dy = y_block.dim();
    if (n <= dx || n <= dy) {
        throw SmallSampleError("CCA needs more samples than the dimension of each block (n = " +
                               std::to_string(n) + ")");
    }
    if (ridge < 0.0) throw InvalidParameterError("ridge must be nonnegative");

    const CenteredBlock cx = center_and_cov(x_block.columns);
    const CenteredBlock cy = center_and_cov(y_block.columns);
    const Eigen::MatrixXd cross = (cx.centered * cy.centered.transpose()) /
                                  static_cast<double>(n - 1);

    const Eigen::MatrixXd wx = inverse_sqrt(cx.cov, ridge, "x-block");
    const Eigen::MatrixXd wy = inverse_sqrt(cy.cov, ridge, "y-block");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(wx * cross * wy,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);

    const Eigen::Index r = std::min(dx, dy);
    CcaResult result;
    result.correlations.resize(r);
    result.a_vectors.resize(dx, r);
    result.b_vectors.resize(dy, r);

    for (Eigen::Index i = 0; i < r; ++i) {
        result.correlations(i) = std::clamp(svd.singularValues()(i), 0.0, 1.0);
        Eigen::VectorXd a = wx * svd.matrixU().col(i);
        Eigen::VectorXd b = wy * svd.matrixV().col(i);

        // unit sample variance of the canonical variates
        const double va = a.dot(cx.cov * a);
        const double vb = b.dot(cy.cov * b);
        if (va > 0.0) a /= std::sqrt(va);
        if (vb > 0.0) b /= std::sqrt(vb);

        // sign convention: dominant entry of a positive, then corr(u,v) >= 0
        Eigen::Index dominant = 0;
        a.cwiseAbs().maxCoeff(&dominant);
        if (a(dominant) < 0.0) a = -a;
        if (a.dot(cross * b) < 0.0) b = -b;

        result.a_vectors.col(i) = a;
        result.b_vectors.col(i) = b;
    }

    result.u_image = variate_image(result.a_vectors.col(0), cx.centered, x_block.pixel_index,
                                   x_block.source_rows, x_block.source_cols);
    result.v_image = variate_image(result.b_vectors.col(0), cy.centered, y_block.pixel_index,
                                   y_block.source_rows, y_block.source_cols);
    return result;
}

RegionCcaReport region_cca_report(const ImagePair& pair, const RegionMask& mask,
                                  const RegionCcaParams& params) {
    mask.require_matches(pair.rows(), pair.cols(), "image pair");
    if (params.patch_sides.empty()) {
        throw InvalidParameterError("at least one patch side is required");
    }

    RegionCcaReport report;
    for (int p : params.patch_sides) {
        const PatchMatrix joint = extract_patches(pair, p, Padding::mirror, false);
        for (Region region : params.regions) {
            const PatchMatrix restricted = restrict_to_region(joint, mask, region);
            auto [x, y] = split_joint(restricted);
            if (restricted.count() <= x.dim()) {
                throw SmallRegionError(std::string(to_string(region)) + " region has " +
                                       std::to_string(restricted.count()) +
                                       " pixels, too few for " + std::to_string(p) + "x" +
                                       std::to_string(p) + " patches (dim " +
                                       std::to_string(x.dim()) + ")");
            }
            const double ridge =
                params.ridge < 0.0 ? default_cca_ridge(x.columns, y.columns) : params.ridge;
            CcaResult res = cca(x, y, ridge);

            RegionCcaRow row;
            row.region = region;
            row.patch_side = p;
            row.correlations = std::move(res.correlations);
            row.u_image = std::move(res.u_image);
            row.v_image = std::move(res.v_image);
            report.push_back(std::move(row));
        }
    }
    return report;
}

} // namespace sunpatch
