#include "sunpatch/dictionary.hpp"

#include <string>

#include <Eigen/Dense>

#include "sunpatch/cca.hpp"
#include "sunpatch/dimension.hpp"

namespace sunpatch {

ImageDictionary learn_dictionary_from_columns(const Eigen::MatrixXd& columns, int atom_count,
                                              std::string source_id) {
    if (atom_count < 1 || atom_count > kMaxDictionaryAtoms) {
        throw InvalidParameterError("atom_count must lie in 1.." +
                                    std::to_string(kMaxDictionaryAtoms));
    }
    if (columns.cols() <= atom_count) {
        throw SmallSampleError("dictionary learning needs more columns than atoms");
    }

    const PcaSpectrum spec = pca_spectrum(columns);

    // numerical rank of the centered data
    const double floor = spec.eigenvalues(0) * 1e-12;
    int rank = 0;
    for (Eigen::Index j = 0; j < spec.eigenvalues.size(); ++j) {
        if (spec.eigenvalues(j) > floor) ++rank;
    }
    if (rank < atom_count) {
        throw RankDeficiencyError("data rank " + std::to_string(rank) + " is below atom_count " +
                                  std::to_string(atom_count) + "; lower atom_count");
    }

    ImageDictionary dict;
    dict.source_id = std::move(source_id);
    dict.atoms.resize(columns.rows(), atom_count);
    for (int j = 0; j < atom_count; ++j) {
        Eigen::VectorXd atom = spec.components.col(j);
        Eigen::Index dominant = 0;
        atom.cwiseAbs().maxCoeff(&dominant);
        if (atom(dominant) < 0.0) atom = -atom;
        dict.atoms.col(j) = atom;
    }
    dict.flattened.resize(static_cast<Eigen::Index>(columns.rows()) * atom_count);
    for (int j = 0; j < atom_count; ++j) {
        dict.flattened.segment(static_cast<Eigen::Index>(j) * columns.rows(), columns.rows()) =
            dict.atoms.col(j);
    }
    return dict;
}

ImageDictionary learn_dictionary(const PatchMatrix& patches, int atom_count,
                                 std::string source_id) {
    return learn_dictionary_from_columns(patches.columns, atom_count, std::move(source_id));
}

ImageDictionary learn_dictionary_cca(const ImagePair& pair, const RegionMask& mask,
                                     int atom_count, std::string source_id,
                                     const DictionaryCcaParams& params) {
    mask.require_matches(pair.rows(), pair.cols(), "image pair");

    const PatchMatrix joint = extract_patches(pair, params.patch_side, Padding::mirror, false);
    auto [x, y] = split_joint(joint);
    const double ridge =
        params.ridge < 0.0 ? default_cca_ridge(x.columns, y.columns) : params.ridge;
    const CcaResult res = cca(x, y, ridge);

    // canonical-variate data matrix: u_1..u_r stacked on v_1..v_r, per pixel
    const Eigen::Index r = res.correlations.size();
    const Eigen::VectorXd x_mean = x.columns.rowwise().mean();
    const Eigen::VectorXd y_mean = y.columns.rowwise().mean();
    Eigen::MatrixXd variates(2 * r, joint.count());
    variates.topRows(r) = res.a_vectors.transpose() * (x.columns.colwise() - x_mean);
    variates.bottomRows(r) = res.b_vectors.transpose() * (y.columns.colwise() - y_mean);

    return learn_dictionary_from_columns(variates, atom_count, std::move(source_id));
}

} // namespace sunpatch
