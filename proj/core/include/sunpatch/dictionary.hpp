#ifndef SUNPATCH_DICTIONARY_HPP
#define SUNPATCH_DICTIONARY_HPP

#include <string>

#include <Eigen/Core>

#include "sunpatch/image.hpp"
#include "sunpatch/patches.hpp"

namespace sunpatch {

/// Per-image linear dictionary: orthonormal PCA atoms plus the flattened
/// vector used for image-to-image distances.
struct ImageDictionary {
    Eigen::MatrixXd atoms;     // dim x atom_count, orthonormal, sign-normalized
    std::string source_id;
    Eigen::VectorXd flattened; // atoms stacked column by column

    int atom_count() const { return static_cast<int>(atoms.cols()); }
    Eigen::Index dim() const { return atoms.rows(); }
};

/// Dictionaries are capped so every image maps into one common vector space.
inline constexpr int kMaxDictionaryAtoms = 7;

/// Top principal components of the centered columns. Sign-normalized so that
/// repeated runs and distance computations are well defined.
ImageDictionary learn_dictionary_from_columns(const Eigen::MatrixXd& columns, int atom_count,
                                              std::string source_id);

ImageDictionary learn_dictionary(const PatchMatrix& patches, int atom_count,
                                 std::string source_id);

struct DictionaryCcaParams {
    int patch_side = 3;
    double ridge = -1.0; // negative = default ridge
};

/// Dictionary learned on the canonical variates (u_1..u_r, v_1..v_r stacked
/// per pixel) of the pair's joint patches. The CCA is estimated over the full
/// patch set; the mask is validated against the pair.
ImageDictionary learn_dictionary_cca(const ImagePair& pair, const RegionMask& mask,
                                     int atom_count, std::string source_id,
                                     const DictionaryCcaParams& params);

/// JSON serialization: {source_id, atom_count, dim, flattened:[...]}.
void save_dictionary(const std::string& path, const ImageDictionary& dict);
ImageDictionary load_dictionary(const std::string& path);

} // namespace sunpatch

#endif
