#ifndef SUNPATCH_ERRORS_HPP
#define SUNPATCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sunpatch {

/// Base class for all library errors. `code()` is a stable machine-readable
/// identifier; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Shapes of two objects that must agree do not (image vs. mask, paired blocks).
class DimensionMismatchError : public Error {
public:
    explicit DimensionMismatchError(const std::string& message)
        : Error("dimension_mismatch", message) {}
};

/// A region restriction produced no columns. Distinct from a shape mismatch.
class EmptyRegionError : public Error {
public:
    explicit EmptyRegionError(const std::string& message)
        : Error("empty_region", message) {}
};

/// Standardization requested on a modality with zero variance.
class ZeroVarianceError : public Error {
public:
    explicit ZeroVarianceError(const std::string& message)
        : Error("zero_variance", message) {}
};

/// Invalid argument value (bad patch side, bad subsample schedule, ...).
class InvalidParameterError : public Error {
public:
    explicit InvalidParameterError(const std::string& message)
        : Error("invalid_parameter", message) {}
};

/// The graph-length growth curve carries no usable signal (e.g. all mean
/// lengths identical because the points are duplicated).
class DegenerateFitError : public Error {
public:
    explicit DegenerateFitError(const std::string& message)
        : Error("degenerate_fit", message) {}
};

/// Too few samples for the requested decomposition (count <= dim and similar).
class SmallSampleError : public Error {
public:
    explicit SmallSampleError(const std::string& message)
        : Error("small_sample", message) {}
};

/// A mask region is too small for the requested patch dimension.
class SmallRegionError : public Error {
public:
    explicit SmallRegionError(const std::string& message)
        : Error("small_region", message) {}
};

/// Covariance block is singular and no ridge was supplied.
class SingularCovarianceError : public Error {
public:
    explicit SingularCovarianceError(const std::string& message)
        : Error("singular_covariance", message) {}
};

/// Requested more atoms than the data's numerical rank supports.
class RankDeficiencyError : public Error {
public:
    explicit RankDeficiencyError(const std::string& message)
        : Error("rank_deficiency", message) {}
};

/// The eigengap model-selection rule cannot distinguish any cluster count;
/// the caller must force k explicitly.
class EigengapError : public Error {
public:
    explicit EigengapError(const std::string& message)
        : Error("degenerate_eigengap", message) {}
};

/// File could not be read, written, or parsed.
class IoError : public Error {
public:
    explicit IoError(const std::string& message)
        : Error("io", message) {}
};

} // namespace sunpatch

#endif
