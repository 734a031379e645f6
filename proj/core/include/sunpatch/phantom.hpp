#ifndef SUNPATCH_PHANTOM_HPP
#define SUNPATCH_PHANTOM_HPP

#include <cstdint>

#include "sunpatch/image.hpp"

namespace sunpatch {

enum class PhantomKind : std::uint8_t { single_spot, multi_spot, noise };

PhantomKind phantom_kind_from_string(const std::string& name);
const char* to_string(PhantomKind kind);

/// Synthetic active-region pair with a mask derived from the known geometry.
struct Phantom {
    ImagePair pair;
    RegionMask mask;
};

/// Deterministic phantom generator. Continuum carries a radial umbra/penumbra
/// intensity profile with penumbral filaments over a noisy background; the
/// magnetogram is an exact affine function of the continuum inside each spot
/// (and slightly beyond it, so that every patch centered in a spot region
/// stays inside the coupled zone), with polarity fixed per spot, plus signed
/// magnetic fragments and independent noise outside. Same seed, same bytes.
Phantom make_phantom(PhantomKind kind, int size, std::uint64_t seed);

} // namespace sunpatch

#endif
