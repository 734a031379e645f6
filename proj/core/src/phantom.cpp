#include "sunpatch/phantom.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sunpatch/rng.hpp"

namespace sunpatch {

PhantomKind phantom_kind_from_string(const std::string& name) {
    if (name == "single_spot") return PhantomKind::single_spot;
    if (name == "multi_spot") return PhantomKind::multi_spot;
    if (name == "noise") return PhantomKind::noise;
    throw InvalidParameterError("unknown phantom kind '" + name +
                                "' (expected single_spot, multi_spot or noise)");
}

const char* to_string(PhantomKind kind) {
    switch (kind) {
        case PhantomKind::single_spot: return "single_spot";
        case PhantomKind::multi_spot: return "multi_spot";
        case PhantomKind::noise: return "noise";
    }
    return "?";
}

namespace {

constexpr double kBackgroundLevel = 1.0;
constexpr double kContNoise = 0.05;
constexpr double kMagNoise = 0.15;
constexpr double kUmbraNoise = 0.002;
constexpr double kPenumbraNoise = 0.01;
constexpr double kCoupling = 3.0;     // |mag| = kCoupling * (background - cont) in a spot
// The coupled zone extends past the penumbra edge far enough that every pixel
// of a patch centered in the spot is coupled, up to 5x5 patches (corner
// offset 2*sqrt(2)).
constexpr double kCoupleMargin = 3.0;

struct Spot {
    double row = 0.0;
    double col = 0.0;
    double r_umbra = 0.0;
    double r_penumbra = 0.0;
    double polarity = -1.0; // sign of the coupled field
    double filament_phase = 0.0;
};

struct Fragment {
    double row = 0.0;
    double col = 0.0;
    double amplitude = 0.0;
    double sigma = 2.0;
};

double smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

/// Spot continuum profile, continuous across zone boundaries:
/// a shallow quadratic bowl in the umbra, a filamented ramp in the penumbra,
/// background level outside.
double spot_profile(const Spot& spot, double r, double theta) {
    if (r <= spot.r_umbra) {
        const double t = r / spot.r_umbra;
        return 0.30 + 0.10 * t * t;
    }
    if (r <= spot.r_penumbra) {
        const double t = (r - spot.r_umbra) / (spot.r_penumbra - spot.r_umbra);
        const double ramp = 0.40 + 0.60 * smoothstep(t);
        const double filaments =
            0.06 * std::cos(12.0 * theta + spot.filament_phase) * std::sin(std::numbers::pi * t);
        return ramp + filaments;
    }
    return kBackgroundLevel;
}

} // namespace

Phantom make_phantom(PhantomKind kind, int size, std::uint64_t seed) {
    if (size < 64) throw InvalidParameterError("phantom size must be >= 64");

    const std::size_t n = static_cast<std::size_t>(size) * size;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(kind)));

    // noise fields first, in a fixed raster order, so geometry never shifts
    // the stream
    std::vector<double> cont_noise(n), mag_noise(n);
    for (std::size_t i = 0; i < n; ++i) cont_noise[i] = rng.next_normal();
    for (std::size_t i = 0; i < n; ++i) mag_noise[i] = rng.next_normal();

    std::vector<Spot> spots;
    std::vector<Fragment> fragments;

    const double s = static_cast<double>(size);
    if (kind == PhantomKind::single_spot) {
        Spot spot;
        spot.row = 0.5 * (s - 1.0);
        spot.col = 0.5 * (s - 1.0);
        spot.r_umbra = 0.12 * s;
        spot.r_penumbra = 0.25 * s;
        spot.polarity = -1.0;
        spot.filament_phase = 2.0 * std::numbers::pi * rng.next_double();
        spots.push_back(spot);
    } else if (kind == PhantomKind::multi_spot) {
        // three spots in distinct quadrants; polarities alternate, the classic
        // bipolar-group look
        const double q = 0.25 * s;
        const double centers[4][2] = {{q, q}, {q, 3 * q}, {3 * q, q}, {3 * q, 3 * q}};
        const std::size_t skip = static_cast<std::size_t>(rng.next_below(4));
        int placed = 0;
        for (std::size_t c = 0; c < 4 && placed < 3; ++c) {
            if (c == skip) continue;
            Spot spot;
            spot.row = centers[c][0] + (rng.next_double() - 0.5) * 0.05 * s;
            spot.col = centers[c][1] + (rng.next_double() - 0.5) * 0.05 * s;
            spot.r_penumbra = (0.11 + 0.03 * rng.next_double()) * s;
            spot.r_umbra = 0.48 * spot.r_penumbra;
            spot.polarity = (placed % 2 == 0) ? -1.0 : 1.0;
            spot.filament_phase = 2.0 * std::numbers::pi * rng.next_double();
            spots.push_back(spot);
            ++placed;
        }
    }

    if (kind != PhantomKind::noise) {
        const int n_frag = kind == PhantomKind::single_spot
                               ? 4 + static_cast<int>(rng.next_below(3))
                               : 8 + static_cast<int>(rng.next_below(4));
        for (int f = 0; f < n_frag; ++f) {
            Fragment frag;
            // rejection-free placement: draw, then keep only fragments clear
            // of every coupled zone (draw count stays seed-stable)
            frag.row = 4.0 + rng.next_double() * (s - 8.0);
            frag.col = 4.0 + rng.next_double() * (s - 8.0);
            frag.amplitude = (f % 2 == 0 ? 0.8 : -0.8);
            frag.sigma = 1.5 + rng.next_double();
            bool clear = true;
            for (const Spot& spot : spots) {
                const double dr = frag.row - spot.row;
                const double dc = frag.col - spot.col;
                const double margin = spot.r_penumbra + kCoupleMargin + 3.0 * frag.sigma;
                if (dr * dr + dc * dc < margin * margin) clear = false;
            }
            if (clear) fragments.push_back(frag);
        }
    }

    std::vector<double> cont(n), mag(n);
    std::vector<std::uint8_t> labels(n, 0);

    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * size + c;

            const Spot* owner = nullptr;
            double radius = 0.0, theta = 0.0;
            for (const Spot& spot : spots) {
                const double dr = r - spot.row;
                const double dc = c - spot.col;
                const double d = std::sqrt(dr * dr + dc * dc);
                if (d <= spot.r_penumbra + kCoupleMargin) {
                    owner = &spot;
                    radius = d;
                    theta = std::atan2(dr, dc);
                    break;
                }
            }

            if (owner == nullptr) {
                cont[i] = kBackgroundLevel + kContNoise * cont_noise[i];
                double m = kMagNoise * mag_noise[i];
                for (const Fragment& frag : fragments) {
                    const double dr = r - frag.row;
                    const double dc = c - frag.col;
                    m += frag.amplitude *
                         std::exp(-(dr * dr + dc * dc) / (2.0 * frag.sigma * frag.sigma));
                }
                mag[i] = m;
                continue;
            }

            double value = spot_profile(*owner, radius, theta);
            if (radius <= owner->r_umbra) {
                value += kUmbraNoise * cont_noise[i];
                labels[i] = static_cast<std::uint8_t>(Region::umbra);
            } else if (radius <= owner->r_penumbra) {
                value += kPenumbraNoise * cont_noise[i];
                labels[i] = static_cast<std::uint8_t>(Region::penumbra);
            } else {
                // coupled margin: background-like continuum, still exactly coupled
                value = kBackgroundLevel + kContNoise * cont_noise[i];
            }
            cont[i] = value;
            // exact affine coupling; every patch centered inside the spot
            // regions sees only coupled pixels
            mag[i] = owner->polarity * kCoupling * (kBackgroundLevel - value);
        }
    }

    ImagePair pair(ImageGrid(size, size, std::move(cont), Modality::continuum),
                   ImageGrid(size, size, std::move(mag), Modality::magnetogram));
    RegionMask mask(size, size, std::move(labels));
    return {std::move(pair), std::move(mask)};
}

} // namespace sunpatch
