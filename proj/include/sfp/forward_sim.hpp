#pragma once

#include <cstdint>
#include <vector>

#include "sfp/fresnel.hpp"
#include "sfp/image.hpp"
#include "sfp/polar_core.hpp"

namespace sfp {

enum class NoiseKind { None, Gaussian, Poisson };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::None;
    double sigma = 0.0;    // gaussian standard deviation, intensity units
    double scale = 1.0;    // poisson photons per unit intensity
    std::uint64_t seed = 0;

    void validate() const;
};

using ReflectionMap = Plane<Reflection>;

/// Everything needed to synthesize a polarization stack from geometry.
struct SceneSpec {
    NormalMapd normals;
    RefractiveIndex n;
    ReflectionMap dominance;
    Planed unpolarized_intensity;
    NoiseSpec noise;

    Dims dims() const { return normals.dims(); }
    void validate() const;

    /// Uniform dominance label and intensity over the normal map.
    static SceneSpec uniform(NormalMapd normals, Reflection dominance, double intensity,
                             RefractiveIndex n = RefractiveIndex(), NoiseSpec noise = {});
};

/// Polarizer angles {0, 45, 90, 135} degrees in radians.
std::vector<double> canonical_angles();

/// Renders the polarizer sinusoid per pixel from the normal's zenith
/// (through the reflection model) and azimuth (through the phase shift of
/// the dominance label), then applies noise. Masked-out pixels are 0.
PolarizationStack render_stack(const SceneSpec& scene, const std::vector<double>& angles);

/// Orthographic sphere of the given radius centred in a (2r+1)^2 image.
/// Normals are (dx, dy, sqrt(1 - dx^2 - dy^2)) with dx, dy the pixel offset
/// from the centre divided by r; pixels with dx^2 + dy^2 <= 1 are masked in.
NormalMapd synth_sphere(int radius_px);

/// Per-tile RNG seed from (seed, tile index); splitmix64 finalizer.
std::uint64_t tile_seed(std::uint64_t seed, std::uint64_t tile);

}  // namespace sfp
