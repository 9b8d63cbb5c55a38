#pragma once

#include <vector>

#include "sfp/angles.hpp"
#include "sfp/fresnel.hpp"
#include "sfp/image.hpp"

namespace sfp {

/// M co-registered intensity planes taken behind a linear polarizer at the
/// given angles (radians).
struct PolarizationStack {
    std::vector<double> angles;
    std::vector<Planed> images;
    Mask mask;

    Dims dims() const { return dims_of(mask); }
    std::size_t size() const { return images.size(); }

    /// Checks plane dimensions, angle distinctness modulo pi and
    /// non-negative finite intensities on masked-in pixels.
    void validate() const;
};

/// Throws DegenerateSystemError unless the angles are pairwise distinct
/// modulo pi and number at least 3.
void validate_polarizer_angles(const std::vector<double>& angles);

/// Per-pixel fit of I(a) = mean + amplitude * cos(2 (a - phase)).
struct SinusoidFit {
    Planed mean;
    Planed amplitude;
    Planed phase;  // [0, pi)
    Mask low_confidence;
    Mask mask;

    Dims dims() const { return dims_of(mask); }
};

struct FitOptions {
    /// Pixels with amplitude < relative_amplitude_threshold * mean have no
    /// usable phase and are flagged low-confidence.
    double relative_amplitude_threshold = 1e-3;
};

/// Linear least-squares fit of the polarizer sinusoid. Works for any M >= 3
/// angles distinct modulo pi.
SinusoidFit fit_sinusoid(const PolarizationStack& stack, const FitOptions& options = {});

/// Closed-form Stokes reduction for the canonical polarizer angles
/// {0, 45, 90, 135} degrees, in that order.
SinusoidFit fit_sinusoid_stokes(const PolarizationStack& stack, const FitOptions& options = {});

struct DopMap {
    Planed rho;
    Mask mask;
};

/// amplitude / mean clamped to [0, 1]; 0 where mean is 0.
DopMap dop_from_fit(const SinusoidFit& fit);

/// The three ambiguous physical solutions. Masks equal the stack mask with
/// low-confidence pixels removed; those pixels hold (0, 0, 1).
struct PriorNormals {
    NormalMapd diffuse;
    NormalMapd specular_rising;
    NormalMapd specular_falling;
    Mask low_confidence;
    Mask diffuse_saturated;
    Mask specular_saturated;
};

PriorNormals compute_priors(const PolarizationStack& stack, const RefractiveIndex& n = RefractiveIndex(),
                            const FitOptions& options = {});

}  // namespace sfp
