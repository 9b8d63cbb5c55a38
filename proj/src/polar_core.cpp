#include "sfp/polar_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace sfp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Eigen::Index kTileRows = 32;

// Two angles are the same polarizer orientation when they differ by a
// multiple of pi.
bool same_orientation(double a, double b) {
    const double d = fold_angle(a - b, kPi);
    return d < 1e-9 || kPi - d < 1e-9;
}

std::size_t distinct_orientations(const std::vector<double>& angles) {
    std::vector<double> seen;
    for (double a : angles) {
        bool dup = false;
        for (double s : seen) dup = dup || same_orientation(a, s);
        if (!dup) seen.push_back(a);
    }
    return seen.size();
}

SinusoidFit allocate_fit(Dims d, const Mask& mask) {
    SinusoidFit fit;
    fit.mean = Planed::Zero(d.height, d.width);
    fit.amplitude = Planed::Zero(d.height, d.width);
    fit.phase = Planed::Zero(d.height, d.width);
    fit.low_confidence = Mask::Constant(d.height, d.width, false);
    fit.mask = mask;
    return fit;
}

// Stores (a, b, c) of a + b cos 2x + c sin 2x as mean/amplitude/phase.
void store_coefficients(SinusoidFit& fit, Eigen::Index y, Eigen::Index x, double a, double b, double c,
                        const FitOptions& options) {
    const double amplitude = std::hypot(b, c);
    fit.mean(y, x) = a;
    fit.amplitude(y, x) = amplitude;
    const bool low = !(amplitude >= options.relative_amplitude_threshold * a) || a <= 0.0;
    fit.low_confidence(y, x) = low;
    fit.phase(y, x) = low ? 0.0 : fold_angle(0.5 * std::atan2(c, b), kPi);
}

}  // namespace

void validate_polarizer_angles(const std::vector<double>& angles) {
    for (std::size_t i = 0; i < angles.size(); ++i) {
        for (std::size_t j = i + 1; j < angles.size(); ++j) {
            if (same_orientation(angles[i], angles[j])) {
                throw DegenerateSystemError("polarizer angles " + std::to_string(i) + " and " +
                                            std::to_string(j) + " coincide modulo pi");
            }
        }
    }
    if (distinct_orientations(angles) < 3) {
        throw DegenerateSystemError("at least 3 polarizer angles distinct modulo pi are required, got " +
                                    std::to_string(distinct_orientations(angles)));
    }
}

void PolarizationStack::validate() const {
    if (images.size() != angles.size()) {
        throw ShapeError("stack has " + std::to_string(images.size()) + " planes but " +
                         std::to_string(angles.size()) + " angles");
    }
    for (std::size_t i = 0; i < images.size(); ++i) {
        require_same_dims(dims_of(images[i]), dims(), "plane " + std::to_string(i) + " vs mask");
    }
    validate_polarizer_angles(angles);
    for (const auto& plane : images) {
        const bool bad = (mask && !(plane.isFinite() && plane >= 0.0)).any();
        if (bad) throw DomainError("stack contains negative or non-finite intensities on masked-in pixels");
    }
}

SinusoidFit fit_sinusoid(const PolarizationStack& stack, const FitOptions& options) {
    stack.validate();
    const Dims d = stack.dims();
    const auto m = static_cast<Eigen::Index>(stack.size());

    // Rows of the design matrix are [1, cos 2a, sin 2a]; the pseudo-inverse
    // is the same for every pixel.
    Eigen::MatrixXd design(m, 3);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double a = stack.angles[static_cast<std::size_t>(i)];
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(2.0 * a);
        design(i, 2) = std::sin(2.0 * a);
    }
    const Eigen::Matrix3d normal = design.transpose() * design;
    const Eigen::MatrixXd pinv = normal.ldlt().solve(design.transpose());

    SinusoidFit fit = allocate_fit(d, stack.mask);
    for_each_row_tile(d.height, kTileRows, [&](Eigen::Index y0, Eigen::Index y1, Eigen::Index) {
        Eigen::VectorXd samples(m);
        for (Eigen::Index y = y0; y < y1; ++y) {
            for (Eigen::Index x = 0; x < d.width; ++x) {
                if (!stack.mask(y, x)) {
                    fit.low_confidence(y, x) = true;
                    continue;
                }
                for (Eigen::Index i = 0; i < m; ++i) samples(i) = stack.images[static_cast<std::size_t>(i)](y, x);
                const Eigen::Vector3d coef = pinv * samples;
                store_coefficients(fit, y, x, coef(0), coef(1), coef(2), options);
            }
        }
    });
    return fit;
}

SinusoidFit fit_sinusoid_stokes(const PolarizationStack& stack, const FitOptions& options) {
    stack.validate();
    constexpr double canonical[4] = {0.0, kPi / 4, kPi / 2, 3 * kPi / 4};
    bool is_canonical = stack.size() == 4;
    for (std::size_t i = 0; is_canonical && i < 4; ++i) {
        is_canonical = std::abs(stack.angles[i] - canonical[i]) < 1e-12;
    }
    if (!is_canonical) throw DomainError("Stokes reduction requires angles {0, 45, 90, 135} degrees in order");

    const Dims d = stack.dims();
    SinusoidFit fit = allocate_fit(d, stack.mask);
    const auto& i0 = stack.images[0];
    const auto& i45 = stack.images[1];
    const auto& i90 = stack.images[2];
    const auto& i135 = stack.images[3];
    for (Eigen::Index y = 0; y < d.height; ++y) {
        for (Eigen::Index x = 0; x < d.width; ++x) {
            if (!stack.mask(y, x)) {
                fit.low_confidence(y, x) = true;
                continue;
            }
            const double s0 = (i0(y, x) + i45(y, x) + i90(y, x) + i135(y, x)) / 4.0;
            const double s1 = (i0(y, x) - i90(y, x)) / 2.0;
            const double s2 = (i45(y, x) - i135(y, x)) / 2.0;
            store_coefficients(fit, y, x, s0, s1, s2, options);
        }
    }
    return fit;
}

DopMap dop_from_fit(const SinusoidFit& fit) {
    DopMap out;
    out.mask = fit.mask;
    out.rho = (fit.mean > 0.0).select(fit.amplitude / fit.mean, 0.0).min(1.0).max(0.0);
    return out;
}

PriorNormals compute_priors(const PolarizationStack& stack, const RefractiveIndex& n, const FitOptions& options) {
    const SinusoidFit fit = fit_sinusoid(stack, options);
    const DopMap dop = dop_from_fit(fit);
    const Dims d = stack.dims();
    const SpecularInverter<double> specular(n);

    PriorNormals p{NormalMapd(d), NormalMapd(d), NormalMapd(d), fit.low_confidence,
                   Mask::Constant(d.height, d.width, false), Mask::Constant(d.height, d.width, false)};
    const Mask valid = stack.mask && !fit.low_confidence;
    p.diffuse.mask = valid;
    p.specular_rising.mask = valid;
    p.specular_falling.mask = valid;

    for_each_row_tile(d.height, kTileRows, [&](Eigen::Index y0, Eigen::Index y1, Eigen::Index) {
        for (Eigen::Index y = y0; y < y1; ++y) {
            for (Eigen::Index x = 0; x < d.width; ++x) {
                if (!valid(y, x)) continue;
                const double rho = dop.rho(y, x);
                const double phase = fit.phase(y, x);

                const auto diffuse_zenith = diffuse_zenith_inverse(rho, n);
                const double diffuse_azimuth = azimuth_candidates(phase, Reflection::Diffuse)[0];
                p.diffuse.set(x, y, angles_to_normal(diffuse_azimuth, diffuse_zenith.theta));
                p.diffuse_saturated(y, x) = diffuse_zenith.saturated;

                const auto zeniths = specular(rho);
                const double specular_azimuth = azimuth_candidates(phase, Reflection::Specular)[0];
                p.specular_rising.set(x, y, angles_to_normal(specular_azimuth, zeniths.rising));
                p.specular_falling.set(x, y, angles_to_normal(specular_azimuth, zeniths.falling));
                p.specular_saturated(y, x) = zeniths.saturated;
            }
        }
    });
    return p;
}

}  // namespace sfp
