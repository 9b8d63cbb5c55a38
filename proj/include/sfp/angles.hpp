#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "sfp/fresnel.hpp"
#include "sfp/image.hpp"

namespace sfp {

template <typename Scalar>
struct SphericalAngles {
    Scalar azimuth{};  // [0, 2pi)
    Scalar zenith{};   // [0, pi/2]
};

/// Wraps an angle into [0, period).
template <typename Scalar>
Scalar fold_angle(Scalar angle, Scalar period) {
    Scalar r = std::fmod(angle, period);
    if (r < Scalar(0)) r += period;
    // fmod of a tiny negative value can round up to exactly `period`.
    if (r >= period) r -= period;
    return r;
}

/// The two azimuths consistent with a phase measurement. Diffuse reflection
/// keeps the phase; specular reflection rotates it by a quarter turn. Both
/// carry the pi flip.
template <typename Scalar>
std::array<Scalar, 2> azimuth_candidates(Scalar phase, Reflection model) {
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar base = model == Reflection::Diffuse ? phase : phase + pi / Scalar(2);
    return {fold_angle(base, Scalar(2) * pi), fold_angle(base + pi, Scalar(2) * pi)};
}

template <typename Scalar>
Vec3<Scalar> angles_to_normal(const SphericalAngles<Scalar>& a) {
    const Scalar s = std::sin(a.zenith);
    return {s * std::cos(a.azimuth), s * std::sin(a.azimuth), std::cos(a.zenith)};
}

template <typename Scalar>
Vec3<Scalar> angles_to_normal(Scalar azimuth, Scalar zenith) {
    return angles_to_normal(SphericalAngles<Scalar>{azimuth, zenith});
}

/// Inverse of angles_to_normal for camera-facing unit normals. The azimuth
/// at the pole is 0.
template <typename Scalar>
SphericalAngles<Scalar> normal_to_angles(const Vec3<Scalar>& n) {
    if (!(std::abs(n.norm() - Scalar(1)) <= Scalar(1e-6))) {
        throw DomainError("normal is not unit length");
    }
    if (n.z() < Scalar(0)) throw DomainError("normal faces away from the camera");
    const Scalar in_plane = std::hypot(n.x(), n.y());
    const Scalar zenith = std::atan2(in_plane, n.z());
    if (in_plane == Scalar(0)) return {Scalar(0), zenith};
    return {fold_angle(std::atan2(n.y(), n.x()), Scalar(2) * std::numbers::pi_v<Scalar>), zenith};
}

}  // namespace sfp
