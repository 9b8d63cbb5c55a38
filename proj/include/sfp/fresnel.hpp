#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "sfp/image.hpp"
#include "sfp/root_finding.hpp"

namespace sfp {

/// Refractive index of the observed material. Bounded to (1, 3].
class RefractiveIndex {
public:
    static constexpr double kDefault = 1.5;

    RefractiveIndex() = default;
    explicit RefractiveIndex(double n) : n_(n) {
        if (!(n > 1.0 && n <= 3.0)) {
            throw DomainError("refractive index must lie in (1, 3], got " + std::to_string(n));
        }
    }
    double value() const { return n_; }

private:
    double n_ = kDefault;
};

enum class Reflection { Diffuse, Specular };

namespace detail {

template <typename Scalar>
void require_zenith_in_range(Scalar theta) {
    if (!(theta >= Scalar(0) && theta <= std::numbers::pi_v<Scalar> / Scalar(2))) {
        throw DomainError("zenith angle outside [0, pi/2]: " + std::to_string(static_cast<double>(theta)));
    }
}

template <typename Scalar>
void require_dop_in_range(Scalar rho) {
    if (!(rho >= Scalar(0) && rho <= Scalar(1))) {
        throw DomainError("degree of polarization outside [0, 1]: " +
                          std::to_string(static_cast<double>(rho)));
    }
}

// Unchecked model evaluations used inside the solvers.
template <typename Scalar>
Scalar diffuse_dop(Scalar theta, Scalar n) {
    using std::cos;
    using std::sin;
    using std::sqrt;
    const Scalar s = sin(theta);
    const Scalar s2 = s * s;
    const Scalar a = n - Scalar(1) / n;
    const Scalar b = n + Scalar(1) / n;
    const Scalar num = a * a * s2;
    const Scalar den = Scalar(2) + Scalar(2) * n * n - b * b * s2 + Scalar(4) * cos(theta) * sqrt(n * n - s2);
    return num / den;
}

// The specular denominator n^2 - s^2 - n^2 s^2 + 2 s^4 equals
// p^2 + q^2 with p = cos(theta) sqrt(n^2 - s^2) and q = s^2, while the
// numerator is 2 p q. Evaluating 2pq / (p^2 + q^2) keeps the quotient in
// [0, 1] without cancellation, and the denominator is strictly positive on
// [0, pi/2] (q = 0 only at theta = 0 where p = n), so the value at pi/2 is
// the one-sided limit 0 with no special case. 2pq <= p^2 + q^2, so the
// result is clamped to 1 against a one-ulp rounding overshoot.
template <typename Scalar>
Scalar specular_dop(Scalar theta, Scalar n) {
    using std::cos;
    using std::min;
    using std::sin;
    using std::sqrt;
    const Scalar s = sin(theta);
    const Scalar q = s * s;
    const Scalar p = cos(theta) * sqrt(n * n - q);
    return min(Scalar(1), Scalar(2) * p * q / (p * p + q * q));
}

}  // namespace detail

/// Degree of polarization of diffusely reflected light at zenith `theta`.
/// Non-decreasing on [0, pi/2] for n > 1.
template <typename Scalar>
Scalar diffuse_dop_forward(Scalar theta, const RefractiveIndex& n) {
    detail::require_zenith_in_range(theta);
    return detail::diffuse_dop(theta, static_cast<Scalar>(n.value()));
}

/// Degree of polarization of specularly reflected light at zenith `theta`.
/// Unimodal on [0, pi/2], zero at both ends.
template <typename Scalar>
Scalar specular_dop_forward(Scalar theta, const RefractiveIndex& n) {
    detail::require_zenith_in_range(theta);
    return detail::specular_dop(theta, static_cast<Scalar>(n.value()));
}

template <typename Scalar>
struct ZenithEstimate {
    Scalar theta{};
    bool saturated = false;
};

/// Inverts the diffuse model by bisection. Values above the model's maximum
/// (reached at grazing incidence) clamp to pi/2 with `saturated` set.
template <typename Scalar>
ZenithEstimate<Scalar> diffuse_zenith_inverse(Scalar rho, const RefractiveIndex& n) {
    detail::require_dop_in_range(rho);
    const Scalar nn = static_cast<Scalar>(n.value());
    const Scalar half_pi = std::numbers::pi_v<Scalar> / Scalar(2);
    if (rho == Scalar(0)) return {Scalar(0), false};
    const Scalar rho_max = detail::diffuse_dop(half_pi, nn);
    if (rho >= rho_max) return {half_pi, rho > rho_max};
    const auto f = [nn](Scalar t) { return detail::diffuse_dop(t, nn); };
    return {bisect_monotonic(f, rho, Scalar(0), half_pi, true), false};
}

template <typename Scalar>
struct SpecularZeniths {
    Scalar rising{};   // root on [0, theta_peak]
    Scalar falling{};  // root on [theta_peak, pi/2]
    bool saturated = false;
};

/// Two-branch inverse of the specular model for one refractive index.
///
/// The peak location is found once by golden-section search at
/// construction; the object is immutable afterwards and safe to share
/// between threads.
template <typename Scalar>
class SpecularInverter {
public:
    static constexpr double kPeakTolerance = 1e-12;

    explicit SpecularInverter(const RefractiveIndex& n = RefractiveIndex())
        : n_(static_cast<Scalar>(n.value())) {
        const auto f = [this](Scalar t) { return detail::specular_dop(t, n_); };
        peak_theta_ = golden_section_maximize(f, Scalar(0), half_pi(), static_cast<Scalar>(kPeakTolerance));
        peak_rho_ = f(peak_theta_);
    }

    Scalar peak_theta() const { return peak_theta_; }
    Scalar peak_rho() const { return peak_rho_; }

    SpecularZeniths<Scalar> operator()(Scalar rho) const {
        detail::require_dop_in_range(rho);
        if (rho == Scalar(0)) return {Scalar(0), half_pi(), false};
        if (rho >= peak_rho_) return {peak_theta_, peak_theta_, rho > peak_rho_};
        const auto f = [this](Scalar t) { return detail::specular_dop(t, n_); };
        return {bisect_monotonic(f, rho, Scalar(0), peak_theta_, true),
                bisect_monotonic(f, rho, peak_theta_, half_pi(), false), false};
    }

private:
    static Scalar half_pi() { return std::numbers::pi_v<Scalar> / Scalar(2); }

    Scalar n_;
    Scalar peak_theta_{};
    Scalar peak_rho_{};
};

template <typename Scalar>
SpecularZeniths<Scalar> specular_zenith_inverse(Scalar rho, const RefractiveIndex& n) {
    return SpecularInverter<Scalar>(n)(rho);
}

}  // namespace sfp
