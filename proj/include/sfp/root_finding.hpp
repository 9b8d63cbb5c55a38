#pragma once

#include <cmath>
#include <utility>

namespace sfp {

/// Bisection for f(x) = target on [lo, hi] where f is monotonic.
///
/// Halves the bracket until it collapses to adjacent floating-point values,
/// so the returned x is as close to the root as Scalar allows. `increasing`
/// selects the direction of monotonicity. The caller guarantees that target
/// lies between f(lo) and f(hi).
template <typename Scalar, typename Func>
Scalar bisect_monotonic(Func&& f, Scalar target, Scalar lo, Scalar hi, bool increasing,
                        int max_iterations = 200) {
    Scalar f_lo = f(lo);
    Scalar f_hi = f(hi);
    if (f_lo == target) return lo;
    if (f_hi == target) return hi;
    for (int i = 0; i < max_iterations; ++i) {
        const Scalar mid = lo + (hi - lo) / Scalar(2);
        if (mid <= lo || mid >= hi) break;
        const Scalar f_mid = f(mid);
        if (f_mid == target) return mid;
        if ((f_mid < target) == increasing) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    return std::abs(f_lo - target) <= std::abs(f_hi - target) ? lo : hi;
}

/// Golden-section search for the maximizer of a unimodal f on [lo, hi].
/// Stops when the bracket is narrower than `tolerance`.
template <typename Scalar, typename Func>
Scalar golden_section_maximize(Func&& f, Scalar lo, Scalar hi, Scalar tolerance,
                               int max_iterations = 500) {
    const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
    Scalar c = hi - inv_phi * (hi - lo);
    Scalar d = lo + inv_phi * (hi - lo);
    Scalar fc = f(c);
    Scalar fd = f(d);
    for (int i = 0; i < max_iterations && (hi - lo) > tolerance; ++i) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    // A flat top leaves the bracket wider than the argmax precision; report
    // the best evaluated interior point.
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    const Scalar fm = f(mid);
    if (fm >= fc && fm >= fd) return mid;
    return fc >= fd ? c : d;
}

}  // namespace sfp
