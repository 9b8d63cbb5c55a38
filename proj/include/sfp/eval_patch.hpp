#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "sfp/image.hpp"
#include "sfp/polar_core.hpp"

namespace sfp {

struct AngularErrorReport {
    double mae_deg = 0.0;
    std::size_t pixels = 0;      // pixels valid in both maps
    std::size_t masked_out = 0;  // pixels valid in at most one map
};

/// Mean of arccos(<est, truth>) in degrees over pixels valid in both maps,
/// evaluated as atan2(|est x truth|, <est, truth>).
AngularErrorReport angular_error(const NormalMapd& est, const NormalMapd& truth);

inline double mean_angular_error(const NormalMapd& est, const NormalMapd& truth) {
    return angular_error(est, truth).mae_deg;
}

struct Offset {
    Eigen::Index dx = 0;
    Eigen::Index dy = 0;
    friend bool operator==(const Offset&, const Offset&) = default;
};

struct Patch {
    Eigen::Index x = 0;  // top-left corner
    Eigen::Index y = 0;
    std::size_t shift = 0;  // index into PatchPlan::offsets
};

/// Overlapping square tilings of an image, one per diagonal shift. Each
/// shift on its own covers the whole image; edge patches are clamped.
struct PatchPlan {
    Dims dims;
    Eigen::Index patch_size = 256;
    std::vector<Offset> offsets;
    std::vector<Patch> patches;

    /// Number of patches covering each pixel.
    Plane<int> coverage() const;
};

/// Shift k of n moves the grid by round(k * patch_size / n) pixels along the
/// diagonal; shift 0 is the unshifted tiling.
PatchPlan make_patch_plan(Dims dims, Eigen::Index patch_size = 256, int n_shifts = 32);

NormalMapd crop(const NormalMapd& map, const Patch& patch, Eigen::Index patch_size);
PolarizationStack crop(const PolarizationStack& stack, const Patch& patch, Eigen::Index patch_size);
Mask crop(const Mask& mask, const Patch& patch, Eigen::Index patch_size);

struct PatchOutput {
    Eigen::Index x = 0;  // top-left corner in the full image
    Eigen::Index y = 0;
    NormalMapd normals;
};

struct StitchResult {
    NormalMapd map;
    Mask zero_norm;  // covered pixels whose votes cancelled; set to (0, 0, 1)
};

/// Vector average of the masked-in votes at each pixel, renormalized.
/// Pixels with no votes are masked out.
StitchResult stitch(const std::vector<PatchOutput>& outputs, Dims dims);

/// Crops per plan, runs `estimator` on each patch and stitches the results.
StitchResult run_patched(const PolarizationStack& stack, const PatchPlan& plan,
                         const std::function<NormalMapd(const PolarizationStack&, const Patch&)>& estimator);

}  // namespace sfp
