#include "sfp/eval_patch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sfp {

AngularErrorReport angular_error(const NormalMapd& est, const NormalMapd& truth) {
    require_same_dims(est.dims(), truth.dims(), "angular error");
    const Dims d = est.dims();
    const Mask both = est.mask && truth.mask;
    AngularErrorReport report;
    report.pixels = static_cast<std::size_t>(both.count());
    report.masked_out = static_cast<std::size_t>(d.pixels()) - report.pixels;
    if (report.pixels == 0) throw DomainError("angular error: no pixel is valid in both maps");

    // Row sums first, then a fixed-order total, so the result does not
    // depend on thread scheduling.
    std::vector<double> row_sum(static_cast<std::size_t>(d.height), 0.0);
    for_each_row_tile(d.height, 32, [&](Eigen::Index y0, Eigen::Index y1, Eigen::Index) {
        for (Eigen::Index y = y0; y < y1; ++y) {
            double s = 0.0;
            for (Eigen::Index x = 0; x < d.width; ++x) {
                if (!both(y, x)) continue;
                // atan2 form of arccos(<a, b>): exact at zero error, where
                // arccos amplifies float32 rounding into ~0.02 degrees.
                const Vec3d a = est.at(x, y);
                const Vec3d b = truth.at(x, y);
                s += std::atan2(a.cross(b).norm(), a.dot(b));
            }
            row_sum[static_cast<std::size_t>(y)] = s;
        }
    });
    double total = 0.0;
    for (double s : row_sum) total += s;
    report.mae_deg = total / static_cast<double>(report.pixels) * 180.0 / std::numbers::pi;
    return report;
}

Plane<int> PatchPlan::coverage() const {
    Plane<int> c = Plane<int>::Zero(dims.height, dims.width);
    for (const Patch& p : patches) c.block(p.y, p.x, patch_size, patch_size) += 1;
    return c;
}

namespace {

// Patch origins along one axis for a grid shifted by `shift`: the shifted
// grid plus a leading patch when the shift leaves a gap at 0, all clamped to
// [0, extent - size] and deduplicated.
std::vector<Eigen::Index> axis_origins(Eigen::Index extent, Eigen::Index size, Eigen::Index shift) {
    std::vector<Eigen::Index> out;
    const Eigen::Index last = extent - size;
    Eigen::Index start = shift > 0 ? shift - size : 0;
    for (Eigen::Index o = start; o < extent; o += size) {
        const Eigen::Index clamped = std::clamp<Eigen::Index>(o, 0, last);
        if (out.empty() || out.back() != clamped) out.push_back(clamped);
        if (o + size >= extent) break;
    }
    return out;
}

}  // namespace

PatchPlan make_patch_plan(Dims dims, Eigen::Index patch_size, int n_shifts) {
    if (patch_size <= 0) throw DomainError("patch size must be positive");
    if (n_shifts < 1 || n_shifts > patch_size) {
        throw DomainError("shift count must lie in [1, patch size], got " + std::to_string(n_shifts));
    }
    if (dims.width < patch_size || dims.height < patch_size) {
        throw DomainError("image " + to_string(dims) + " is smaller than the " + std::to_string(patch_size) +
                          "px patch; pad the input to at least the patch size");
    }
    PatchPlan plan;
    plan.dims = dims;
    plan.patch_size = patch_size;
    for (int k = 0; k < n_shifts; ++k) {
        const auto s = static_cast<Eigen::Index>(std::llround(static_cast<double>(k) * patch_size / n_shifts));
        plan.offsets.push_back({s, s});
        const auto xs = axis_origins(dims.width, patch_size, s);
        const auto ys = axis_origins(dims.height, patch_size, s);
        for (Eigen::Index y : ys) {
            for (Eigen::Index x : xs) plan.patches.push_back({x, y, static_cast<std::size_t>(k)});
        }
    }
    return plan;
}

namespace {

void require_inside(Dims d, const Patch& p, Eigen::Index size) {
    if (p.x < 0 || p.y < 0 || p.x + size > d.width || p.y + size > d.height) {
        throw DomainError("patch at (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") exceeds image " +
                          to_string(d));
    }
}

}  // namespace

Mask crop(const Mask& mask, const Patch& patch, Eigen::Index patch_size) {
    require_inside(dims_of(mask), patch, patch_size);
    return mask.block(patch.y, patch.x, patch_size, patch_size);
}

NormalMapd crop(const NormalMapd& map, const Patch& patch, Eigen::Index patch_size) {
    require_inside(map.dims(), patch, patch_size);
    NormalMapd out(patch_size, patch_size);
    out.mask = map.mask.block(patch.y, patch.x, patch_size, patch_size);
    for (Eigen::Index y = 0; y < patch_size; ++y) {
        out.normals.middleRows(y * patch_size, patch_size) =
            map.normals.middleRows(map.index(patch.x, patch.y + y), patch_size);
    }
    return out;
}

PolarizationStack crop(const PolarizationStack& stack, const Patch& patch, Eigen::Index patch_size) {
    require_inside(stack.dims(), patch, patch_size);
    PolarizationStack out;
    out.angles = stack.angles;
    out.mask = stack.mask.block(patch.y, patch.x, patch_size, patch_size);
    for (const auto& plane : stack.images) out.images.emplace_back(plane.block(patch.y, patch.x, patch_size, patch_size));
    return out;
}

StitchResult stitch(const std::vector<PatchOutput>& outputs, Dims dims) {
    Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> sum =
        Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>::Zero(dims.pixels(), 3);
    Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> first(dims.pixels(), 3);
    Plane<int> votes = Plane<int>::Zero(dims.height, dims.width);
    Mask unanimous = Mask::Constant(dims.height, dims.width, true);

    for (const PatchOutput& p : outputs) {
        const Dims pd = p.normals.dims();
        if (p.x < 0 || p.y < 0 || p.x + pd.width > dims.width || p.y + pd.height > dims.height) {
            throw DomainError("patch output at (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                              ") exceeds image " + to_string(dims));
        }
        for (Eigen::Index y = 0; y < pd.height; ++y) {
            for (Eigen::Index x = 0; x < pd.width; ++x) {
                if (!p.normals.valid(x, y)) continue;
                const Eigen::Index i = (p.y + y) * dims.width + p.x + x;
                const auto vote = p.normals.normals.row(p.normals.index(x, y));
                if (votes(p.y + y, p.x + x) == 0) {
                    first.row(i) = vote;
                } else if (first.row(i) != vote) {
                    unanimous(p.y + y, p.x + x) = false;
                }
                sum.row(i) += vote;
                votes(p.y + y, p.x + x) += 1;
            }
        }
    }

    StitchResult result{NormalMapd(dims), Mask::Constant(dims.height, dims.width, false)};
    result.map.mask = votes > 0;
    for (Eigen::Index y = 0; y < dims.height; ++y) {
        for (Eigen::Index x = 0; x < dims.width; ++x) {
            if (votes(y, x) == 0) continue;
            // Identical votes average to themselves; pass them through
            // untouched so single coverage and agreeing patches are exact.
            if (unanimous(y, x)) {
                result.map.normals.row(y * dims.width + x) = first.row(y * dims.width + x);
                continue;
            }
            const Vec3d v = sum.row(y * dims.width + x).transpose();
            const double norm = v.norm();
            if (norm <= 1e-12 * votes(y, x)) {
                result.zero_norm(y, x) = true;
                result.map.set(x, y, Vec3d::UnitZ());
            } else {
                result.map.set(x, y, v / norm);
            }
        }
    }
    return result;
}

StitchResult run_patched(const PolarizationStack& stack, const PatchPlan& plan,
                         const std::function<NormalMapd(const PolarizationStack&, const Patch&)>& estimator) {
    require_same_dims(stack.dims(), plan.dims, "patched inference");
    std::vector<PatchOutput> outputs;
    outputs.reserve(plan.patches.size());
    for (const Patch& p : plan.patches) {
        outputs.push_back({p.x, p.y, estimator(crop(stack, p, plan.patch_size), p)});
    }
    return stitch(outputs, plan.dims);
}

}  // namespace sfp
