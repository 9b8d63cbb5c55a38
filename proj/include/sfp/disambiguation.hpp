#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sfp/forward_sim.hpp"
#include "sfp/image.hpp"
#include "sfp/polar_core.hpp"

namespace sfp {

/// Variable-length list of candidate unit normals per pixel, stored
/// contiguously: candidates of pixel i are [offsets[i], offsets[i+1]).
class CandidateSet {
public:
    CandidateSet() = default;
    explicit CandidateSet(Dims dims);

    Dims dims() const { return dims_; }
    const Mask& mask() const { return mask_; }

    /// Candidates must be appended in pixel order.
    void push_pixel(std::span<const Vec3d> candidates, bool valid);

    std::span<const Vec3d> at(Eigen::Index x, Eigen::Index y) const;
    bool complete() const { return offsets_.size() == static_cast<std::size_t>(dims_.pixels()) + 1; }

private:
    Dims dims_;
    Mask mask_;
    std::vector<std::uint32_t> offsets_{0};
    std::vector<Vec3d> normals_;
};

/// Candidates from one reflection model: 2 (azimuth flip) for diffuse, 4
/// (azimuth flip x two zeniths) for specular, ordered rising zenith first.
/// Low-confidence pixels get the single candidate (0, 0, 1) and are masked
/// out.
CandidateSet build_candidates(const SinusoidFit& fit, Reflection model, const RefractiveIndex& n = RefractiveIndex());

/// Per-pixel model choice, e.g. the dominance labels of a synthetic scene.
CandidateSet build_candidates(const SinusoidFit& fit, const ReflectionMap& models,
                              const RefractiveIndex& n = RefractiveIndex());

/// Picks the candidate closest to the ground truth. This is the error floor
/// of the physics-only pipeline.
NormalMapd oracle_disambiguate(const CandidateSet& candidates, const NormalMapd& truth);

/// Picks the first candidate whose image-plane component points away from
/// the mask centroid, falling back to the first candidate. Only meaningful
/// for a single convex blob; concave silhouettes get wrong but valid output.
NormalMapd convexity_disambiguate(const CandidateSet& candidates, const Mask& mask);

}  // namespace sfp
