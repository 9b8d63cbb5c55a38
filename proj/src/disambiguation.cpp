#include "sfp/disambiguation.hpp"

#include <array>
#include <limits>
#include <stdexcept>

#include "sfp/angles.hpp"

namespace sfp {

CandidateSet::CandidateSet(Dims dims) : dims_(dims), mask_(Mask::Constant(dims.height, dims.width, false)) {
    offsets_.reserve(static_cast<std::size_t>(dims.pixels()) + 1);
}

void CandidateSet::push_pixel(std::span<const Vec3d> candidates, bool valid) {
    const auto pixel = static_cast<Eigen::Index>(offsets_.size()) - 1;
    if (pixel >= dims_.pixels()) throw std::logic_error("CandidateSet: more pixels than dimensions allow");
    if (valid && candidates.empty()) throw std::logic_error("CandidateSet: empty candidate list on a valid pixel");
    normals_.insert(normals_.end(), candidates.begin(), candidates.end());
    offsets_.push_back(static_cast<std::uint32_t>(normals_.size()));
    mask_(pixel / dims_.width, pixel % dims_.width) = valid;
}

std::span<const Vec3d> CandidateSet::at(Eigen::Index x, Eigen::Index y) const {
    const auto i = static_cast<std::size_t>(y * dims_.width + x);
    return std::span<const Vec3d>(normals_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

namespace {

template <typename ModelAt>
CandidateSet build(const SinusoidFit& fit, const RefractiveIndex& n, ModelAt&& model_at) {
    const Dims d = fit.dims();
    const DopMap dop = dop_from_fit(fit);
    const SpecularInverter<double> specular(n);
    CandidateSet set(d);
    std::array<Vec3d, 4> buf;
    for (Eigen::Index y = 0; y < d.height; ++y) {
        for (Eigen::Index x = 0; x < d.width; ++x) {
            const bool valid = fit.mask(y, x) && !fit.low_confidence(y, x);
            if (!valid) {
                buf[0] = Vec3d::UnitZ();
                set.push_pixel(std::span(buf.data(), 1), false);
                continue;
            }
            const Reflection model = model_at(x, y);
            const auto az = azimuth_candidates(fit.phase(y, x), model);
            const double rho = dop.rho(y, x);
            if (model == Reflection::Diffuse) {
                const double zenith = diffuse_zenith_inverse(rho, n).theta;
                buf[0] = angles_to_normal(az[0], zenith);
                buf[1] = angles_to_normal(az[1], zenith);
                set.push_pixel(std::span(buf.data(), 2), true);
            } else {
                const auto z = specular(rho);
                buf[0] = angles_to_normal(az[0], z.rising);
                buf[1] = angles_to_normal(az[1], z.rising);
                buf[2] = angles_to_normal(az[0], z.falling);
                buf[3] = angles_to_normal(az[1], z.falling);
                set.push_pixel(std::span(buf.data(), 4), true);
            }
        }
    }
    return set;
}

}  // namespace

CandidateSet build_candidates(const SinusoidFit& fit, Reflection model, const RefractiveIndex& n) {
    return build(fit, n, [model](Eigen::Index, Eigen::Index) { return model; });
}

CandidateSet build_candidates(const SinusoidFit& fit, const ReflectionMap& models, const RefractiveIndex& n) {
    require_same_dims(fit.dims(), dims_of(models), "candidate models");
    return build(fit, n, [&models](Eigen::Index x, Eigen::Index y) { return models(y, x); });
}

NormalMapd oracle_disambiguate(const CandidateSet& candidates, const NormalMapd& truth) {
    require_same_dims(candidates.dims(), truth.dims(), "oracle disambiguation");
    const Dims d = candidates.dims();
    NormalMapd out(d);
    out.mask = candidates.mask() && truth.mask;
    for_each_row_tile(d.height, 32, [&](Eigen::Index y0, Eigen::Index y1, Eigen::Index) {
        for (Eigen::Index y = y0; y < y1; ++y) {
            for (Eigen::Index x = 0; x < d.width; ++x) {
                const auto list = candidates.at(x, y);
                if (candidates.mask()(y, x) && list.empty()) {
                    throw std::logic_error("oracle_disambiguate: empty candidate list on a masked-in pixel");
                }
                if (list.empty()) continue;
                if (!truth.valid(x, y)) {
                    out.set(x, y, list.front());
                    continue;
                }
                const Vec3d t = truth.at(x, y);
                std::size_t best = 0;
                double best_dot = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < list.size(); ++i) {
                    const double dot = list[i].dot(t);
                    if (dot > best_dot) {
                        best_dot = dot;
                        best = i;
                    }
                }
                out.set(x, y, list[best]);
            }
        }
    });
    return out;
}

NormalMapd convexity_disambiguate(const CandidateSet& candidates, const Mask& mask) {
    require_same_dims(candidates.dims(), dims_of(mask), "convexity disambiguation");
    const Dims d = candidates.dims();
    const auto count = mask.count();
    if (count == 0) throw DomainError("convexity disambiguation needs a non-empty mask");

    double cx = 0.0;
    double cy = 0.0;
    for (Eigen::Index y = 0; y < d.height; ++y) {
        for (Eigen::Index x = 0; x < d.width; ++x) {
            if (mask(y, x)) {
                cx += static_cast<double>(x);
                cy += static_cast<double>(y);
            }
        }
    }
    cx /= static_cast<double>(count);
    cy /= static_cast<double>(count);

    NormalMapd out(d);
    out.mask = candidates.mask() && mask;
    for_each_row_tile(d.height, 32, [&](Eigen::Index y0, Eigen::Index y1, Eigen::Index) {
        for (Eigen::Index y = y0; y < y1; ++y) {
            for (Eigen::Index x = 0; x < d.width; ++x) {
                const auto list = candidates.at(x, y);
                if (list.empty()) continue;
                const double ox = static_cast<double>(x) - cx;
                const double oy = static_cast<double>(y) - cy;
                Vec3d chosen = list.front();
                for (const Vec3d& c : list) {
                    if (c.x() * ox + c.y() * oy > 0.0) {
                        chosen = c;
                        break;
                    }
                }
                out.set(x, y, chosen);
            }
        }
    });
    return out;
}

}  // namespace sfp
