#include "sfp/forward_sim.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "sfp/angles.hpp"

namespace sfp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Eigen::Index kNoiseTileRows = 16;

double noisy(double value, const NoiseSpec& noise, std::mt19937_64& rng) {
    switch (noise.kind) {
        case NoiseKind::None:
            return value;
        case NoiseKind::Gaussian: {
            std::normal_distribution<double> gauss(0.0, noise.sigma);
            return std::max(0.0, value + gauss(rng));
        }
        case NoiseKind::Poisson: {
            const double photons = value * noise.scale;
            if (photons <= 0.0) return 0.0;
            std::poisson_distribution<long long> poisson(photons);
            return static_cast<double>(poisson(rng)) / noise.scale;
        }
    }
    return value;
}

}  // namespace

void NoiseSpec::validate() const {
    if (!(sigma >= 0.0)) throw DomainError("noise sigma must be >= 0");
    if (!(scale > 0.0)) throw DomainError("noise scale must be > 0");
}

void SceneSpec::validate() const {
    const Dims d = dims();
    require_same_dims(dims_of(normals.mask), d, "scene mask");
    require_same_dims(dims_of(dominance), d, "scene dominance labels");
    require_same_dims(dims_of(unpolarized_intensity), d, "scene unpolarized intensity");
    noise.validate();
    if ((normals.mask && !(unpolarized_intensity.isFinite() && unpolarized_intensity >= 0.0)).any()) {
        throw DomainError("unpolarized intensity must be finite and >= 0 on masked-in pixels");
    }
}

SceneSpec SceneSpec::uniform(NormalMapd normals, Reflection dominance, double intensity, RefractiveIndex n,
                             NoiseSpec noise) {
    const Dims d = normals.dims();
    SceneSpec s{std::move(normals), n, ReflectionMap::Constant(d.height, d.width, dominance),
                Planed::Constant(d.height, d.width, intensity), noise};
    return s;
}

std::vector<double> canonical_angles() { return {0.0, kPi / 4, kPi / 2, 3 * kPi / 4}; }

std::uint64_t tile_seed(std::uint64_t seed, std::uint64_t tile) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tile + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

PolarizationStack render_stack(const SceneSpec& scene, const std::vector<double>& angles) {
    scene.validate();
    const Dims d = scene.dims();

    PolarizationStack stack;
    stack.angles = angles;
    stack.mask = scene.normals.mask;
    stack.images.assign(angles.size(), Planed::Zero(d.height, d.width));
    validate_polarizer_angles(angles);

    for_each_row_tile(d.height, kNoiseTileRows, [&](Eigen::Index y0, Eigen::Index y1, Eigen::Index tile) {
        std::mt19937_64 rng(tile_seed(scene.noise.seed, static_cast<std::uint64_t>(tile)));
        for (Eigen::Index y = y0; y < y1; ++y) {
            for (Eigen::Index x = 0; x < d.width; ++x) {
                if (!scene.normals.valid(x, y)) continue;
                const auto sph = normal_to_angles(scene.normals.at(x, y));
                const bool diffuse = scene.dominance(y, x) == Reflection::Diffuse;
                const double rho = diffuse ? diffuse_dop_forward(sph.zenith, scene.n)
                                           : specular_dop_forward(sph.zenith, scene.n);
                const double phase = diffuse ? fold_angle(sph.azimuth, kPi)
                                             : fold_angle(sph.azimuth - kPi / 2, kPi);
                const double mean = scene.unpolarized_intensity(y, x);
                for (std::size_t i = 0; i < angles.size(); ++i) {
                    const double clean = mean + mean * rho * std::cos(2.0 * (angles[i] - phase));
                    stack.images[i](y, x) = noisy(clean, scene.noise, rng);
                }
            }
        }
    });
    return stack;
}

NormalMapd synth_sphere(int radius_px) {
    if (radius_px < 4) throw DomainError("sphere radius must be >= 4 pixels, got " + std::to_string(radius_px));
    const Eigen::Index size = 2 * radius_px + 1;
    const double r = radius_px;
    NormalMapd map(size, size);
    for (Eigen::Index y = 0; y < size; ++y) {
        for (Eigen::Index x = 0; x < size; ++x) {
            const double dx = (static_cast<double>(x) - r) / r;
            const double dy = (static_cast<double>(y) - r) / r;
            const double rr = dx * dx + dy * dy;
            const bool inside = rr <= 1.0;
            map.mask(y, x) = inside;
            if (inside) map.set(x, y, Vec3d(dx, dy, std::sqrt(std::max(0.0, 1.0 - rr))).normalized());
        }
    }
    return map;
}

}  // namespace sfp
