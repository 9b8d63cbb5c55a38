// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Run single-threaded for the timing criterion (ctest sets
// SFP_THREADS=1).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sfp/angles.hpp"
#include "sfp/cli.hpp"
#include "sfp/disambiguation.hpp"
#include "sfp/eval_patch.hpp"
#include "sfp/forward_sim.hpp"
#include "sfp/io.hpp"
#include "temp_dir.hpp"

using namespace sfp;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

int failures = 0;

void report(const char* name, bool pass, const std::string& detail) {
    std::printf("%s  %-28s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

NormalMapd diffuse_oracle(const PolarizationStack& stack, const NormalMapd& truth) {
    return oracle_disambiguate(build_candidates(fit_sinusoid(stack), Reflection::Diffuse), truth);
}

void diffuse_round_trip() {
    const auto t0 = std::chrono::steady_clock::now();
    const NormalMapd truth = synth_sphere(128);
    const auto stack = render_stack(SceneSpec::uniform(truth, Reflection::Diffuse, 0.5), canonical_angles());
    const NormalMapd est = diffuse_oracle(stack, truth);
    const double elapsed = seconds_since(t0);

    NormalMapd graded = est;
    for (Eigen::Index y = 0; y < truth.height; ++y)
        for (Eigen::Index x = 0; x < truth.width; ++x)
            if (truth.valid(x, y) && normal_to_angles(truth.at(x, y)).zenith >= 75 * kDeg) graded.mask(y, x) = false;
    const auto r = angular_error(graded, truth);
    report("diffuse-round-trip", r.mae_deg < 0.05 && elapsed < 5.0,
           fmt("MAE %.2e deg over %zu px (< 0.05), %.2f s (< 5 s, %d thread)", r.mae_deg, r.pixels, elapsed,
               thread_count()));
}

void specular_sphere() {
    const NormalMapd truth = synth_sphere(128);
    const RefractiveIndex n;
    const auto stack = render_stack(SceneSpec::uniform(truth, Reflection::Specular, 0.5, n), canonical_angles());
    const DopMap dop = dop_from_fit(fit_sinusoid(stack));
    const SpecularInverter<double> inv(n);
    std::size_t total = 0, hit = 0;
    for (Eigen::Index y = 0; y < truth.height; ++y) {
        for (Eigen::Index x = 0; x < truth.width; ++x) {
            if (!truth.valid(x, y)) continue;
            ++total;
            const double z = normal_to_angles(truth.at(x, y)).zenith;
            const auto zs = inv(dop.rho(y, x));
            if (std::min(std::abs(zs.rising - z), std::abs(zs.falling - z)) <= 0.1 * kDeg) ++hit;
        }
    }
    const double frac = double(hit) / double(total);

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, inv.peak_rho());
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double rho = u(rng);
        const auto zs = inv(rho);
        worst = std::max({worst, std::abs(specular_dop_forward(zs.rising, n) - rho),
                          std::abs(specular_dop_forward(zs.falling, n) - rho)});
    }
    report("specular-sphere", frac >= 0.999 && worst <= 1e-10,
           fmt("%.4f%% of %zu px within 0.1 deg (>= 99.9%%), rho residual %.1e (<= 1e-10)", 100 * frac, total, worst));
}

void forward_inverse() {
    const RefractiveIndex n;
    const SpecularInverter<double> inv(n);
    constexpr int grid = 10000;
    double worst_d = 0.0, worst_s = 0.0;
    bool monotone = true;
    int turns = 0, last_sign = 0;
    double prev_d = 0.0, prev_s = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double t = i * (kPi / 2) / grid;
        const double d = diffuse_dop_forward(t, n);
        const double s = specular_dop_forward(t, n);
        worst_d = std::max(worst_d, std::abs(diffuse_zenith_inverse(d, n).theta - t));
        const auto zs = inv(s);
        worst_s = std::max(worst_s, std::abs((t <= inv.peak_theta() ? zs.rising : zs.falling) - t));
        if (i > 0) {
            monotone = monotone && d >= prev_d;
            const int sign = s > prev_s ? 1 : (s < prev_s ? -1 : 0);
            if (sign != 0) {
                if (last_sign != 0 && sign != last_sign) ++turns;
                last_sign = sign;
            }
        }
        prev_d = d;
        prev_s = s;
    }
    report("forward-inverse", worst_d <= 1e-6 && worst_s <= 1e-6 && monotone && turns == 1,
           fmt("max |inv(fwd(t)) - t| diffuse %.1e, specular %.1e (<= 1e-6); diffuse monotone %s, specular turns %d",
               worst_d, worst_s, monotone ? "yes" : "no", turns));
}

void stokes_equivalence() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> mean(0.05, 1.0), frac(0.0, 1.0), phase(0.0, kPi);
    PolarizationStack stack;
    stack.angles = canonical_angles();
    stack.mask = Mask::Constant(10, 100, true);
    for (int k = 0; k < 4; ++k) stack.images.emplace_back(10, 100);
    for (Eigen::Index y = 0; y < 10; ++y) {
        for (Eigen::Index x = 0; x < 100; ++x) {
            const double m = mean(rng), a = m * frac(rng), p = phase(rng);
            for (int k = 0; k < 4; ++k) stack.images[k](y, x) = m + a * std::cos(2 * (stack.angles[k] - p));
        }
    }
    const auto ls = fit_sinusoid(stack);
    const auto st = fit_sinusoid_stokes(stack);
    double worst = 0.0;
    for (Eigen::Index y = 0; y < 10; ++y) {
        for (Eigen::Index x = 0; x < 100; ++x) {
            const double dp = std::abs(ls.phase(y, x) - st.phase(y, x));
            worst = std::max({worst, std::abs(ls.mean(y, x) - st.mean(y, x)),
                              std::abs(ls.amplitude(y, x) - st.amplitude(y, x)),
                              ls.low_confidence(y, x) ? 0.0 : std::min(dp, kPi - dp)});
        }
    }
    report("stokes-equivalence", worst <= 1e-12, fmt("max deviation %.1e over 1000 px (<= 1e-12)", worst));
}

void poisson_scaling() {
    NormalMapd pixel(1, 1);
    auto spread = [&](double scale) {
        double sum = 0.0, sum2 = 0.0;
        constexpr int trials = 1000;
        for (int t = 0; t < trials; ++t) {
            NoiseSpec noise{NoiseKind::Poisson, 0.0, scale, static_cast<std::uint64_t>(t)};
            const auto s = render_stack(SceneSpec::uniform(pixel, Reflection::Diffuse, 0.5, RefractiveIndex(), noise),
                                        canonical_angles());
            const double v = s.images[0](0, 0);
            sum += v;
            sum2 += v * v;
        }
        const double m = sum / trials;
        return std::sqrt((sum2 / trials - m * m) * trials / (trials - 1));
    };
    const double ratio = spread(1e4) / spread(1e5);
    report("poisson-scaling", std::abs(ratio / std::sqrt(10.0) - 1.0) <= 0.2,
           fmt("std ratio %.3f for 10x photons (sqrt(10) = %.3f +- 20%%)", ratio, std::sqrt(10.0)));
}

void patch_protocol() {
    const NormalMapd truth = synth_sphere(128);
    const auto plan = make_patch_plan(truth.dims(), 128, 32);

    std::vector<PatchOutput> pieces;
    for (const auto& p : plan.patches) pieces.push_back({p.x, p.y, crop(truth, p, plan.patch_size)});
    const auto ident = stitch(pieces, truth.dims());
    bool exact = (ident.map.mask == truth.mask).all();
    for (Eigen::Index i = 0; exact && i < truth.normals.rows(); ++i)
        if (truth.mask(i / truth.width, i % truth.width)) exact = truth.normals.row(i) == ident.map.normals.row(i);

    const int min_cover = plan.coverage().minCoeff();

    const auto stack = render_stack(SceneSpec::uniform(truth, Reflection::Diffuse, 0.5), canonical_angles());
    const double whole = mean_angular_error(diffuse_oracle(stack, truth), truth);
    const auto patched = run_patched(stack, plan, [&](const PolarizationStack& s, const Patch& p) {
        return diffuse_oracle(s, crop(truth, p, plan.patch_size));
    });
    const double stitched = mean_angular_error(patched.map, truth);
    report("patch-protocol", exact && min_cover >= 32 && std::abs(stitched - whole) <= 0.01,
           fmt("identity %s; %zu patches, min coverage %d (32 shifts); MAE %.2e vs %.2e deg (|diff| <= 0.01)",
               exact ? "exact" : "INEXACT", plan.patches.size(), min_cover, stitched, whole));
}

void io_round_trips() {
    TempDir dir;
    // PFM: float-representable map, compared value-wise and byte-wise.
    const NormalMapd map = synth_sphere(20).cast<float>().cast<double>();
    io::save_normal_map(map, dir / "a.pfm");
    const NormalMapd back = io::load_normal_map(dir / "a.pfm");
    bool pfm = (back.mask == map.mask).all();
    for (Eigen::Index i = 0; pfm && i < map.normals.rows(); ++i)
        if (map.mask(i / map.width, i % map.width)) pfm = back.normals.row(i) == map.normals.row(i);
    io::save_normal_map(back, dir / "b.pfm");
    pfm = pfm && read_file(dir / "a.pfm") == read_file(dir / "b.pfm");

    // PNG: 16-bit quantized intensities survive exactly.
    Planed plane(33, 17);
    for (Eigen::Index i = 0; i < plane.size(); ++i) plane.data()[i] = double((i * 2654435761u) % 65536) / 65535.0;
    io::save_gray_png16(plane, dir / "p.png");
    const Planed pback = io::load_gray_png(dir / "p.png");
    io::save_gray_png16(pback, dir / "q.png");
    const bool png = (pback == plane).all() && read_file(dir / "p.png") == read_file(dir / "q.png");

    // Manifest: write, read, write again.
    const auto stack = render_stack(SceneSpec::uniform(synth_sphere(8), Reflection::Diffuse, 0.5), canonical_angles());
    io::save_stack(stack, dir / "m/manifest.json");
    const auto m = io::read_manifest(dir / "m/manifest.json");
    io::write_manifest(m, dir / "m/copy.json");
    const auto reloaded = io::load_stack(m);
    bool manifest = read_file(dir / "m/manifest.json") == read_file(dir / "m/copy.json") && m.warnings.empty();
    for (std::size_t k = 0; k < stack.size(); ++k) {
        manifest = manifest && reloaded.angles[k] == stack.angles[k];
        Planed q = stack.images[k].unaryExpr([](double v) { return std::round(v * 65535.0) / 65535.0; });
        manifest = manifest && (reloaded.images[k] == q).all();
    }

    // CLI determinism.
    std::ostringstream sink;
    auto run = [&](std::vector<std::string> args) { return cli_dispatch(args, sink, sink); };
    bool cli = run({"synth", "--radius", "32", "--noise", "poisson", "--scale", "1000", "--out", (dir / "s").string()}) == 0;
    for (const char* out : {"r1", "r2"})
        cli = cli && run({"render", "--scene", (dir / "s/scene.json").string(), "--seed", "7", "--out",
                          (dir / out).string()}) == 0;
    for (const char* f : {"manifest.json", "mask.png", "truth.pfm", "truth.mask.png", "pol_000.png", "pol_001.png",
                          "pol_002.png", "pol_003.png"})
        cli = cli && read_file(dir / "r1" / f) == read_file(dir / "r2" / f) && !read_file(dir / "r1" / f).empty();

    report("io-round-trips", pfm && png && manifest && cli,
           fmt("PFM %s, PNG %s, manifest %s, CLI seed-deterministic %s", pfm ? "exact" : "MISMATCH",
               png ? "exact" : "MISMATCH", manifest ? "exact" : "MISMATCH", cli ? "yes" : "NO"));
}

}  // namespace

int main() {
    const std::pair<const char*, void (*)()> checks[] = {
        {"diffuse-round-trip", diffuse_round_trip}, {"specular-sphere", specular_sphere},
        {"forward-inverse", forward_inverse},       {"stokes-equivalence", stokes_equivalence},
        {"poisson-scaling", poisson_scaling},       {"patch-protocol", patch_protocol},
        {"io-round-trips", io_round_trips},
    };
    for (const auto& [name, fn] : checks) {
        try {
            fn();
        } catch (const std::exception& e) {
            report(name, false, std::string("threw: ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, std::size(checks));
    return failures == 0 ? 0 : 1;
}
