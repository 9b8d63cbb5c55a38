#include "sfp/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfp/disambiguation.hpp"
#include "sfp/eval_patch.hpp"
#include "sfp/forward_sim.hpp"
#include "sfp/io.hpp"
#include "sfp/polar_core.hpp"

namespace sfp {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Context {
    std::ostream& out;
    std::ostream& err;
};

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

void print_warnings(const Context& ctx, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) ctx.err << "warning: " << w << "\n";
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io::SaveError(dir, "cannot create directory: " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io::SaveError(path, "cannot open file for writing");
    f << text;
}

Reflection parse_model(const std::string& s) { return s == "specular" ? Reflection::Specular : Reflection::Diffuse; }

RefractiveIndex index_for(const std::optional<double>& flag, const io::Manifest& m) {
    return RefractiveIndex(flag.value_or(m.refractive_index));
}

// --- fit ----------------------------------------------------------------------

struct FitArgs {
    std::string manifest;
    std::string out;
    double eps = FitOptions{}.relative_amplitude_threshold;
};

void run_fit(const Context& ctx, const FitArgs& a) {
    const io::Manifest m = io::read_manifest(a.manifest);
    print_warnings(ctx, m.warnings);
    const PolarizationStack stack = io::load_stack(m);
    const SinusoidFit fit = fit_sinusoid(stack, FitOptions{a.eps});
    const DopMap dop = dop_from_fit(fit);
    const fs::path dir(a.out);
    ensure_dir(dir);
    io::save_plane_pfm(fit.mean, dir / "mean.pfm");
    io::save_plane_pfm(fit.amplitude, dir / "amplitude.pfm");
    io::save_plane_pfm(fit.phase, dir / "phase.pfm");
    io::save_plane_pfm(dop.rho, dir / "dop.pfm");
    io::save_mask_png(fit.low_confidence, dir / "low_confidence.png");
    ctx.out << "fit " << to_string(stack.dims()) << " low_confidence=" << fit.low_confidence.count() << "\n";
}

// --- priors -------------------------------------------------------------------

struct PriorArgs {
    std::string manifest;
    std::string out;
    std::optional<double> n;
    double eps = FitOptions{}.relative_amplitude_threshold;
};

void run_priors(const Context& ctx, const PriorArgs& a) {
    const io::Manifest m = io::read_manifest(a.manifest);
    print_warnings(ctx, m.warnings);
    const PolarizationStack stack = io::load_stack(m);
    const PriorNormals p = compute_priors(stack, index_for(a.n, m), FitOptions{a.eps});
    const fs::path dir(a.out);
    ensure_dir(dir);
    io::save_normal_map(p.diffuse, dir / "n_diff.pfm");
    io::save_normal_map(p.specular_rising, dir / "n_spec1.pfm");
    io::save_normal_map(p.specular_falling, dir / "n_spec2.pfm");
    io::save_mask_png(p.low_confidence, dir / "low_confidence.png");
    ctx.out << "priors " << to_string(stack.dims()) << " low_confidence=" << p.low_confidence.count()
            << " diffuse_saturated=" << p.diffuse_saturated.count()
            << " specular_saturated=" << p.specular_saturated.count() << "\n";
}

// --- synth --------------------------------------------------------------------

struct SynthArgs {
    int radius = 64;
    std::string out;
    std::string dominance = "diffuse";
    double intensity = 0.5;
    double n = RefractiveIndex::kDefault;
    std::string noise = "none";
    double sigma = 0.0;
    double scale = 1.0;
    std::uint64_t seed = 0;
};

void run_synth(const Context& ctx, const SynthArgs& a) {
    const NormalMapd sphere = synth_sphere(a.radius);
    NoiseSpec noise;
    noise.kind = a.noise == "gaussian" ? NoiseKind::Gaussian : a.noise == "poisson" ? NoiseKind::Poisson : NoiseKind::None;
    noise.sigma = a.sigma;
    noise.scale = a.scale;
    noise.seed = a.seed;
    noise.validate();
    (void)RefractiveIndex(a.n);
    const fs::path dir(a.out);
    ensure_dir(dir);
    io::write_uniform_scene(dir / "scene.json", sphere, parse_model(a.dominance), a.intensity, a.n, noise,
                            {0.0, 45.0, 90.0, 135.0});
    ctx.out << "synth sphere r=" << a.radius << " " << to_string(sphere.dims()) << "\n";
}

// --- render -------------------------------------------------------------------

struct RenderArgs {
    std::string scene;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void run_render(const Context& ctx, const RenderArgs& a) {
    io::SceneFile sf = io::read_scene(a.scene);
    print_warnings(ctx, sf.warnings);
    if (a.seed) sf.scene.noise.seed = *a.seed;
    std::vector<double> angles;
    for (double deg : sf.angles_deg) angles.push_back(deg * std::numbers::pi / 180.0);
    const PolarizationStack stack = render_stack(sf.scene, angles);

    const fs::path dir(a.out);
    ensure_dir(dir);
    io::save_normal_map(sf.scene.normals, dir / "truth.pfm");
    io::Manifest m;
    m.truth_normals = "truth.pfm";
    m.lighting = io::Lighting::Synthetic;
    m.refractive_index = sf.scene.n.value();
    io::save_stack(stack, dir / "manifest.json", m);
    ctx.out << "render " << to_string(stack.dims()) << " angles=" << stack.size() << " seed=" << sf.scene.noise.seed
            << "\n";
}

// --- disambiguate -------------------------------------------------------------

struct DisambiguateArgs {
    std::string manifest;
    std::string method = "oracle";
    std::string model = "diffuse";
    std::string truth;
    std::string out;
    std::optional<double> n;
};

void run_disambiguate(const Context& ctx, const DisambiguateArgs& a) {
    const io::Manifest m = io::read_manifest(a.manifest);
    print_warnings(ctx, m.warnings);
    const PolarizationStack stack = io::load_stack(m);
    const SinusoidFit fit = fit_sinusoid(stack);
    const CandidateSet cands = build_candidates(fit, parse_model(a.model), index_for(a.n, m));
    NormalMapd est;
    if (a.method == "oracle") {
        fs::path truth_path;
        if (!a.truth.empty()) {
            truth_path = a.truth;
        } else if (m.truth_normals) {
            truth_path = m.resolve(*m.truth_normals);
        } else {
            throw DomainError("oracle disambiguation needs --truth or a manifest 'truth_normals' entry");
        }
        est = oracle_disambiguate(cands, io::load_normal_map(truth_path));
    } else {
        est = convexity_disambiguate(cands, stack.mask);
    }
    const fs::path out(a.out);
    if (out.has_parent_path()) ensure_dir(out.parent_path());
    io::save_normal_map(est, out);
    ctx.out << "disambiguate " << a.method << " " << to_string(est.dims()) << " valid=" << est.mask.count() << "\n";
}

// --- eval ---------------------------------------------------------------------

struct EvalArgs {
    std::string est;
    std::string truth;
    std::string mask;
    std::string report;
};

void run_eval(const Context& ctx, const EvalArgs& a) {
    NormalMapd est = io::load_normal_map(a.est);
    NormalMapd truth = io::load_normal_map(a.truth);
    require_same_dims(est.dims(), truth.dims(), "eval --est " + a.est + " vs --truth " + a.truth);
    if (!a.mask.empty()) {
        const Mask extra = io::load_mask_png(a.mask);
        require_same_dims(dims_of(extra), est.dims(), "eval --mask " + a.mask + " vs --est " + a.est);
        est.mask = est.mask && extra;
    }
    const AngularErrorReport r = angular_error(est, truth);

    char line[64];
    std::snprintf(line, sizeof line, "%.2f", r.mae_deg);
    ctx.out << line << "\n";

    json j;
    j["est"] = a.est;
    j["truth"] = a.truth;
    if (!a.mask.empty()) j["mask"] = a.mask;
    j["mae_deg"] = r.mae_deg;
    j["pixels"] = r.pixels;
    j["masked_out"] = r.masked_out;
    j["width"] = est.width;
    j["height"] = est.height;
    fs::path report = a.report.empty() ? fs::path(a.est).replace_extension(".eval.json") : fs::path(a.report);
    write_text(report, j.dump(2) + "\n");
}

// --- patchify -----------------------------------------------------------------

struct PatchArgs {
    std::string manifest;
    std::string out;
    int patch = 256;
    int shifts = 32;
    bool crops = false;
    std::string stitch_plan;
    std::string predictions;
    std::string stitched;
};

json plan_to_json(const PatchPlan& plan) {
    json j;
    j["schema_version"] = io::kSchemaVersion;
    j["width"] = plan.dims.width;
    j["height"] = plan.dims.height;
    j["patch_size"] = plan.patch_size;
    json offsets = json::array();
    for (const Offset& o : plan.offsets) offsets.push_back({o.dx, o.dy});
    j["offsets"] = offsets;
    json patches = json::array();
    for (std::size_t i = 0; i < plan.patches.size(); ++i) {
        const Patch& p = plan.patches[i];
        char name[32];
        std::snprintf(name, sizeof name, "patch_%04zu", i);
        patches.push_back({{"name", name}, {"x", p.x}, {"y", p.y}, {"shift", p.shift}});
    }
    j["patches"] = patches;
    return j;
}

void run_patchify(const Context& ctx, const PatchArgs& a) {
    if (!a.stitch_plan.empty()) {
        std::ifstream f(a.stitch_plan);
        if (!f) throw io::LoadError(a.stitch_plan, "cannot open file");
        json j;
        try {
            j = json::parse(f);
        } catch (const json::parse_error& e) {
            throw io::DecodeError(a.stitch_plan, e.byte, "invalid JSON");
        }
        const Dims d{j.at("width").get<Eigen::Index>(), j.at("height").get<Eigen::Index>()};
        const fs::path pred_dir = a.predictions.empty() ? fs::path(a.stitch_plan).parent_path() : fs::path(a.predictions);
        std::vector<PatchOutput> outputs;
        for (const auto& p : j.at("patches")) {
            const fs::path file = pred_dir / (p.at("name").get<std::string>() + ".pfm");
            outputs.push_back({p.at("x").get<Eigen::Index>(), p.at("y").get<Eigen::Index>(), io::load_normal_map(file)});
        }
        const StitchResult r = stitch(outputs, d);
        const fs::path out(a.stitched);
        if (out.has_parent_path()) ensure_dir(out.parent_path());
        io::save_normal_map(r.map, out);
        ctx.out << "stitch " << outputs.size() << " patches " << to_string(d) << " zero_norm=" << r.zero_norm.count()
                << "\n";
        return;
    }

    const io::Manifest m = io::read_manifest(a.manifest);
    print_warnings(ctx, m.warnings);
    const PolarizationStack stack = io::load_stack(m);
    const PatchPlan plan = make_patch_plan(stack.dims(), a.patch, a.shifts);
    const fs::path dir(a.out);
    ensure_dir(dir);
    const json pj = plan_to_json(plan);
    write_text(dir / "plan.json", pj.dump(2) + "\n");
    if (a.crops) {
        std::optional<NormalMapd> truth;
        if (m.truth_normals) truth = io::load_normal_map(m.resolve(*m.truth_normals));
        for (std::size_t i = 0; i < plan.patches.size(); ++i) {
            const fs::path pdir = dir / pj["patches"][i]["name"].get<std::string>();
            ensure_dir(pdir);
            io::Manifest pm;
            pm.lighting = m.lighting;
            pm.refractive_index = m.refractive_index;
            if (truth) {
                io::save_normal_map(crop(*truth, plan.patches[i], plan.patch_size), pdir / "truth.pfm");
                pm.truth_normals = "truth.pfm";
            }
            io::save_stack(crop(stack, plan.patches[i], plan.patch_size), pdir / "manifest.json", pm);
        }
    }
    ctx.out << "patchify " << to_string(plan.dims) << " patch=" << plan.patch_size << " shifts=" << plan.offsets.size()
            << " patches=" << plan.patches.size() << "\n";
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const Context ctx{out, err};
    CLI::App app{"Shape-from-polarization toolkit", "sfp"};
    app.require_subcommand(1);

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit the polarizer sinusoid per pixel");
    fit->add_option("--manifest", fit_args.manifest, "Stack manifest")->required();
    fit->add_option("--out", fit_args.out, "Output directory")->required();
    fit->add_option("--eps", fit_args.eps, "Relative amplitude threshold for low confidence");

    PriorArgs prior_args;
    auto* priors = app.add_subcommand("priors", "Compute the diffuse and two specular prior normal maps");
    priors->add_option("--manifest", prior_args.manifest, "Stack manifest")->required();
    priors->add_option("--out", prior_args.out, "Output directory")->required();
    priors->add_option("--n", prior_args.n, "Refractive index (default: manifest value)");
    priors->add_option("--eps", prior_args.eps, "Relative amplitude threshold for low confidence");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Write a synthetic sphere scene");
    synth->add_option("--radius", synth_args.radius, "Sphere radius in pixels")->check(CLI::Range(4, 1 << 14));
    synth->add_option("--out", synth_args.out, "Output directory")->required();
    synth->add_option("--dominance", synth_args.dominance)->check(CLI::IsMember({"diffuse", "specular"}));
    synth->add_option("--intensity", synth_args.intensity, "Unpolarized intensity");
    synth->add_option("--n", synth_args.n, "Refractive index");
    synth->add_option("--noise", synth_args.noise)->check(CLI::IsMember({"none", "gaussian", "poisson"}));
    synth->add_option("--sigma", synth_args.sigma, "Gaussian noise sigma");
    synth->add_option("--scale", synth_args.scale, "Poisson photons per unit intensity");
    synth->add_option("--seed", synth_args.seed, "Noise seed");

    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "Render a polarization stack from a scene file");
    render->add_option("--scene", render_args.scene, "Scene JSON")->required();
    render->add_option("--out", render_args.out, "Output directory")->required();
    render->add_option("--seed", render_args.seed, "Override the scene's noise seed");

    DisambiguateArgs dis_args;
    auto* dis = app.add_subcommand("disambiguate", "Resolve the ambiguous normals to one map");
    dis->add_option("--manifest", dis_args.manifest, "Stack manifest")->required();
    dis->add_option("--method", dis_args.method)->check(CLI::IsMember({"oracle", "convexity"}));
    dis->add_option("--model", dis_args.model)->check(CLI::IsMember({"diffuse", "specular"}));
    dis->add_option("--truth", dis_args.truth, "Ground-truth normals for the oracle");
    dis->add_option("--out", dis_args.out, "Output PFM")->required();
    dis->add_option("--n", dis_args.n, "Refractive index (default: manifest value)");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Mean angular error between two normal maps");
    eval->add_option("--est", eval_args.est, "Estimated normals PFM")->required();
    eval->add_option("--truth", eval_args.truth, "Ground-truth normals PFM")->required();
    eval->add_option("--mask", eval_args.mask, "Extra evaluation mask PNG");
    eval->add_option("--report", eval_args.report, "JSON report path (default: <est>.eval.json)");

    PatchArgs patch_args;
    auto* patchify = app.add_subcommand("patchify", "Plan shifted patch tilings, write crops, or stitch predictions");
    patchify->add_option("--manifest", patch_args.manifest, "Stack manifest");
    patchify->add_option("--out", patch_args.out, "Output directory for plan.json and crops");
    patchify->add_option("--patch", patch_args.patch, "Patch size")->check(CLI::PositiveNumber);
    patchify->add_option("--shifts", patch_args.shifts, "Number of diagonal shifts")->check(CLI::PositiveNumber);
    patchify->add_flag("--crops", patch_args.crops, "Write a cropped manifest per patch");
    patchify->add_option("--stitch", patch_args.stitch_plan, "Stitch predictions listed in this plan.json");
    patchify->add_option("--predictions", patch_args.predictions, "Directory holding <patch name>.pfm predictions");
    patchify->add_option("--stitched", patch_args.stitched, "Output PFM for --stitch");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (patchify->parsed()) {
            const bool stitching = !patch_args.stitch_plan.empty();
            if (stitching && patch_args.stitched.empty()) throw CLI::RequiredError("--stitched");
            if (!stitching && (patch_args.manifest.empty() || patch_args.out.empty())) {
                throw CLI::RequiredError("--manifest and --out");
            }
        }
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << "\n";
        const CLI::App* sub = nullptr;
        for (const auto* s : app.get_subcommands()) sub = s;
        err << (sub ? sub->help() : app.help());
        return 2;
    }

    try {
        if (fit->parsed()) run_fit(ctx, fit_args);
        if (priors->parsed()) run_priors(ctx, prior_args);
        if (synth->parsed()) run_synth(ctx, synth_args);
        if (render->parsed()) run_render(ctx, render_args);
        if (dis->parsed()) run_disambiguate(ctx, dis_args);
        if (eval->parsed()) run_eval(ctx, eval_args);
        if (patchify->parsed()) run_patchify(ctx, patch_args);
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << one_line(e.what()) << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 0;
}

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_dispatch(args, out, err);
}

}  // namespace sfp
