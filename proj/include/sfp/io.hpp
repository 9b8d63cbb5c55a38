#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sfp/forward_sim.hpp"
#include "sfp/image.hpp"
#include "sfp/polar_core.hpp"

namespace sfp::io {

/// A file could not be read or did not match what its manifest promised.
struct LoadError : Error {
    LoadError(const std::filesystem::path& path, const std::string& what)
        : Error("load", path.string() + ": " + what), path(path) {}
    std::filesystem::path path;
};

/// Malformed file content; `offset` is the byte position where decoding
/// stopped.
struct DecodeError : Error {
    DecodeError(const std::filesystem::path& path, std::size_t offset, const std::string& what)
        : Error("decode", path.string() + ": " + what + " at byte " + std::to_string(offset)),
          path(path),
          offset(offset) {}
    std::filesystem::path path;
    std::size_t offset;
};

struct SaveError : Error {
    SaveError(const std::filesystem::path& path, const std::string& what)
        : Error("save", path.string() + ": " + what) {}
};

// --- PFM ------------------------------------------------------------------
// Portable float map: "PF" (3 channels) or "Pf" (1 channel), width height,
// scale whose sign gives endianness (negative = little-endian), then rows
// bottom to top. Files are always written little-endian.

struct PfmImage {
    Eigen::Index width = 0;
    Eigen::Index height = 0;
    int channels = 1;
    std::vector<float> data;  // top-to-bottom rows, interleaved channels
};

PfmImage read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const PfmImage& image);

/// Companion mask path: "x/foo.pfm" -> "x/foo.mask.png".
std::filesystem::path mask_path_for(const std::filesystem::path& pfm_path);

/// Writes the normals as a 3-channel PFM and the mask as a companion 8-bit
/// PNG. Refuses NaN on masked-in pixels. Values are stored as float32, so
/// load(save(m)) is bit-exact for float-representable maps.
void save_normal_map(const NormalMapd& map, const std::filesystem::path& path);

/// Loads a 3-channel PFM and its companion mask (all-in when absent).
NormalMapd load_normal_map(const std::filesystem::path& path);

void save_plane_pfm(const Planed& plane, const std::filesystem::path& path);
Planed load_plane_pfm(const std::filesystem::path& path);

// --- PNG ------------------------------------------------------------------

/// Grayscale PNG as linear intensities value / (2^bitdepth - 1). Only 8 and
/// 16 bit single-channel images are accepted.
Planed load_gray_png(const std::filesystem::path& path);

/// Quantizes [0, 1] intensities to a 16-bit grayscale PNG (values clamped).
void save_gray_png16(const Planed& plane, const std::filesystem::path& path);

/// Nonzero samples are masked in.
Mask load_mask_png(const std::filesystem::path& path);
void save_mask_png(const Mask& mask, const std::filesystem::path& path);

// --- Manifests --------------------------------------------------------------

enum class Lighting { Indoor, Overcast, Sunlight, Synthetic };

std::string to_string(Lighting l);
Lighting lighting_from_string(const std::string& s);

inline constexpr int kSchemaVersion = 1;

/// JSON description of one captured or rendered polarization stack. Paths
/// are stored relative to the manifest's directory.
struct Manifest {
    int schema_version = kSchemaVersion;
    std::vector<double> angles_deg;
    std::vector<std::filesystem::path> images;
    std::optional<std::filesystem::path> truth_normals;
    std::optional<std::filesystem::path> mask;
    Lighting lighting = Lighting::Synthetic;
    double refractive_index = 1.5;
    bool gamma = false;  // apply x^2.2 linearization on load

    /// Directory the relative paths resolve against.
    std::filesystem::path base_dir;
    /// Unknown keys seen while parsing.
    std::vector<std::string> warnings;

    std::filesystem::path resolve(const std::filesystem::path& p) const { return base_dir / p; }
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Decodes every referenced image into a stack; angles converted to radians.
PolarizationStack load_stack(const Manifest& manifest);
PolarizationStack load_stack(const std::filesystem::path& manifest_path);

/// Writes each plane as a 16-bit PNG next to `manifest_path` and the
/// manifest itself, creating the directory if needed. Returns the written
/// manifest.
Manifest save_stack(const PolarizationStack& stack, const std::filesystem::path& manifest_path,
                    Manifest base = {});

/// Scene description for the renderer.
///
/// {"schema_version": 1, "normals": "truth.pfm", "refractive_index": 1.5,
///  "dominance": "diffuse" | "specular" | "labels.png",
///  "unpolarized_intensity": 0.5 | "intensity.png",
///  "angles_deg": [0, 45, 90, 135],
///  "noise": {"kind": "none" | "gaussian" | "poisson", "sigma": 0, "scale": 1, "seed": 0}}
///
/// Label PNGs: 0 = diffuse, nonzero = specular.
struct SceneFile {
    SceneSpec scene;
    std::vector<double> angles_deg;
    std::vector<std::string> warnings;
};

SceneFile read_scene(const std::filesystem::path& path);

/// Writes a scene with uniform dominance and intensity; `normals` is written
/// next to the scene file as "normals.pfm".
void write_uniform_scene(const std::filesystem::path& path, const NormalMapd& normals, Reflection dominance,
                         double intensity, double refractive_index, const NoiseSpec& noise,
                         const std::vector<double>& angles_deg);

}  // namespace sfp::io
