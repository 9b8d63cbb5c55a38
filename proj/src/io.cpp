#include "sfp/io.hpp"

#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include <png.h>

#include <json.hpp>

namespace sfp::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::vector<unsigned char> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(path, "cannot open file");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SaveError(path, "cannot open file for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw SaveError(path, "write failed");
}

float byteswap_float(float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    u = ((u & 0xFF) << 24) | ((u & 0xFF00) << 8) | ((u >> 8) & 0xFF00) | (u >> 24);
    std::memcpy(&v, &u, 4);
    return v;
}

// Reads the next whitespace-delimited header token starting at `pos`.
std::string header_token(const fs::path& path, const std::vector<unsigned char>& bytes, std::size_t& pos) {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) ++pos;
    if (start == pos) throw DecodeError(path, pos, "truncated PFM header");
    return {bytes.begin() + static_cast<std::ptrdiff_t>(start), bytes.begin() + static_cast<std::ptrdiff_t>(pos)};
}

}  // namespace

PfmImage read_pfm(const fs::path& path) {
    const auto bytes = read_bytes(path);
    std::size_t pos = 0;
    const std::string magic = header_token(path, bytes, pos);
    PfmImage img;
    if (magic == "PF") {
        img.channels = 3;
    } else if (magic == "Pf") {
        img.channels = 1;
    } else {
        throw DecodeError(path, 0, "not a PFM file (magic '" + magic + "')");
    }
    double scale = 0.0;
    try {
        img.width = std::stoll(header_token(path, bytes, pos));
        img.height = std::stoll(header_token(path, bytes, pos));
        scale = std::stod(header_token(path, bytes, pos));
    } catch (const std::logic_error&) {
        throw DecodeError(path, pos, "malformed PFM header");
    }
    if (img.width <= 0 || img.height <= 0 || scale == 0.0) throw DecodeError(path, pos, "invalid PFM dimensions or scale");
    // Exactly one whitespace byte separates the header from the raster.
    if (pos >= bytes.size()) throw DecodeError(path, pos, "truncated PFM header");
    ++pos;

    const std::size_t count = static_cast<std::size_t>(img.width * img.height * img.channels);
    const std::size_t needed = pos + count * 4;
    if (bytes.size() < needed) {
        throw DecodeError(path, bytes.size(),
                          "truncated PFM raster, expected " + std::to_string(needed) + " bytes");
    }
    const bool file_little = scale < 0.0;
    const bool swap = file_little != (std::endian::native == std::endian::little);
    img.data.resize(count);
    const std::size_t row_floats = static_cast<std::size_t>(img.width * img.channels);
    for (Eigen::Index row = 0; row < img.height; ++row) {
        // File rows run bottom to top.
        const std::size_t src = pos + static_cast<std::size_t>(row) * row_floats * 4;
        float* dst = img.data.data() + static_cast<std::size_t>(img.height - 1 - row) * row_floats;
        std::memcpy(dst, bytes.data() + src, row_floats * 4);
        if (swap) {
            for (std::size_t i = 0; i < row_floats; ++i) dst[i] = byteswap_float(dst[i]);
        }
    }
    return img;
}

void write_pfm(const fs::path& path, const PfmImage& img) {
    const std::size_t row_floats = static_cast<std::size_t>(img.width * img.channels);
    if (img.data.size() != row_floats * static_cast<std::size_t>(img.height)) {
        throw SaveError(path, "PFM raster size does not match header");
    }
    std::string out = (img.channels == 3 ? "PF\n" : "Pf\n") + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n-1.0\n";
    const std::size_t header = out.size();
    out.resize(header + img.data.size() * 4);
    for (Eigen::Index row = 0; row < img.height; ++row) {
        const float* src = img.data.data() + static_cast<std::size_t>(img.height - 1 - row) * row_floats;
        char* dst = out.data() + header + static_cast<std::size_t>(row) * row_floats * 4;
        for (std::size_t i = 0; i < row_floats; ++i) {
            float v = src[i];
            if constexpr (std::endian::native != std::endian::little) v = byteswap_float(v);
            std::memcpy(dst + i * 4, &v, 4);
        }
    }
    write_bytes(path, out);
}

fs::path mask_path_for(const fs::path& pfm_path) {
    fs::path p = pfm_path;
    p.replace_extension(".mask.png");
    return p;
}

void save_normal_map(const NormalMapd& map, const fs::path& path) {
    PfmImage img{map.width, map.height, 3, std::vector<float>(static_cast<std::size_t>(map.width * map.height * 3))};
    for (Eigen::Index i = 0; i < map.width * map.height; ++i) {
        const bool valid = map.mask(i / map.width, i % map.width);
        for (int c = 0; c < 3; ++c) {
            const double v = map.normals(i, c);
            if (valid && !std::isfinite(v)) {
                throw SaveError(path, "non-finite normal at pixel (" + std::to_string(i % map.width) + ", " +
                                          std::to_string(i / map.width) + ")");
            }
            img.data[static_cast<std::size_t>(i * 3 + c)] = static_cast<float>(v);
        }
    }
    write_pfm(path, img);
    save_mask_png(map.mask, mask_path_for(path));
}

NormalMapd load_normal_map(const fs::path& path) {
    const PfmImage img = read_pfm(path);
    if (img.channels != 3) throw LoadError(path, "normal maps need a 3-channel PFM");
    NormalMapd map(img.width, img.height);
    for (Eigen::Index i = 0; i < img.width * img.height; ++i) {
        for (int c = 0; c < 3; ++c) map.normals(i, c) = img.data[static_cast<std::size_t>(i * 3 + c)];
    }
    const fs::path mp = mask_path_for(path);
    if (fs::exists(mp)) {
        map.mask = load_mask_png(mp);
        require_same_dims(dims_of(map.mask), map.dims(), mp.string() + " vs " + path.string());
    }
    return map;
}

void save_plane_pfm(const Planed& plane, const fs::path& path) {
    PfmImage img{plane.cols(), plane.rows(), 1, std::vector<float>(static_cast<std::size_t>(plane.size()))};
    Eigen::Map<Plane<float>>(img.data.data(), plane.rows(), plane.cols()) = plane.cast<float>();
    write_pfm(path, img);
}

Planed load_plane_pfm(const fs::path& path) {
    const PfmImage img = read_pfm(path);
    if (img.channels != 1) throw LoadError(path, "expected a single-channel PFM");
    return Eigen::Map<const Plane<float>>(img.data.data(), img.height, img.width).cast<double>();
}

// --- PNG --------------------------------------------------------------------

namespace {

struct PngRaster {
    Eigen::Index width = 0;
    Eigen::Index height = 0;
    int bit_depth = 8;
    std::vector<std::uint16_t> samples;
};

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

PngRaster read_png_gray(const fs::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw LoadError(path, "cannot open file");
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw DecodeError(path, 0, "not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw LoadError(path, "libpng initialization failed");
    }
    PngRaster raster;
    std::string failure;
    std::vector<png_bytep> rows;
    std::vector<unsigned char> buffer;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError(path, static_cast<std::size_t>(std::ftell(file.get())), "corrupt PNG data");
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    raster.width = png_get_image_width(png, info);
    raster.height = png_get_image_height(png, info);
    raster.bit_depth = depth;
    if (color != PNG_COLOR_TYPE_GRAY) {
        failure = "unsupported PNG color type " + std::to_string(color) + " (grayscale required)";
    } else if (depth != 8 && depth != 16) {
        failure = "unsupported PNG bit depth " + std::to_string(depth) + " (8 or 16 required)";
    }
    if (!failure.empty()) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw LoadError(path, failure);
    }
    if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
    png_read_update_info(png, info);

    const std::size_t stride = png_get_rowbytes(png, info);
    buffer.resize(stride * static_cast<std::size_t>(raster.height));
    rows.resize(static_cast<std::size_t>(raster.height));
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = buffer.data() + r * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    raster.samples.resize(static_cast<std::size_t>(raster.width * raster.height));
    for (Eigen::Index y = 0; y < raster.height; ++y) {
        for (Eigen::Index x = 0; x < raster.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y * raster.width + x);
            if (depth == 16) {
                std::uint16_t v;
                std::memcpy(&v, rows[static_cast<std::size_t>(y)] + x * 2, 2);
                raster.samples[i] = v;
            } else {
                raster.samples[i] = rows[static_cast<std::size_t>(y)][x];
            }
        }
    }
    return raster;
}

void write_png_gray(const fs::path& path, Eigen::Index width, Eigen::Index height, int depth,
                    const std::vector<std::uint16_t>& samples) {
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw SaveError(path, "cannot open file for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw SaveError(path, "libpng initialization failed");
    }
    const std::size_t bytes_per = depth == 16 ? 2 : 1;
    std::vector<unsigned char> buffer(static_cast<std::size_t>(width * height) * bytes_per);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (depth == 16) {
            buffer[2 * i] = static_cast<unsigned char>(samples[i] >> 8);  // PNG is big-endian
            buffer[2 * i + 1] = static_cast<unsigned char>(samples[i] & 0xFF);
        } else {
            buffer[i] = static_cast<unsigned char>(samples[i]);
        }
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = buffer.data() + r * static_cast<std::size_t>(width) * bytes_per;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw SaveError(path, "libpng write failed");
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

Planed load_gray_png(const fs::path& path) {
    const PngRaster r = read_png_gray(path);
    const double max_value = r.bit_depth == 16 ? 65535.0 : 255.0;
    Planed plane(r.height, r.width);
    for (Eigen::Index i = 0; i < plane.size(); ++i) {
        plane(i / r.width, i % r.width) = r.samples[static_cast<std::size_t>(i)] / max_value;
    }
    return plane;
}

void save_gray_png16(const Planed& plane, const fs::path& path) {
    std::vector<std::uint16_t> samples(static_cast<std::size_t>(plane.size()));
    for (Eigen::Index y = 0; y < plane.rows(); ++y) {
        for (Eigen::Index x = 0; x < plane.cols(); ++x) {
            const double v = std::clamp(plane(y, x), 0.0, 1.0);
            samples[static_cast<std::size_t>(y * plane.cols() + x)] =
                static_cast<std::uint16_t>(std::lround(v * 65535.0));
        }
    }
    write_png_gray(path, plane.cols(), plane.rows(), 16, samples);
}

Mask load_mask_png(const fs::path& path) {
    const PngRaster r = read_png_gray(path);
    Mask mask(r.height, r.width);
    for (Eigen::Index i = 0; i < mask.size(); ++i) mask(i / r.width, i % r.width) = r.samples[static_cast<std::size_t>(i)] != 0;
    return mask;
}

void save_mask_png(const Mask& mask, const fs::path& path) {
    std::vector<std::uint16_t> samples(static_cast<std::size_t>(mask.size()));
    for (Eigen::Index y = 0; y < mask.rows(); ++y) {
        for (Eigen::Index x = 0; x < mask.cols(); ++x) {
            samples[static_cast<std::size_t>(y * mask.cols() + x)] = mask(y, x) ? 255 : 0;
        }
    }
    write_png_gray(path, mask.cols(), mask.rows(), 8, samples);
}

// --- Manifests ----------------------------------------------------------------

std::string to_string(Lighting l) {
    switch (l) {
        case Lighting::Indoor: return "indoor";
        case Lighting::Overcast: return "overcast";
        case Lighting::Sunlight: return "sunlight";
        case Lighting::Synthetic: return "synthetic";
    }
    return "synthetic";
}

Lighting lighting_from_string(const std::string& s) {
    if (s == "indoor") return Lighting::Indoor;
    if (s == "overcast") return Lighting::Overcast;
    if (s == "sunlight") return Lighting::Sunlight;
    if (s == "synthetic") return Lighting::Synthetic;
    throw DomainError("unknown lighting label '" + s + "'");
}

namespace {

json parse_json_file(const fs::path& path) {
    const auto bytes = read_bytes(path);
    try {
        return json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw DecodeError(path, e.byte, "invalid JSON");
    }
}

void collect_unknown_keys(const json& j, const std::set<std::string>& known, const fs::path& path,
                          std::vector<std::string>& warnings) {
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) warnings.push_back(path.string() + ": ignoring unknown key '" + key + "'");
    }
}

template <typename T>
T get_or(const json& j, const char* key, const fs::path& path, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw LoadError(path, std::string("key '") + key + "' has the wrong type");
    }
}

void check_schema(const json& j, const fs::path& path) {
    if (!j.is_object()) throw LoadError(path, "top-level JSON value must be an object");
    const int version = get_or<int>(j, "schema_version", path, 0);
    if (version < 1 || version > kSchemaVersion) {
        throw LoadError(path, "unsupported schema_version " + std::to_string(version) + " (this build reads " +
                                  std::to_string(kSchemaVersion) + ")");
    }
}

}  // namespace

Manifest read_manifest(const fs::path& path) {
    const json j = parse_json_file(path);
    check_schema(j, path);
    Manifest m;
    collect_unknown_keys(j,
                         {"schema_version", "angles_deg", "images", "truth_normals", "mask", "lighting",
                          "refractive_index", "gamma"},
                         path, m.warnings);
    m.base_dir = path.parent_path();
    m.schema_version = j.at("schema_version").get<int>();
    if (!j.contains("angles_deg") || !j.contains("images")) throw LoadError(path, "manifest needs 'angles_deg' and 'images'");
    m.angles_deg = get_or<std::vector<double>>(j, "angles_deg", path, {});
    for (const auto& p : get_or<std::vector<std::string>>(j, "images", path, {})) m.images.emplace_back(p);
    if (m.angles_deg.size() != m.images.size()) {
        throw LoadError(path, "manifest lists " + std::to_string(m.images.size()) + " images but " +
                                  std::to_string(m.angles_deg.size()) + " angles");
    }
    if (j.contains("truth_normals")) m.truth_normals = get_or<std::string>(j, "truth_normals", path, "");
    if (j.contains("mask")) m.mask = get_or<std::string>(j, "mask", path, "");
    try {
        m.lighting = lighting_from_string(get_or<std::string>(j, "lighting", path, "synthetic"));
    } catch (const DomainError& e) {
        throw LoadError(path, e.what());
    }
    m.refractive_index = get_or<double>(j, "refractive_index", path, RefractiveIndex::kDefault);
    m.gamma = get_or<bool>(j, "gamma", path, false);
    return m;
}

void write_manifest(const Manifest& m, const fs::path& path) {
    json j;
    j["schema_version"] = m.schema_version;
    j["angles_deg"] = m.angles_deg;
    std::vector<std::string> images;
    for (const auto& p : m.images) images.push_back(p.generic_string());
    j["images"] = images;
    if (m.truth_normals) j["truth_normals"] = m.truth_normals->generic_string();
    if (m.mask) j["mask"] = m.mask->generic_string();
    j["lighting"] = to_string(m.lighting);
    j["refractive_index"] = m.refractive_index;
    j["gamma"] = m.gamma;
    write_bytes(path, j.dump(2) + "\n");
}

PolarizationStack load_stack(const Manifest& m) {
    PolarizationStack stack;
    for (double deg : m.angles_deg) stack.angles.push_back(deg * std::numbers::pi / 180.0);
    for (const auto& rel : m.images) {
        const fs::path p = m.resolve(rel);
        Planed plane = load_gray_png(p);
        if (!stack.images.empty() && dims_of(plane) != dims_of(stack.images.front())) {
            throw LoadError(p, "dimensions " + sfp::to_string(dims_of(plane)) + " differ from " +
                                   sfp::to_string(dims_of(stack.images.front())) + " of " +
                                   m.resolve(m.images.front()).string());
        }
        if (m.gamma) plane = plane.pow(2.2);
        stack.images.push_back(std::move(plane));
    }
    if (stack.images.empty()) throw LoadError(m.base_dir, "manifest lists no images");
    const Dims d = dims_of(stack.images.front());
    if (m.mask) {
        const fs::path p = m.resolve(*m.mask);
        stack.mask = load_mask_png(p);
        if (dims_of(stack.mask) != d) {
            throw LoadError(p, "mask dimensions " + sfp::to_string(dims_of(stack.mask)) + " differ from image " +
                                   sfp::to_string(d));
        }
    } else {
        stack.mask = Mask::Constant(d.height, d.width, true);
    }
    stack.validate();
    return stack;
}

PolarizationStack load_stack(const fs::path& manifest_path) { return load_stack(read_manifest(manifest_path)); }

Manifest save_stack(const PolarizationStack& stack, const fs::path& manifest_path, Manifest m) {
    const fs::path dir = manifest_path.parent_path();
    std::error_code ec;
    if (!dir.empty()) fs::create_directories(dir, ec);
    if (ec) throw SaveError(dir, "cannot create directory: " + ec.message());
    m.base_dir = dir;
    m.angles_deg.clear();
    m.images.clear();
    for (std::size_t i = 0; i < stack.size(); ++i) {
        const double deg = stack.angles[i] * 180.0 / std::numbers::pi;
        m.angles_deg.push_back(std::round(deg * 1e9) / 1e9);
        char name[32];
        std::snprintf(name, sizeof name, "pol_%03zu.png", i);
        m.images.emplace_back(name);
        save_gray_png16(stack.images[i], dir / name);
    }
    m.mask = "mask.png";
    save_mask_png(stack.mask, dir / "mask.png");
    write_manifest(m, manifest_path);
    return m;
}

// --- Scenes -------------------------------------------------------------------

namespace {

NoiseSpec parse_noise(const json& j, const fs::path& path, std::vector<std::string>& warnings) {
    NoiseSpec noise;
    if (!j.is_object()) throw LoadError(path, "'noise' must be an object");
    collect_unknown_keys(j, {"kind", "sigma", "scale", "seed"}, path, warnings);
    const std::string kind = get_or<std::string>(j, "kind", path, "none");
    if (kind == "none") {
        noise.kind = NoiseKind::None;
    } else if (kind == "gaussian") {
        noise.kind = NoiseKind::Gaussian;
    } else if (kind == "poisson") {
        noise.kind = NoiseKind::Poisson;
    } else {
        throw LoadError(path, "unknown noise kind '" + kind + "'");
    }
    noise.sigma = get_or<double>(j, "sigma", path, 0.0);
    noise.scale = get_or<double>(j, "scale", path, 1.0);
    noise.seed = get_or<std::uint64_t>(j, "seed", path, 0);
    return noise;
}

json noise_to_json(const NoiseSpec& n) {
    json j;
    j["kind"] = n.kind == NoiseKind::None ? "none" : n.kind == NoiseKind::Gaussian ? "gaussian" : "poisson";
    j["sigma"] = n.sigma;
    j["scale"] = n.scale;
    j["seed"] = n.seed;
    return j;
}

}  // namespace

SceneFile read_scene(const fs::path& path) {
    const json j = parse_json_file(path);
    check_schema(j, path);
    SceneFile out;
    collect_unknown_keys(j,
                         {"schema_version", "normals", "refractive_index", "dominance", "unpolarized_intensity",
                          "angles_deg", "noise"},
                         path, out.warnings);
    const fs::path base = path.parent_path();
    if (!j.contains("normals")) throw LoadError(path, "scene needs 'normals'");
    NormalMapd normals = load_normal_map(base / get_or<std::string>(j, "normals", path, ""));
    const Dims d = normals.dims();

    ReflectionMap dominance = ReflectionMap::Constant(d.height, d.width, Reflection::Diffuse);
    const std::string dom = get_or<std::string>(j, "dominance", path, "diffuse");
    if (dom == "specular") {
        dominance.setConstant(Reflection::Specular);
    } else if (dom != "diffuse") {
        const fs::path lp = base / dom;
        const Mask labels = load_mask_png(lp);
        if (dims_of(labels) != d) throw LoadError(lp, "label dimensions " + sfp::to_string(dims_of(labels)) + " differ from normals " + sfp::to_string(d));
        dominance = labels.select(ReflectionMap::Constant(d.height, d.width, Reflection::Specular), dominance);
    }

    Planed intensity = Planed::Constant(d.height, d.width, 0.5);
    if (j.contains("unpolarized_intensity")) {
        const json& v = j.at("unpolarized_intensity");
        if (v.is_number()) {
            intensity.setConstant(v.get<double>());
        } else if (v.is_string()) {
            const fs::path ip = base / v.get<std::string>();
            intensity = load_gray_png(ip);
            if (dims_of(intensity) != d) throw LoadError(ip, "intensity dimensions " + sfp::to_string(dims_of(intensity)) + " differ from normals " + sfp::to_string(d));
        } else {
            throw LoadError(path, "'unpolarized_intensity' must be a number or a PNG path");
        }
    }

    NoiseSpec noise;
    if (j.contains("noise")) noise = parse_noise(j.at("noise"), path, out.warnings);

    const double n = get_or<double>(j, "refractive_index", path, RefractiveIndex::kDefault);
    out.scene = SceneSpec{std::move(normals), RefractiveIndex(n), std::move(dominance), std::move(intensity), noise};
    out.angles_deg = get_or<std::vector<double>>(j, "angles_deg", path, {0.0, 45.0, 90.0, 135.0});
    return out;
}

void write_uniform_scene(const fs::path& path, const NormalMapd& normals, Reflection dominance, double intensity,
                         double refractive_index, const NoiseSpec& noise, const std::vector<double>& angles_deg) {
    const fs::path dir = path.parent_path();
    save_normal_map(normals, dir / "normals.pfm");
    json j;
    j["schema_version"] = kSchemaVersion;
    j["normals"] = "normals.pfm";
    j["refractive_index"] = refractive_index;
    j["dominance"] = dominance == Reflection::Diffuse ? "diffuse" : "specular";
    j["unpolarized_intensity"] = intensity;
    j["angles_deg"] = angles_deg;
    j["noise"] = noise_to_json(noise);
    write_bytes(path, j.dump(2) + "\n");
}

}  // namespace sfp::io
