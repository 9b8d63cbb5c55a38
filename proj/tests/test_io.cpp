#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include "sfp/angles.hpp"
#include "sfp/forward_sim.hpp"
#include "sfp/io.hpp"
#include "temp_dir.hpp"

using namespace sfp;
using namespace sfp::io;

namespace {

// Encoded with Pillow: gray16 [0, 32768, 65535], gray8 [0, 51, 255],
// a 2x2 RGB image and a 4x1 one-bit image.
inline const unsigned char kGray16[] = {0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52, 0x00, 0x00, 0x00, 0x03, 0x00, 0x00, 0x00, 0x01, 0x10, 0x00, 0x00, 0x00, 0x00, 0x6e, 0x1b, 0x97, 0x2b, 0x00, 0x00, 0x00, 0x0f, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60, 0x60, 0x68, 0x60, 0xf8, 0xff, 0x1f, 0x00, 0x05, 0x04, 0x02, 0x7f, 0xe3, 0x80, 0x4b, 0xe0, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};
inline const unsigned char kGray8[] = {0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52, 0x00, 0x00, 0x00, 0x03, 0x00, 0x00, 0x00, 0x01, 0x08, 0x00, 0x00, 0x00, 0x00, 0x3e, 0x8b, 0x4b, 0x68, 0x00, 0x00, 0x00, 0x0c, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60, 0x30, 0xfe, 0x0f, 0x00, 0x01, 0x69, 0x01, 0x33, 0xc4, 0xef, 0x2b, 0xf0, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};
inline const unsigned char kRgb8[] = {0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x02, 0x08, 0x02, 0x00, 0x00, 0x00, 0xfd, 0xd4, 0x9a, 0x73, 0x00, 0x00, 0x00, 0x16, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0xe4, 0x12, 0x91, 0x63, 0x60, 0x60, 0x60, 0x62, 0x60, 0x60, 0x60, 0x60, 0x60, 0x00, 0x00, 0x02, 0xe6, 0x00, 0x40, 0x5c, 0xa5, 0x20, 0x5b, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};
inline const unsigned char kGray1[] = {0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52, 0x00, 0x00, 0x00, 0x04, 0x00, 0x00, 0x00, 0x01, 0x01, 0x00, 0x00, 0x00, 0x00, 0xd1, 0x47, 0x32, 0x60, 0x00, 0x00, 0x00, 0x0a, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0xf8, 0x00, 0x00, 0x00, 0xf2, 0x00, 0xf1, 0x9c, 0xf1, 0x1d, 0xe6, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};

template <std::size_t N>
std::string bytes_of(const unsigned char (&a)[N]) {
    return std::string(reinterpret_cast<const char*>(a), N);
}

NormalMapd float_representable(const NormalMapd& m) { return m.cast<float>().cast<double>(); }

}  // namespace

TEST_CASE("PFM normal map round trip is bit-exact") {
    TempDir dir;
    NormalMapd map = float_representable(synth_sphere(12));
    const auto path = dir / "n.pfm";
    save_normal_map(map, path);
    CHECK(std::filesystem::exists(mask_path_for(path)));
    CHECK(mask_path_for(path).filename() == "n.mask.png");

    const NormalMapd back = load_normal_map(path);
    CHECK(back.width == map.width);
    CHECK(back.height == map.height);
    CHECK((back.mask == map.mask).all());
    for (Eigen::Index i = 0; i < map.normals.rows(); ++i) {
        if (map.mask(i / map.width, i % map.width)) REQUIRE(back.normals.row(i) == map.normals.row(i));
    }

    const auto again = dir / "again.pfm";
    save_normal_map(back, again);
    CHECK(read_file(path) == read_file(again));
    CHECK(read_file(mask_path_for(path)) == read_file(mask_path_for(again)));
}

TEST_CASE("PFM header and row order") {
    TempDir dir;
    PfmImage img{2, 2, 1, {1.0f, 2.0f, 3.0f, 4.0f}};
    write_pfm(dir / "a.pfm", img);
    const std::string bytes = read_file(dir / "a.pfm");
    const std::string header = "Pf\n2 2\n-1.0\n";
    REQUIRE(bytes.size() == header.size() + 16);
    CHECK(bytes.substr(0, header.size()) == header);
    // bottom row first
    float first;
    std::memcpy(&first, bytes.data() + header.size(), 4);
    CHECK(first == 3.0f);
}

TEST_CASE("big-endian PFM is read") {
    TempDir dir;
    std::string bytes = "Pf\n2 1\n1.0\n";
    for (float v : {0.25f, -2.0f}) {
        const auto u = __builtin_bswap32(std::bit_cast<std::uint32_t>(v));
        bytes.append(reinterpret_cast<const char*>(&u), 4);
    }
    write_file(dir / "be.pfm", bytes);
    const PfmImage img = read_pfm(dir / "be.pfm");
    CHECK(img.width == 2);
    CHECK(img.channels == 1);
    CHECK(img.data == std::vector<float>{0.25f, -2.0f});
}

TEST_CASE("malformed PFM files") {
    TempDir dir;
    write_file(dir / "short.pfm", std::string("PF\n4 4\n-1.0\n") + std::string(20, '\0'));
    try {
        read_pfm(dir / "short.pfm");
        FAIL("expected DecodeError");
    } catch (const DecodeError& e) {
        CHECK(e.offset > 0);
        CHECK(std::string(e.what()).find("at byte") != std::string::npos);
    }
    write_file(dir / "magic.pfm", "P6\n1 1\n255\n\n");
    CHECK_THROWS_AS(read_pfm(dir / "magic.pfm"), DecodeError);
    CHECK_THROWS_AS(read_pfm(dir / "missing.pfm"), LoadError);
}

TEST_CASE("NaN normals are refused on save") {
    TempDir dir;
    NormalMapd map(2, 2);
    map.set(1, 1, Vec3d(std::numeric_limits<double>::quiet_NaN(), 0, 1));
    CHECK_THROWS_AS(save_normal_map(map, dir / "nan.pfm"), SaveError);
    map.mask(1, 1) = false;
    CHECK_NOTHROW(save_normal_map(map, dir / "nan.pfm"));
}

TEST_CASE("plane PFM round trip") {
    TempDir dir;
    Planed p(3, 5);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = static_cast<float>(0.1 * i);
    save_plane_pfm(p, dir / "p.pfm");
    CHECK((load_plane_pfm(dir / "p.pfm") == p).all());
    save_normal_map(NormalMapd(2, 2), dir / "n.pfm");
    CHECK_THROWS_AS(load_plane_pfm(dir / "n.pfm"), LoadError);
}

TEST_CASE("grayscale PNG decoding") {
    TempDir dir;
    write_file(dir / "g16.png", bytes_of(kGray16));
    const Planed g16 = load_gray_png(dir / "g16.png");
    REQUIRE(g16.cols() == 3);
    CHECK(g16(0, 0) == 0.0);
    CHECK(g16(0, 1) == 32768.0 / 65535.0);
    CHECK(g16(0, 2) == 1.0);

    write_file(dir / "g8.png", bytes_of(kGray8));
    const Planed g8 = load_gray_png(dir / "g8.png");
    CHECK(g8(0, 1) == 51.0 / 255.0);
    CHECK(g8(0, 2) == 1.0);

    write_file(dir / "rgb.png", bytes_of(kRgb8));
    CHECK_THROWS_AS(load_gray_png(dir / "rgb.png"), LoadError);
    write_file(dir / "one.png", bytes_of(kGray1));
    CHECK_THROWS_AS(load_gray_png(dir / "one.png"), LoadError);
    write_file(dir / "junk.png", "not a png");
    CHECK_THROWS_AS(load_gray_png(dir / "junk.png"), Error);
}

TEST_CASE("16-bit PNG round trip") {
    TempDir dir;
    Planed p(4, 4);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = i * 4000 / 65535.0;
    save_gray_png16(p, dir / "p.png");
    CHECK((load_gray_png(dir / "p.png") == p).all());
    write_file(dir / "copy.png", read_file(dir / "p.png"));
    save_gray_png16(load_gray_png(dir / "copy.png"), dir / "again.png");
    CHECK(read_file(dir / "p.png") == read_file(dir / "again.png"));

    Mask m = Mask::Constant(3, 2, true);
    m(1, 0) = false;
    save_mask_png(m, dir / "m.png");
    CHECK((load_mask_png(dir / "m.png") == m).all());
}

TEST_CASE("manifests") {
    TempDir dir;
    const auto truth = synth_sphere(6);
    const auto stack = render_stack(SceneSpec::uniform(truth, Reflection::Diffuse, 0.5), canonical_angles());

    Manifest base;
    base.lighting = Lighting::Overcast;
    base.refractive_index = 1.6;
    const Manifest written = save_stack(stack, dir / "manifest.json", base);
    CHECK(written.angles_deg == std::vector<double>{0, 45, 90, 135});

    const Manifest m = read_manifest(dir / "manifest.json");
    CHECK(m.angles_deg == written.angles_deg);
    CHECK(m.images == written.images);
    CHECK(m.lighting == Lighting::Overcast);
    CHECK(m.refractive_index == 1.6);
    CHECK(m.warnings.empty());
    write_manifest(m, dir / "copy.json");
    CHECK(read_file(dir / "manifest.json") == read_file(dir / "copy.json"));

    const PolarizationStack loaded = load_stack(dir / "manifest.json");
    REQUIRE(loaded.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(loaded.angles[i] == doctest::Approx(i * std::numbers::pi / 4).epsilon(1e-15));
    CHECK((loaded.mask == truth.mask).all());
    for (std::size_t i = 0; i < 4; ++i) CHECK(((loaded.images[i] - stack.images[i]).abs() <= 0.5 / 65535 + 1e-15).all());

    SUBCASE("gamma linearization") {
        auto g = m;
        g.gamma = true;
        const auto lin = load_stack(g);
        CHECK(lin.images[1](3, 3) == doctest::Approx(std::pow(loaded.images[1](3, 3), 2.2)).epsilon(1e-14));
    }
    SUBCASE("unknown keys warn") {
        write_file(dir / "extra.json",
                   R"({"schema_version": 1, "angles_deg": [0], "images": ["pol_000.png"], "camera": "x"})");
        const auto e = read_manifest(dir / "extra.json");
        REQUIRE(e.warnings.size() == 1);
        CHECK(e.warnings[0].find("camera") != std::string::npos);
    }
    SUBCASE("schema gating") {
        write_file(dir / "v2.json", R"({"schema_version": 2, "angles_deg": [], "images": []})");
        CHECK_THROWS_AS(read_manifest(dir / "v2.json"), LoadError);
        write_file(dir / "v0.json", R"({"angles_deg": [], "images": []})");
        CHECK_THROWS_AS(read_manifest(dir / "v0.json"), LoadError);
    }
    SUBCASE("angle and image counts must agree") {
        write_file(dir / "bad.json", R"({"schema_version": 1, "angles_deg": [0, 45, 90, 135],
                                         "images": ["pol_000.png", "pol_001.png", "pol_002.png"]})");
        CHECK_THROWS_AS(read_manifest(dir / "bad.json"), LoadError);
    }
    SUBCASE("missing image") {
        auto broken = m;
        broken.images[2] = "nope.png";
        CHECK_THROWS_AS(load_stack(broken), LoadError);
    }
    SUBCASE("dimension mismatch names both files") {
        save_gray_png16(Planed::Zero(3, 3), dir / "small.png");
        auto broken = m;
        broken.images[3] = "small.png";
        try {
            load_stack(broken);
            FAIL("expected LoadError");
        } catch (const LoadError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("small.png") != std::string::npos);
            CHECK(msg.find("pol_000.png") != std::string::npos);
        }
    }
    CHECK_THROWS_AS(read_manifest(dir / "absent.json"), LoadError);
    write_file(dir / "broken.json", "{not json");
    CHECK_THROWS_AS(read_manifest(dir / "broken.json"), Error);
}

TEST_CASE("scene files") {
    TempDir dir;
    const NormalMapd normals = float_representable(synth_sphere(5));
    write_uniform_scene(dir / "scene.json", normals, Reflection::Specular, 0.7, 1.4,
                        {NoiseKind::Gaussian, 0.02, 1.0, 9}, {0, 60, 120});
    const SceneFile s = read_scene(dir / "scene.json");
    CHECK(s.angles_deg == std::vector<double>{0, 60, 120});
    CHECK(s.scene.n.value() == 1.4);
    CHECK((s.scene.dominance == Reflection::Specular).all());
    CHECK((s.scene.unpolarized_intensity == 0.7).all());
    CHECK(s.scene.noise.kind == NoiseKind::Gaussian);
    CHECK(s.scene.noise.sigma == 0.02);
    CHECK(s.scene.noise.seed == 9);
    CHECK((s.scene.normals.mask == normals.mask).all());

    write_file(dir / "labels.json", R"({"schema_version": 1, "normals": "normals.pfm", "dominance": "labels.png",
                                        "unpolarized_intensity": "intensity.png", "shiny": true})");
    Mask labels = Mask::Constant(11, 11, false);
    labels.col(0).setConstant(true);
    save_mask_png(labels, dir / "labels.png");
    save_gray_png16(Planed::Constant(11, 11, 0.25), dir / "intensity.png");
    const SceneFile l = read_scene(dir / "labels.json");
    CHECK(l.scene.dominance(4, 0) == Reflection::Specular);
    CHECK(l.scene.dominance(4, 1) == Reflection::Diffuse);
    CHECK(l.scene.unpolarized_intensity(2, 2) == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(l.angles_deg == std::vector<double>{0, 45, 90, 135});
    CHECK(l.warnings.size() == 1);
}
