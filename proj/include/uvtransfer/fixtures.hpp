#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "uvtransfer/correspondence.hpp"
#include "uvtransfer/errors.hpp"
#include "uvtransfer/mesh.hpp"
#include "uvtransfer/png_io.hpp"
#include "uvtransfer/sampling_map.hpp"
#include "uvtransfer/texture.hpp"

/// Deterministic synthetic meshes, correspondences and textures standing in
/// for real head/body assets.
namespace uvt::fixtures {

using Warp = std::function<Vec2(Vec2)>;

inline Vec2 no_warp(Vec2 p) { return p; }

/// Smooth interior warp of the unit square; keeps every edge in place and
/// stays orientation-preserving for |amp| <= 0.05.
inline Vec2 wave_warp(Vec2 p, double amp, int freq_u, int freq_v) {
    using std::numbers::pi;
    const double u = p.u + amp * std::sin(pi * p.u) * std::sin(freq_v * pi * p.v);
    const double v = p.v + amp * std::sin(pi * p.v) * std::sin(freq_u * pi * p.u);
    return {std::clamp(u, 0.0, 1.0), std::clamp(v, 0.0, 1.0)};
}

inline Vec2 head_warp(Vec2 p) { return wave_warp(p, 0.04, 2, 2); }

/// Uniform double in [0,1) from raw engine bits, identical on every platform.
inline double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace detail {

inline std::string num(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

/// Emits the (nx+1) x (ny+1) lattice vertices of a grid over `rect` after
/// warping the unit square, and nx*ny quads; vertex (i,j) is number
/// base + j*(nx+1) + i (0-based).
inline void emit_grid(std::string& obj, std::string& faces, int nx, int ny, const Warp& warp, double u0, double v0,
                      double du, double dv, std::uint32_t base) {
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const Vec2 unit{static_cast<double>(i) / nx, static_cast<double>(j) / ny};
            const Vec2 w = warp(unit);
            const Vec2 uv{std::clamp(u0 + du * w.u, 0.0, 1.0), std::clamp(v0 + dv * w.v, 0.0, 1.0)};
            obj += "v " + num(unit.u) + ' ' + num(unit.v) + ' ' + num(0.1 * unit.u * unit.v) + '\n';
            obj += "vt " + num(uv.u) + ' ' + num(uv.v) + '\n';
        }
    }
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::uint32_t a = base + j * (nx + 1) + i + 1;  // OBJ is 1-based
            const std::uint32_t b = a + 1, c = a + nx + 2, d = a + nx + 1;
            auto corner = [](std::uint32_t k) { return std::to_string(k) + '/' + std::to_string(k); };
            faces += "f " + corner(a) + ' ' + corner(b) + ' ' + corner(c) + ' ' + corner(d) + '\n';
        }
    }
}

}  // namespace detail

/// OBJ text of an nx x ny quad grid over the unit square, UVs passed
/// through `warp`. Quad (i,j) has corners (i,j),(i+1,j),(i+1,j+1),(i,j+1).
inline std::string grid_obj(int nx, int ny, const Warp& warp = no_warp) {
    if (nx < 1 || ny < 1) throw ValidationError("grid size must be >= 1");
    std::string obj = "# uv grid " + std::to_string(nx) + "x" + std::to_string(ny) + "\n", faces;
    detail::emit_grid(obj, faces, nx, ny, warp, 0.0, 0.0, 1.0, 1.0, 0);
    return obj + faces;
}

inline UvMesh grid_mesh(int nx, int ny, const Warp& warp = no_warp) { return parse_obj(grid_obj(nx, ny, warp)); }

/// Corner table the loader must produce for grid_obj(nx, ny): quad
/// k = j*nx + i becomes faces 2k = (p00,p10,p11) and 2k+1 = (p00,p11,p01),
/// with position and uv index both j*(nx+1)+i.
inline std::vector<Face> grid_corner_table(int nx, int ny) {
    std::vector<Face> faces;
    auto c = [&](int i, int j) {
        const auto k = static_cast<std::uint32_t>(j * (nx + 1) + i);
        return Corner{k, k};
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            faces.push_back({c(i, j), c(i + 1, j), c(i + 1, j + 1)});
            faces.push_back({c(i, j), c(i + 1, j + 1), c(i, j + 1)});
        }
    }
    return faces;
}

inline CorrespondenceMap identity_vertex_map(std::size_t n_positions) {
    CorrespondenceMap m;
    m.mode = CorrespondenceMode::vertex;
    for (std::uint32_t i = 0; i < n_positions; ++i) m.pairs.emplace(i, i);
    return m;
}

inline CorrespondenceMap identity_face_map(std::size_t n_faces) {
    CorrespondenceMap m;
    m.mode = CorrespondenceMode::face;
    for (std::uint32_t i = 0; i < n_faces; ++i) m.pairs.emplace(i, i);
    return m;
}

/// Small "head" layout filling its whole UV square, and a large "body"
/// layout where the same face grid occupies the region
/// [0.25,0.75] x [0.5,1.0] next to 12 coarse body cells.
struct HeadBody {
    std::string head_obj;
    std::string body_obj;
    UvMesh head;
    UvMesh body;
    CorrespondenceMap head_from_body;  ///< target head, source body (face mode)
    CorrespondenceMap body_from_head;  ///< target body, source head (face mode)
    std::uint32_t body_face_offset = 0;
};

inline constexpr double kFaceRegionU0 = 0.25, kFaceRegionV0 = 0.5, kFaceRegionSize = 0.5;

inline HeadBody head_body(int grid) {
    if (grid < 1) throw ValidationError("grid size must be >= 1");
    HeadBody f;
    f.head_obj = grid_obj(grid, grid, head_warp);

    // Coarse 4x4 body lattice; cells (1..2, 2..3) are the face region.
    std::string obj = "# body layout\n", faces;
    for (int j = 0; j <= 4; ++j) {
        for (int i = 0; i <= 4; ++i) {
            obj += "v " + detail::num(i * 0.25) + ' ' + detail::num(j * 0.25) + " -1\n";
            obj += "vt " + detail::num(i * 0.25) + ' ' + detail::num(j * 0.25) + '\n';
        }
    }
    int coarse_quads = 0;
    for (int j = 0; j < 4; ++j) {
        for (int i = 0; i < 4; ++i) {
            if (i >= 1 && i <= 2 && j >= 2) continue;
            const int a = j * 5 + i + 1;
            auto corner = [](int k) { return std::to_string(k) + '/' + std::to_string(k); };
            faces += "f " + corner(a) + ' ' + corner(a + 1) + ' ' + corner(a + 6) + ' ' + corner(a + 5) + '\n';
            ++coarse_quads;
        }
    }
    detail::emit_grid(obj, faces, grid, grid, [](Vec2 p) { return wave_warp(p, 0.03, 1, 1); }, kFaceRegionU0,
                      kFaceRegionV0, kFaceRegionSize, kFaceRegionSize, 25);
    f.body_obj = obj + faces;

    f.head = parse_obj(f.head_obj);
    f.body = parse_obj(f.body_obj);
    f.body_face_offset = static_cast<std::uint32_t>(2 * coarse_quads);
    f.head_from_body.mode = f.body_from_head.mode = CorrespondenceMode::face;
    for (std::uint32_t k = 0; k < f.head.faces.size(); ++k) {
        f.head_from_body.pairs.emplace(k, f.body_face_offset + k);
        f.body_from_head.pairs.emplace(f.body_face_offset + k, k);
    }
    return f;
}

/// Smooth RGB test image.
inline Texture gradient_texture(int w, int h) {
    using std::numbers::pi;
    Texture t(w, h, 3);
    for (int row = 0; row < h; ++row) {
        for (int x = 0; x < w; ++x) {
            const double fx = (x + 0.5) / w, fy = (row + 0.5) / h;
            t.at(x, row, 0) = quantize(fx);
            t.at(x, row, 1) = quantize(fy);
            t.at(x, row, 2) = quantize(0.5 + 0.25 * std::sin(2 * pi * fx) * std::cos(2 * pi * fy));
        }
    }
    return t;
}

inline Texture checkerboard_texture(int w, int h, int cell) {
    Texture t(w, h, 3);
    for (int row = 0; row < h; ++row)
        for (int x = 0; x < w; ++x) {
            const std::uint8_t v = ((x / cell + row / cell) % 2) ? 255 : 0;
            for (int c = 0; c < 3; ++c) t.at(x, row, c) = v;
        }
    return t;
}

inline Texture noise_texture(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Texture t(w, h, 3);
    for (auto& b : t.data) b = static_cast<std::uint8_t>(rng() >> 56);
    return t;
}

/// Random overlapping target triangles paired with random source
/// triangles, in target-face order. Degenerate draws are skipped.
inline std::vector<ResolvedPair> random_pairs(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto pt = [&] { return Vec2{unit_double(rng), unit_double(rng)}; };
    std::vector<ResolvedPair> pairs;
    for (std::uint32_t k = 0; pairs.size() < count; ++k) {
        Triangle2D t{pt(), pt(), pt()};
        if (is_degenerate(t)) continue;
        pairs.push_back({t, Triangle2D{pt(), pt(), pt()}, k});
    }
    return pairs;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) throw IoError("cannot write '" + path.string() + "'");
}

struct FixtureSetOptions {
    int grid = 8;
    std::uint64_t seed = 1;
    std::vector<int> texture_sizes{256, 1024, 2048};
};

/// Writes the complete fixture set into `dir` and returns the file names.
inline std::vector<std::string> write_fixture_set(const std::filesystem::path& dir, const FixtureSetOptions& o) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    auto text = [&](const std::string& name, const std::string& content) {
        write_text(dir / name, content);
        written.push_back(name);
    };

    const std::string grid = grid_obj(o.grid, o.grid);
    text("grid_tgt.obj", grid);
    text("grid_src.obj", grid);
    text("grid_identity.json", serialize_correspondence(identity_vertex_map(std::size_t(o.grid + 1) * (o.grid + 1))));
    text("grid_warped.obj", grid_obj(o.grid, o.grid, head_warp));
    text("grid_warped.json", serialize_correspondence(identity_face_map(std::size_t(2) * o.grid * o.grid)));

    const HeadBody hb = head_body(o.grid);
    text("head.obj", hb.head_obj);
    text("body.obj", hb.body_obj);
    text("head_from_body.json", serialize_correspondence(hb.head_from_body));
    text("body_from_head.json", serialize_correspondence(hb.body_from_head));

    for (int s : o.texture_sizes) {
        const std::string n = std::to_string(s);
        write_png((dir / ("gradient_" + n + ".png")).string(), gradient_texture(s, s));
        write_png((dir / ("checker_" + n + ".png")).string(), checkerboard_texture(s, s, std::max(1, s / 16)));
        write_png((dir / ("noise_" + n + ".png")).string(), noise_texture(s, s, o.seed ^ static_cast<std::uint64_t>(s)));
        written.insert(written.end(), {"gradient_" + n + ".png", "checker_" + n + ".png", "noise_" + n + ".png"});
    }
    return written;
}

}  // namespace uvt::fixtures
