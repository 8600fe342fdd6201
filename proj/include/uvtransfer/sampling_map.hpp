#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "uvtransfer/correspondence.hpp"
#include "uvtransfer/digest.hpp"
#include "uvtransfer/errors.hpp"
#include "uvtransfer/geometry.hpp"
#include "uvtransfer/image_space.hpp"
#include "uvtransfer/mesh.hpp"
#include "uvtransfer/parallel.hpp"

namespace uvt {

/// Stored in src_uv for pixels outside the mask.
inline constexpr float kUnmappedUv = -1.0f;

inline constexpr double kDefaultInsideEps = 1e-7;

/// Parameters that determine a sampling map's content.
struct BuildParams {
    int width = 0;
    int height = 0;
    double eps = kDefaultInsideEps;  ///< barycentric inside tolerance
};

inline Digest fingerprint(const BuildParams& p) {
    return Hasher{}.text("build-params/1").u32(static_cast<std::uint32_t>(p.width))
        .u32(static_cast<std::uint32_t>(p.height)).f64(p.eps).finish_digest();
}

/// Fingerprints of everything a sampling map was built from.
struct Provenance {
    Digest source_mesh;
    Digest target_mesh;
    Digest correspondence;
    Digest params;

    Digest combined() const {
        return Hasher{}.text("provenance/1").digest(source_mesh).digest(target_mesh)
            .digest(correspondence).digest(params).finish_digest();
    }
};

inline Digest fingerprint(const UvMesh& source, const UvMesh& target, const CorrespondenceMap& m,
                          const BuildParams& params) {
    return Provenance{fingerprint(source), fingerprint(target), fingerprint(m), fingerprint(params)}.combined();
}

/// Per-pixel gather table from a target texture grid into source UV space.
///
/// Pixels are row-major, row 0 at the image top. Covered pixels hold a
/// source UV in [0,1]^2; the rest hold (kUnmappedUv, kUnmappedUv).
struct SamplingMap {
    int width = 0;
    int height = 0;
    std::vector<float> src_uv;        ///< 2 floats per pixel
    std::vector<std::uint8_t> mask;   ///< 1 where covered
    Digest provenance;

    SamplingMap() = default;
    SamplingMap(int w, int h)
        : width(w), height(h),
          src_uv(static_cast<std::size_t>(w) * h * 2, kUnmappedUv),
          mask(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t pixel_count() const { return mask.size(); }

    std::size_t covered_count() const {
        return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
    }

    double coverage() const {
        return mask.empty() ? 0.0 : static_cast<double>(covered_count()) / static_cast<double>(mask.size());
    }

    Vec2 source(std::size_t pixel) const { return {src_uv[2 * pixel], src_uv[2 * pixel + 1]}; }

    friend bool operator==(const SamplingMap&, const SamplingMap&) = default;
};

/// A target triangle and the source triangle it pulls texels from.
struct ResolvedPair {
    Triangle2D target;
    Triangle2D source;
    std::uint32_t target_face = 0;
};

struct ResolvedPairs {
    std::vector<ResolvedPair> pairs;   ///< ascending target_face
    std::size_t skipped_unmapped = 0;  ///< faces with a corner outside the map
    std::size_t skipped_degenerate = 0;

    std::size_t skipped() const { return skipped_unmapped + skipped_degenerate; }
};

/// Pairs every fully mapped, non-degenerate target face with its source
/// triangle.
///
/// Vertex mode: each target corner's position maps to a source position,
/// whose UV is taken from the lowest-index source face that uses it (first
/// corner in that face). Face mode: corners pair up by order.
inline ResolvedPairs resolve_pairs(const UvMesh& target, const UvMesh& source, const CorrespondenceMap& m) {
    m.validate(target, source);
    ResolvedPairs out;

    std::vector<std::optional<std::uint32_t>> first_uv;
    if (m.mode == CorrespondenceMode::vertex) {
        first_uv.resize(source.positions.size());
        for (const Face& f : source.faces)
            for (const Corner& c : f)
                if (!first_uv[c.position]) first_uv[c.position] = c.uv;
    }

    for (std::size_t fi = 0; fi < target.faces.size(); ++fi) {
        const Triangle2D tgt = target.uv_triangle(fi);
        std::optional<Triangle2D> src;
        if (m.mode == CorrespondenceMode::face) {
            if (auto s = m.lookup(static_cast<std::uint32_t>(fi))) src = source.uv_triangle(*s);
        } else {
            std::array<Vec2, 3> corners{};
            bool mapped = true;
            for (int k = 0; k < 3 && mapped; ++k) {
                const auto sp = m.lookup(target.faces[fi][k].position);
                if (!sp || !first_uv[*sp]) {
                    mapped = false;
                } else {
                    corners[k] = source.uv_coords[*first_uv[*sp]];
                }
            }
            if (mapped) src = Triangle2D{corners[0], corners[1], corners[2]};
        }
        if (!src) {
            ++out.skipped_unmapped;
        } else if (is_degenerate(tgt)) {
            ++out.skipped_degenerate;
        } else {
            out.pairs.push_back({tgt, *src, static_cast<std::uint32_t>(fi)});
        }
    }
    return out;
}

namespace detail {

/// Source UV for the pixel center `p`, or nothing if `p` lies outside the
/// pair's target triangle. Identical triangles map `p` onto itself exactly.
inline std::optional<Vec2> source_point(Vec2 p, const ResolvedPair& pair, double eps) {
    const BaryCoords bc = barycentric(p, pair.target);
    if (!bc.inside(eps)) return std::nullopt;
    if (pair.source == pair.target) return p;
    const Vec2 q = map_source_point(bc, pair.source);
    return Vec2{std::clamp(q.u, 0.0, 1.0), std::clamp(q.v, 0.0, 1.0)};
}

struct PixelRect {
    int x0, x1, row0, row1;  ///< inclusive; empty when x0 > x1 or row0 > row1
};

/// Pixels whose centers might pass the inside test, padded by one pixel.
inline PixelRect pixel_bounds(const Triangle2D& t, int w, int h) {
    const double umin = std::min({t.a.u, t.b.u, t.c.u}), umax = std::max({t.a.u, t.b.u, t.c.u});
    const double vmin = std::min({t.a.v, t.b.v, t.c.v}), vmax = std::max({t.a.v, t.b.v, t.c.v});
    const int x0 = std::max(0, static_cast<int>(std::ceil(umin * w - 0.5)) - 1);
    const int x1 = std::min(w - 1, static_cast<int>(std::floor(umax * w - 0.5)) + 1);
    const int j0 = std::max(0, static_cast<int>(std::ceil(vmin * h - 0.5)) - 1);
    const int j1 = std::min(h - 1, static_cast<int>(std::floor(vmax * h - 0.5)) + 1);
    return {x0, x1, h - 1 - j1, h - 1 - j0};
}

inline void store(SamplingMap& map, std::size_t pixel, Vec2 q) {
    map.mask[pixel] = 1;
    map.src_uv[2 * pixel] = static_cast<float>(q.u);
    map.src_uv[2 * pixel + 1] = static_cast<float>(q.v);
}

}  // namespace detail

/// Rasterizes every pair's target triangle into a width x height grid and
/// stores the barycentric image of each covered pixel center in source UV.
///
/// A pixel is covered when all barycentric weights are >= -eps. Where
/// triangles overlap, the pair with the lowest target_face keeps the pixel.
/// `pairs` must be sorted by target_face (resolve_pairs output is). Work is
/// split into row bands; every band walks all pairs in order, so the result
/// does not depend on `threads`. When `owner` is given it receives the
/// owning target_face per pixel, -1 where uncovered.
inline SamplingMap build_sampling_map(std::span<const ResolvedPair> pairs, const BuildParams& params,
                                      unsigned threads = 0, std::vector<std::int64_t>* owner = nullptr) {
    if (params.width < 1 || params.height < 1) throw ValidationError("sampling map dimensions must be >= 1");
    if (!std::is_sorted(pairs.begin(), pairs.end(),
                        [](const ResolvedPair& a, const ResolvedPair& b) { return a.target_face < b.target_face; }))
        throw ValidationError("resolved pairs must be sorted by target face");

    const int w = params.width, h = params.height;
    SamplingMap map(w, h);
    if (owner) owner->assign(map.pixel_count(), -1);

    std::vector<detail::PixelRect> rects;
    rects.reserve(pairs.size());
    for (const auto& p : pairs) rects.push_back(detail::pixel_bounds(p.target, w, h));

    parallel_bands(h, threads, [&](int band0, int band1) {
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto& r = rects[k];
            const int row0 = std::max(r.row0, band0), row1 = std::min(r.row1, band1 - 1);
            for (int row = row0; row <= row1; ++row) {
                for (int x = r.x0; x <= r.x1; ++x) {
                    const std::size_t px = static_cast<std::size_t>(row) * w + x;
                    if (map.mask[px]) continue;
                    if (auto q = detail::source_point(pixel_center_uv(x, row, w, h), pairs[k], params.eps)) {
                        detail::store(map, px, *q);
                        if (owner) (*owner)[px] = pairs[k].target_face;
                    }
                }
            }
        }
    });
    return map;
}

struct BuildResult {
    SamplingMap map;
    std::size_t skipped_unmapped = 0;
    std::size_t skipped_degenerate = 0;
    std::size_t pair_count = 0;
};

/// Resolves, rasterizes and stamps the map with its provenance digest.
inline BuildResult build_sampling_map(const UvMesh& target, const UvMesh& source, const CorrespondenceMap& m,
                                      const BuildParams& params, unsigned threads = 0) {
    const ResolvedPairs resolved = resolve_pairs(target, source, m);
    BuildResult out;
    out.map = build_sampling_map(resolved.pairs, params, threads);
    out.map.provenance = fingerprint(source, target, m, params);
    out.skipped_unmapped = resolved.skipped_unmapped;
    out.skipped_degenerate = resolved.skipped_degenerate;
    out.pair_count = resolved.pairs.size();
    return out;
}

}  // namespace uvt
