#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "uvtransfer/errors.hpp"
#include "uvtransfer/geometry.hpp"
#include "uvtransfer/image_space.hpp"
#include "uvtransfer/parallel.hpp"
#include "uvtransfer/sampling_map.hpp"
#include "uvtransfer/texture.hpp"
#include "uvtransfer/transfer.hpp"

namespace uvt {

/// q = linear * p + translation, in UV units.
struct AffineTransform2D {
    double m00 = 1.0, m01 = 0.0;
    double m10 = 0.0, m11 = 1.0;
    double tu = 0.0, tv = 0.0;

    Vec2 operator()(Vec2 p) const { return {m00 * p.u + m01 * p.v + tu, m10 * p.u + m11 * p.v + tv}; }

    static AffineTransform2D identity() { return {}; }
};

/// The affine map taking tgt.a, tgt.b, tgt.c onto src.a, src.b, src.c.
/// Solved as L = S * T^-1 over the edge matrices, t = src.a - L * tgt.a.
/// Equal triangles give the exact identity.
inline AffineTransform2D affine_from_triangles(const Triangle2D& tgt, const Triangle2D& src) {
    if (is_degenerate(tgt)) throw DegenerateTriangleError();
    if (tgt == src) return AffineTransform2D::identity();
    const Vec2 t1 = tgt.b - tgt.a, t2 = tgt.c - tgt.a;
    const Vec2 s1 = src.b - src.a, s2 = src.c - src.a;
    const double det = cross(t1, t2);
    // T^-1 = [ t2.v -t2.u ; -t1.v t1.u ] / det
    const double i00 = t2.v / det, i01 = -t2.u / det;
    const double i10 = -t1.v / det, i11 = t1.u / det;
    AffineTransform2D a;
    a.m00 = s1.u * i00 + s2.u * i10;
    a.m01 = s1.u * i01 + s2.u * i11;
    a.m10 = s1.v * i00 + s2.v * i10;
    a.m11 = s1.v * i01 + s2.v * i11;
    a.tu = src.a.u - (a.m00 * tgt.a.u + a.m01 * tgt.a.v);
    a.tv = src.a.v - (a.m10 * tgt.a.u + a.m11 * tgt.a.v);
    return a;
}

struct BaselineOptions {
    Sampling sampling = Sampling::bilinear;
    double eps = kDefaultInsideEps;
    /// Split each triangle's work into row bands across threads. Off by
    /// default: the baseline models the single-threaded per-face method.
    bool parallel = false;
    unsigned threads = 0;
};

/// Per-triangle affine warp, the conventional transfer the sampling map
/// replaces.
///
/// Nothing is cached between calls. For each pair, in target-face order, the
/// affine transform is solved, the target triangle is rasterized into a
/// fresh full-size layer with every covered pixel center warped into the
/// source and sampled, and the layer is composited over the canvas where no
/// earlier face already owns the pixel. Coverage, ownership, float storage
/// of the warped coordinate and fill rules match build_sampling_map + apply.
/// When `coords` is given it receives the warped coordinates as a map.
inline Texture transfer_affine(std::span<const ResolvedPair> pairs, const Texture& src, int width, int height,
                               const BlendSettings& blend, const BaselineOptions& opts = {},
                               SamplingMap* coords = nullptr) {
    if (width < 1 || height < 1) throw ValidationError("output dimensions must be >= 1");
    if (src.empty()) throw ValidationError("source texture is empty");
    detail::check_blend(blend, width, height);

    const std::size_t n = static_cast<std::size_t>(width) * height;
    const int ch = src.channels;
    SamplingMap canvas(width, height);  // owned pixels and their warped coordinates
    std::vector<double> canvas_val(n * ch, 0.0);
    std::vector<std::uint8_t> layer_mask(n);
    std::vector<float> layer_uv(n * 2);
    std::vector<double> layer_val(n * ch);

    const unsigned threads = opts.parallel ? opts.threads : 1;
    for (const ResolvedPair& pair : pairs) {
        const AffineTransform2D warp = affine_from_triangles(pair.target, pair.source);
        const bool same = pair.target == pair.source;
        const auto r = detail::pixel_bounds(pair.target, width, height);
        parallel_bands(height, threads, [&](int band0, int band1) {
            const std::size_t lo = static_cast<std::size_t>(band0) * width;
            const std::size_t hi = static_cast<std::size_t>(band1) * width;
            std::fill(layer_mask.begin() + lo, layer_mask.begin() + hi, std::uint8_t{0});

            const int row0 = std::max(r.row0, band0), row1 = std::min(r.row1, band1 - 1);
            for (int row = row0; row <= row1; ++row) {
                for (int x = r.x0; x <= r.x1; ++x) {
                    const Vec2 p = pixel_center_uv(x, row, width, height);
                    if (!barycentric(p, pair.target).inside(opts.eps)) continue;
                    Vec2 q = warp(p);
                    if (!same) q = {std::clamp(q.u, 0.0, 1.0), std::clamp(q.v, 0.0, 1.0)};
                    const float qu = static_cast<float>(q.u), qv = static_cast<float>(q.v);
                    const std::size_t px = static_cast<std::size_t>(row) * width + x;
                    const Texel s = sample(src, {qu, qv}, opts.sampling);
                    layer_mask[px] = 1;
                    layer_uv[2 * px] = qu;
                    layer_uv[2 * px + 1] = qv;
                    for (int c = 0; c < ch; ++c) layer_val[px * ch + c] = s[c];
                }
            }

            for (std::size_t px = lo; px < hi; ++px) {
                if (!layer_mask[px] || canvas.mask[px]) continue;
                canvas.mask[px] = 1;
                canvas.src_uv[2 * px] = layer_uv[2 * px];
                canvas.src_uv[2 * px + 1] = layer_uv[2 * px + 1];
                for (int c = 0; c < ch; ++c) canvas_val[px * ch + c] = layer_val[px * ch + c];
            }
        });
    }

    std::vector<double> alpha;
    if (blend.has_fill() && blend.feather_radius > 0) alpha = feather_weights(canvas, blend.feather_radius);
    Texture out(width, height, ch);
    for (int row = 0; row < height; ++row) {
        for (int x = 0; x < width; ++x) {
            const std::size_t px = static_cast<std::size_t>(row) * width + x;
            Texel s{};
            for (int c = 0; c < ch; ++c) s[c] = canvas_val[px * ch + c];
            detail::compose_pixel(out, x, row, canvas.mask[px] != 0, s, alpha.empty() ? 1.0 : alpha[px], blend);
        }
    }
    if (coords) *coords = std::move(canvas);
    return out;
}

}  // namespace uvt
