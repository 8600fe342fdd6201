#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <variant>
#include <vector>

#include "uvtransfer/errors.hpp"
#include "uvtransfer/parallel.hpp"
#include "uvtransfer/sampling_map.hpp"
#include "uvtransfer/texture.hpp"
#include "uvtransfer/timing.hpp"

namespace uvt {

/// Constant fill color, channels in [0,1].
struct FillColor {
    double r = 0.0, g = 0.0, b = 0.0;
};

/// What uncovered pixels receive, and how wide the seam blend is.
///
/// `fill` is empty (uncovered pixels become black, alpha 0 for RGBA), a
/// constant color, or a texture at the output resolution (typically a mean
/// texture). Within `feather_radius` pixels of the coverage boundary the
/// sampled value fades into the fill. No blending happens without a fill.
struct BlendSettings {
    std::variant<std::monostate, FillColor, std::shared_ptr<const Texture>> fill;
    int feather_radius = 4;

    static BlendSettings none() { return {}; }
    static BlendSettings color(FillColor c, int feather = 4) { return {c, feather}; }
    static BlendSettings texture(Texture t, int feather = 4) {
        return {std::make_shared<const Texture>(std::move(t)), feather};
    }
    /// Non-owning: `t` must outlive every use of the settings.
    static BlendSettings texture_view(const Texture& t, int feather = 4) {
        return {std::shared_ptr<const Texture>(std::shared_ptr<const Texture>{}, &t), feather};
    }

    bool has_fill() const { return !std::holds_alternative<std::monostate>(fill); }
};

/// Euclidean distance from each pixel to the nearest pixel with mask == 0
/// (0 on unmasked pixels, +inf if every pixel is masked). Separable exact
/// transform: squared distances along columns, then along rows.
inline std::vector<double> distance_to_unmasked(std::span<const std::uint8_t> mask, int w, int h) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) d[i] = mask[i] ? inf : 0.0;

    // Lower envelope of parabolas for one line of samples.
    const int n_max = std::max(w, h);
    std::vector<double> f(n_max), out(n_max), z(n_max + 1);
    std::vector<int> v(n_max);
    auto transform_line = [&](int n) {
        int k = -1;
        for (int q = 0; q < n; ++q) {
            if (f[q] == inf) continue;
            while (k >= 0) {
                const double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * (q - v[k]));
                if (s <= z[k]) {
                    --k;
                } else {
                    break;
                }
            }
            ++k;
            v[k] = q;
            z[k] = k == 0 ? -inf : ((f[q] + double(q) * q) - (f[v[k - 1]] + double(v[k - 1]) * v[k - 1])) /
                                       (2.0 * (q - v[k - 1]));
            z[k + 1] = inf;
        }
        if (k < 0) {
            std::fill(out.begin(), out.begin() + n, inf);
            return;
        }
        int j = 0;
        for (int q = 0; q < n; ++q) {
            while (z[j + 1] < q) ++j;
            const double dq = q - v[j];
            out[q] = dq * dq + f[v[j]];
        }
    };

    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = d[static_cast<std::size_t>(y) * w + x];
        transform_line(h);
        for (int y = 0; y < h; ++y) d[static_cast<std::size_t>(y) * w + x] = out[y];
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = d[static_cast<std::size_t>(y) * w + x];
        transform_line(w);
        for (int x = 0; x < w; ++x) d[static_cast<std::size_t>(y) * w + x] = std::sqrt(out[x]);
    }
    return d;
}

/// Blend weight of the sampled value per pixel: min(1, d / (radius + 1))
/// with d the distance to the nearest uncovered pixel, so pixels further
/// than `radius` from the boundary keep their sampled value.
inline std::vector<double> feather_weights(const SamplingMap& map, int radius) {
    std::vector<double> a = distance_to_unmasked(map.mask, map.width, map.height);
    for (double& x : a) x = std::min(1.0, x / (radius + 1.0));
    return a;
}

namespace detail {

inline void check_blend(const BlendSettings& blend, int w, int h) {
    if (blend.feather_radius < 0 || blend.feather_radius > std::min(w, h) / 4)
        throw ValidationError("feather radius must be in [0, min(width,height)/4]");
    if (auto* t = std::get_if<std::shared_ptr<const Texture>>(&blend.fill)) {
        if (!*t || (*t)->empty()) throw ValidationError("fill texture is empty");
        if ((*t)->width != w || (*t)->height != h)
            throw ShapeMismatchError("fill texture is " + shape_string((*t)->width, (*t)->height) +
                                     " but the output is " + shape_string(w, h));
    }
}

inline double fill_value(const BlendSettings& blend, int x, int row, int c) {
    if (const auto* col = std::get_if<FillColor>(&blend.fill)) {
        return c == 0 ? col->r : c == 1 ? col->g : c == 2 ? col->b : 1.0;
    }
    if (const auto* t = std::get_if<std::shared_ptr<const Texture>>(&blend.fill)) {
        return c < (*t)->channels ? (*t)->value(x, row, c) : 1.0;
    }
    return 0.0;
}

/// Writes one output pixel from its (optional) sample, fill and weight.
inline void compose_pixel(Texture& out, int x, int row, bool covered, const Texel& s, double a,
                          const BlendSettings& blend) {
    for (int c = 0; c < out.channels; ++c) {
        double v;
        if (!blend.has_fill()) {
            v = covered ? s[c] : 0.0;
        } else if (!covered) {
            v = fill_value(blend, x, row, c);
        } else {
            v = a * s[c] + (1.0 - a) * fill_value(blend, x, row, c);
        }
        out.at(x, row, c) = quantize(v);
    }
}

}  // namespace detail

/// A sampling map prepared for repeated transfers.
///
/// Construction validates the blend settings and computes the feather
/// weights; apply() is then one gather per output pixel. Keeps a reference
/// to `map`, which must outlive the resampler.
class Resampler {
public:
    Resampler(const SamplingMap& map, BlendSettings blend, Sampling sampling = Sampling::bilinear,
              unsigned threads = 0)
        : map_(map), blend_(std::move(blend)), sampling_(sampling), threads_(threads) {
        detail::check_blend(blend_, map_.width, map_.height);
        if (blend_.has_fill() && blend_.feather_radius > 0) alpha_ = feather_weights(map_, blend_.feather_radius);
    }

    const SamplingMap& map() const { return map_; }

    Texture apply(const Texture& src) const {
        if (src.empty()) throw ValidationError("source texture is empty");
        Texture out(map_.width, map_.height, src.channels);
        parallel_bands(map_.height, threads_, [&](int row0, int row1) {
            for (int row = row0; row < row1; ++row) {
                for (int x = 0; x < map_.width; ++x) {
                    const std::size_t px = static_cast<std::size_t>(row) * map_.width + x;
                    const bool covered = map_.mask[px] != 0;
                    const Texel s = covered ? sample(src, map_.source(px), sampling_) : Texel{};
                    const double a = alpha_.empty() ? 1.0 : alpha_[px];
                    detail::compose_pixel(out, x, row, covered, s, a, blend_);
                }
            }
        });
        return out;
    }

private:
    const SamplingMap& map_;
    BlendSettings blend_;
    Sampling sampling_;
    unsigned threads_;
    std::vector<double> alpha_;
};

/// One-shot transfer: src resampled into the map's target layout.
inline Texture apply(const SamplingMap& map, const Texture& src, const BlendSettings& blend,
                     Sampling sampling = Sampling::bilinear, unsigned threads = 0) {
    return Resampler(map, blend, sampling, threads).apply(src);
}

struct RoundTripResult {
    Texture intermediate;   ///< original carried into the forward target layout
    Texture reconstructed;  ///< carried back; uncovered pixels from the original
    double forward_seconds = 0.0;
    double reverse_seconds = 0.0;
};

/// Transfers `original` through `fwd` and back through `rev`. Pixels that
/// `rev` does not cover are taken from `original`, with the same feather
/// radius as `blend`; `blend` itself applies to the forward pass.
inline RoundTripResult roundtrip(const SamplingMap& fwd, const SamplingMap& rev, const Texture& original,
                                 const BlendSettings& blend, Sampling sampling = Sampling::bilinear,
                                 unsigned threads = 0) {
    if (rev.width != original.width || rev.height != original.height)
        throw ShapeMismatchError("reverse map is " + shape_string(rev.width, rev.height) + " but the original is " +
                                 shape_string(original.width, original.height));
    RoundTripResult r;
    Stopwatch sw;
    r.intermediate = apply(fwd, original, blend, sampling, threads);
    r.forward_seconds = sw.seconds();
    sw.reset();
    r.reconstructed = apply(rev, r.intermediate, BlendSettings::texture_view(original, blend.feather_radius),
                            sampling, threads);
    r.reverse_seconds = sw.seconds();
    return r;
}

}  // namespace uvt
