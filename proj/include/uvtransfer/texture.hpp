#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "uvtransfer/errors.hpp"
#include "uvtransfer/geometry.hpp"
#include "uvtransfer/image_space.hpp"

namespace uvt {

/// 8-bit RGB or RGBA image, row-major, row 0 at the top.
struct Texture {
    int width = 0;
    int height = 0;
    int channels = 3;
    std::vector<std::uint8_t> data;

    Texture() = default;
    Texture(int w, int h, int c) : width(w), height(h), channels(c) {
        if (w < 1 || h < 1) throw ValidationError("texture dimensions must be >= 1");
        if (c != 3 && c != 4) throw ValidationError("texture must have 3 or 4 channels");
        data.assign(static_cast<std::size_t>(w) * h * c, 0);
    }

    bool empty() const { return data.empty(); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    std::uint8_t& at(int x, int row, int c) {
        return data[(static_cast<std::size_t>(row) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int row, int c) const {
        return data[(static_cast<std::size_t>(row) * width + x) * channels + c];
    }

    /// Channel value in [0,1].
    double value(int x, int row, int c) const { return at(x, row, c) / 255.0; }

    /// Value in [0,1] of the i-th entry of `data`.
    double sample(std::size_t i) const { return data[i] / 255.0; }

    bool same_shape(const Texture& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }

    friend bool operator==(const Texture&, const Texture&) = default;
};

/// Floating-point image with channel values nominally in [0,1]; same layout
/// as Texture.
struct FloatImage {
    int width = 0;
    int height = 0;
    int channels = 3;
    std::vector<double> data;

    FloatImage() = default;
    FloatImage(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill) {}

    explicit FloatImage(const Texture& t) : width(t.width), height(t.height), channels(t.channels), data(t.data.size()) {
        for (std::size_t i = 0; i < data.size(); ++i) data[i] = t.sample(i);
    }

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    double sample(std::size_t i) const { return data[i]; }
};

inline std::string shape_string(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

/// Floating-point texel; only the first `channels` entries are meaningful.
using Texel = std::array<double, 4>;

enum class Sampling { bilinear, nearest };

/// Bilinear interpolation between the four texel centers around `uv`.
/// Coordinates clamp to the edge texels.
inline Texel sample_bilinear(const Texture& tex, Vec2 uv) {
    const TexelCoord tc = uv_to_texel(uv, tex.width, tex.height);
    const double fx = std::clamp(tc.x, 0.0, static_cast<double>(tex.width - 1));
    const double fy = std::clamp(tc.row, 0.0, static_cast<double>(tex.height - 1));
    const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
    const int x1 = std::min(x0 + 1, tex.width - 1), y1 = std::min(y0 + 1, tex.height - 1);
    const double wx = fx - x0, wy = fy - y0;
    Texel out{};
    for (int c = 0; c < tex.channels; ++c) {
        const double top = (1.0 - wx) * tex.value(x0, y0, c) + wx * tex.value(x1, y0, c);
        const double bottom = (1.0 - wx) * tex.value(x0, y1, c) + wx * tex.value(x1, y1, c);
        out[c] = (1.0 - wy) * top + wy * bottom;
    }
    return out;
}

/// Value of the texel whose center is closest to `uv` (ties round up).
inline Texel sample_nearest(const Texture& tex, Vec2 uv) {
    const TexelCoord tc = uv_to_texel(uv, tex.width, tex.height);
    const int x = std::clamp(static_cast<int>(std::floor(tc.x + 0.5)), 0, tex.width - 1);
    const int y = std::clamp(static_cast<int>(std::floor(tc.row + 0.5)), 0, tex.height - 1);
    Texel out{};
    for (int c = 0; c < tex.channels; ++c) out[c] = tex.value(x, y, c);
    return out;
}

inline Texel sample(const Texture& tex, Vec2 uv, Sampling mode) {
    return mode == Sampling::bilinear ? sample_bilinear(tex, uv) : sample_nearest(tex, uv);
}

/// [0,1] to 8 bits, rounding half away from zero.
inline std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace uvt
