#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uvtransfer/errors.hpp"
#include "uvtransfer/parallel.hpp"
#include "uvtransfer/texture.hpp"

namespace uvt {

// All metrics work on channel values in [0,1] and accept Texture or
// FloatImage. An empty mask means "every pixel". Per-row partial sums are added in row order, so results do not
// depend on the thread count.

namespace detail {

template <class Image>
void check_pair(const Image& a, const Image& b, std::span<const std::uint8_t> mask) {
    if (a.width != b.width || a.height != b.height || a.channels != b.channels)
        throw ShapeMismatchError("images differ in shape: " + shape_string(a.width, a.height) + "x" +
                                 std::to_string(a.channels) + " vs " + shape_string(b.width, b.height) + "x" +
                                 std::to_string(b.channels));
    if (!mask.empty() && mask.size() != a.pixel_count())
        throw ShapeMismatchError("mask size does not match the images");
}

/// Sum over rows of per-row partial sums of f(px, c) and the number of
/// (pixel, channel) terms.
template <class Image, class Fn>
std::pair<double, std::size_t> masked_sum(const Image& a, std::span<const std::uint8_t> mask, unsigned threads,
                                          Fn&& f) {
    std::vector<double> row_sum(a.height, 0.0);
    std::vector<std::size_t> row_n(a.height, 0);
    parallel_bands(a.height, threads, [&](int r0, int r1) {
        for (int row = r0; row < r1; ++row) {
            double s = 0.0;
            std::size_t n = 0;
            for (int x = 0; x < a.width; ++x) {
                const std::size_t px = static_cast<std::size_t>(row) * a.width + x;
                if (!mask.empty() && !mask[px]) continue;
                for (int c = 0; c < a.channels; ++c) s += f(px * a.channels + c);
                n += a.channels;
            }
            row_sum[row] = s;
            row_n[row] = n;
        }
    });
    double total = 0.0;
    std::size_t n = 0;
    for (int row = 0; row < a.height; ++row) {
        total += row_sum[row];
        n += row_n[row];
    }
    return {total, n};
}

}  // namespace detail

/// Mean absolute difference over (masked) pixels and all channels. NaN if
/// the mask is empty of pixels.
template <class Image>
double l1_distance(const Image& a, const Image& b, std::span<const std::uint8_t> mask = {},
                          unsigned threads = 0) {
    detail::check_pair(a, b, mask);
    auto [s, n] = detail::masked_sum(a, mask, threads, [&](std::size_t i) {
        return std::abs(a.sample(i) - b.sample(i));
    });
    return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

template <class Image>
double mean_squared_error(const Image& a, const Image& b, std::span<const std::uint8_t> mask = {},
                                 unsigned threads = 0) {
    detail::check_pair(a, b, mask);
    auto [s, n] = detail::masked_sum(a, mask, threads, [&](std::size_t i) {
        const double d = a.sample(i) - b.sample(i);
        return d * d;
    });
    return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

/// 10 log10(1 / MSE) with peak 1.0 (255 in 8-bit terms); +inf when MSE = 0.
template <class Image>
double psnr(const Image& a, const Image& b, std::span<const std::uint8_t> mask = {},
                   unsigned threads = 0) {
    const double mse = mean_squared_error(a, b, mask, threads);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

struct SsimParams {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double range = 1.0;
};

/// Normalized 1D Gaussian taps; the 2D window is their outer product.
inline std::vector<double> gaussian_taps(int size, double sigma) {
    std::vector<double> g(size);
    const double c = (size - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        g[i] = std::exp(-((i - c) * (i - c)) / (2.0 * sigma * sigma));
        sum += g[i];
    }
    for (double& x : g) x /= sum;
    return g;
}

/// Rec.601 luma per pixel.
template <class Image>
std::vector<double> luminance(const Image& t) {
    std::vector<double> y(t.pixel_count());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const std::size_t k = i * t.channels;
        y[i] = 0.299 * t.sample(k) + 0.587 * t.sample(k + 1) + 0.114 * t.sample(k + 2);
    }
    return y;
}

/// Mean SSIM of the luma channel over every window that lies entirely inside
/// the image (and inside the mask, if given). Gaussian window, no padding.
/// NaN when no window qualifies.
template <class Image>
double ssim(const Image& a, const Image& b, std::span<const std::uint8_t> mask = {},
                   const SsimParams& prm = {}, unsigned threads = 0) {
    detail::check_pair(a, b, mask);
    const int win = prm.window, w = a.width, h = a.height;
    if (std::min(w, h) < win)
        throw ShapeMismatchError("image " + shape_string(w, h) + " is smaller than the " + std::to_string(win) +
                                 "x" + std::to_string(win) + " SSIM window");
    const auto g = gaussian_taps(win, prm.sigma);
    const std::vector<double> ya = luminance(a), yb = luminance(b);
    const int ow = w - win + 1, oh = h - win + 1;

    // Window validity from a summed-area table of the mask.
    std::vector<std::uint32_t> sat;
    if (!mask.empty()) {
        sat.assign(static_cast<std::size_t>(w + 1) * (h + 1), 0);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                sat[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] =
                    (mask[static_cast<std::size_t>(y) * w + x] ? 1u : 0u) +
                    sat[static_cast<std::size_t>(y) * (w + 1) + x + 1] +
                    sat[static_cast<std::size_t>(y + 1) * (w + 1) + x] - sat[static_cast<std::size_t>(y) * (w + 1) + x];
    }
    const std::uint32_t full = static_cast<std::uint32_t>(win * win);
    auto window_ok = [&](int x, int y) {
        if (sat.empty()) return true;
        auto at = [&](int xx, int yy) { return sat[static_cast<std::size_t>(yy) * (w + 1) + xx]; };
        return at(x + win, y + win) - at(x, y + win) - at(x + win, y) + at(x, y) == full;
    };

    const double c1 = (prm.k1 * prm.range) * (prm.k1 * prm.range);
    const double c2 = (prm.k2 * prm.range) * (prm.k2 * prm.range);
    std::vector<double> row_sum(oh, 0.0);
    std::vector<std::size_t> row_n(oh, 0);

    // Separable filtering in chunks of output rows: the horizontal pass fills
    // 5 moments for the chunk's input rows, the vertical pass reduces them.
    constexpr int kMoments = 5;
    constexpr int kChunk = 64;
    parallel_bands(oh, threads, [&](int r0, int r1) {
        std::vector<double> hz(static_cast<std::size_t>(kChunk + win - 1) * ow * kMoments);
        for (int y0 = r0; y0 < r1; y0 += kChunk) {
            const int y1 = std::min(r1, y0 + kChunk);
            for (int y = y0; y < y1 + win - 1; ++y) {
                for (int x = 0; x < ow; ++x) {
                    double m[kMoments] = {0, 0, 0, 0, 0};
                    for (int k = 0; k < win; ++k) {
                        const std::size_t i = static_cast<std::size_t>(y) * w + x + k;
                        const double va = ya[i], vb = yb[i];
                        m[0] += g[k] * va;
                        m[1] += g[k] * vb;
                        m[2] += g[k] * va * va;
                        m[3] += g[k] * vb * vb;
                        m[4] += g[k] * va * vb;
                    }
                    for (int q = 0; q < kMoments; ++q)
                        hz[(static_cast<std::size_t>(y - y0) * ow + x) * kMoments + q] = m[q];
                }
            }
            for (int y = y0; y < y1; ++y) {
                double s = 0.0;
                std::size_t n = 0;
                for (int x = 0; x < ow; ++x) {
                    if (!window_ok(x, y)) continue;
                    double m[kMoments] = {0, 0, 0, 0, 0};
                    for (int k = 0; k < win; ++k)
                        for (int q = 0; q < kMoments; ++q)
                            m[q] += g[k] * hz[(static_cast<std::size_t>(y - y0 + k) * ow + x) * kMoments + q];
                    const double mu_a = m[0], mu_b = m[1];
                    const double var_a = m[2] - mu_a * mu_a, var_b = m[3] - mu_b * mu_b, cov = m[4] - mu_a * mu_b;
                    s += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                         ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
                    ++n;
                }
                row_sum[y] = s;
                row_n[y] = n;
            }
        }
    });
    double total = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < oh; ++y) {
        total += row_sum[y];
        n += row_n[y];
    }
    return n ? total / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

/// One evaluation run. LPIPS has a slot but is never computed here.
struct MetricsReport {
    double l1 = 0.0;
    double ssim = 1.0;
    double psnr = std::numeric_limits<double>::infinity();
    double mask_coverage = 1.0;
    std::map<std::string, double> timings;  ///< stage -> seconds
    std::optional<double> lpips;
};

inline double mask_coverage(std::span<const std::uint8_t> mask) {
    if (mask.empty()) return 1.0;
    std::size_t n = 0;
    for (auto m : mask) n += m ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(mask.size());
}

template <class Image>
MetricsReport evaluate(const Image& reference, const Image& test, std::span<const std::uint8_t> mask = {},
                              unsigned threads = 0) {
    MetricsReport r;
    r.l1 = l1_distance(reference, test, mask, threads);
    r.psnr = psnr(reference, test, mask, threads);
    r.ssim = ssim(reference, test, mask, {}, threads);
    r.mask_coverage = mask_coverage(mask);
    return r;
}

/// JSON number, with +inf written as the string "inf" and NaN as null.
inline nlohmann::ordered_json metric_json(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline nlohmann::ordered_json to_json(const MetricsReport& r) {
    nlohmann::ordered_json j;
    j["l1"] = metric_json(r.l1);
    j["ssim"] = metric_json(r.ssim);
    j["psnr"] = metric_json(r.psnr);
    j["mask_coverage"] = r.mask_coverage;
    j["lpips"] = r.lpips ? nlohmann::ordered_json(*r.lpips) : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.timings) t[k] = v;
    j["timings"] = std::move(t);
    return j;
}

}  // namespace uvt
