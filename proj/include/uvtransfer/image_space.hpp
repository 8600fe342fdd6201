#pragma once

#include "uvtransfer/geometry.hpp"

namespace uvt {

// Pixel grids are stored top row first while UV v grows upwards. These two
// functions are the only place where that flip happens.

/// UV coordinate of the center of pixel (x, row) in a w x h grid, row 0 at
/// the top: ((x + 0.5) / w, (j + 0.5) / h) with j = h - 1 - row.
inline Vec2 pixel_center_uv(int x, int row, int w, int h) {
    const int j = h - 1 - row;
    return {(x + 0.5) / w, (j + 0.5) / h};
}

struct TexelCoord {
    double x;    ///< columns, texel centers at integers
    double row;  ///< rows from the top, texel centers at integers
};

/// Continuous texel coordinate of a UV point; inverse of pixel_center_uv.
inline TexelCoord uv_to_texel(Vec2 uv, int w, int h) {
    const double j = uv.v * h - 0.5;
    return {uv.u * w - 0.5, (h - 1) - j};
}

}  // namespace uvt
