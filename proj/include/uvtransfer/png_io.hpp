#pragma once

#include <png.h>

#include <string>

#include "uvtransfer/errors.hpp"
#include "uvtransfer/texture.hpp"

namespace uvt {

/// Reads an 8-bit PNG. Images with an alpha channel load as RGBA, all others
/// (gray, palette, RGB) as RGB.
inline Texture read_png(const std::string& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw IoError("cannot read PNG '" + path + "': " + image.message);
    const bool alpha = (image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    image.format = alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
    Texture tex(static_cast<int>(image.width), static_cast<int>(image.height), alpha ? 4 : 3);
    if (!png_image_finish_read(&image, nullptr, tex.data.data(), 0, nullptr)) {
        png_image_free(&image);
        throw IoError("cannot decode PNG '" + path + "': " + image.message);
    }
    return tex;
}

inline void write_png(const std::string& path, const Texture& tex) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(tex.width);
    image.height = static_cast<png_uint_32>(tex.height);
    image.format = tex.channels == 4 ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, tex.data.data(), 0, nullptr))
        throw IoError("cannot write PNG '" + path + "': " + image.message);
}

}  // namespace uvt
