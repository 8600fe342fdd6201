#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "uvtransfer/digest.hpp"
#include "uvtransfer/errors.hpp"
#include "uvtransfer/sampling_map.hpp"

namespace uvt {

// SMAP file layout, all integers little-endian:
//
//   0   "SMAP"
//   4   u32 version (1)
//   8   u32 width
//   12  u32 height
//   16  16-byte provenance digest
//   32  width*height records, row-major from the top row:
//         f32 source u, f32 source v, u8 mask
//   ..  u64 checksum: first 8 bytes of SHA-256 over every preceding byte
//
// Uncovered pixels store (-1, -1).

inline constexpr std::uint32_t kSmapVersion = 1;
inline constexpr std::size_t kSmapHeaderBytes = 32;
inline constexpr std::size_t kSmapRecordBytes = 9;
inline constexpr std::size_t kSmapChecksumBytes = 8;

inline std::size_t smap_file_size(int width, int height) {
    return kSmapHeaderBytes + static_cast<std::size_t>(width) * height * kSmapRecordBytes + kSmapChecksumBytes;
}

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& b, std::uint32_t x) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

inline std::uint64_t get_u64(const std::uint8_t* p) {
    return std::uint64_t(get_u32(p)) | std::uint64_t(get_u32(p + 4)) << 32;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_map(const SamplingMap& map) {
    std::vector<std::uint8_t> b;
    b.reserve(smap_file_size(map.width, map.height));
    b.insert(b.end(), {'S', 'M', 'A', 'P'});
    detail::put_u32(b, kSmapVersion);
    detail::put_u32(b, static_cast<std::uint32_t>(map.width));
    detail::put_u32(b, static_cast<std::uint32_t>(map.height));
    b.insert(b.end(), map.provenance.bytes.begin(), map.provenance.bytes.end());
    for (std::size_t px = 0; px < map.pixel_count(); ++px) {
        detail::put_u32(b, std::bit_cast<std::uint32_t>(map.src_uv[2 * px]));
        detail::put_u32(b, std::bit_cast<std::uint32_t>(map.src_uv[2 * px + 1]));
        b.push_back(map.mask[px]);
    }
    const std::uint64_t sum = Hasher{}.bytes(b).finish_u64();
    detail::put_u32(b, static_cast<std::uint32_t>(sum));
    detail::put_u32(b, static_cast<std::uint32_t>(sum >> 32));
    return b;
}

/// Decodes an SMAP image. Checks run in order: magic and version, size,
/// checksum, record sanity, then (when `expected` is given) provenance.
inline SamplingMap decode_map(const std::vector<std::uint8_t>& b, const std::optional<Digest>& expected = {}) {
    if (b.size() < kSmapHeaderBytes + kSmapChecksumBytes) throw CacheFormatError("SMAP file truncated");
    if (std::memcmp(b.data(), "SMAP", 4) != 0) throw CacheFormatError("not an SMAP file (bad magic)");
    if (const auto v = detail::get_u32(&b[4]); v != kSmapVersion)
        throw CacheFormatError("unsupported SMAP version " + std::to_string(v));
    const std::uint32_t w = detail::get_u32(&b[8]), h = detail::get_u32(&b[12]);
    if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16) || b.size() != smap_file_size(int(w), int(h)))
        throw CacheFormatError("SMAP size does not match its header");
    const std::size_t body = b.size() - kSmapChecksumBytes;
    const std::uint64_t sum = Hasher{}.bytes({b.data(), body}).finish_u64();
    if (sum != detail::get_u64(&b[body])) throw CacheChecksumError("SMAP checksum mismatch (file is corrupted)");

    SamplingMap map(static_cast<int>(w), static_cast<int>(h));
    std::memcpy(map.provenance.bytes.data(), &b[16], map.provenance.bytes.size());
    const std::uint8_t* rec = &b[kSmapHeaderBytes];
    for (std::size_t px = 0; px < map.pixel_count(); ++px, rec += kSmapRecordBytes) {
        const float u = std::bit_cast<float>(detail::get_u32(rec));
        const float v = std::bit_cast<float>(detail::get_u32(rec + 4));
        const std::uint8_t m = rec[8];
        const bool ok = m == 1 ? (u >= 0.0f && u <= 1.0f && v >= 0.0f && v <= 1.0f)
                               : (m == 0 && u == kUnmappedUv && v == kUnmappedUv);
        if (!ok) throw CacheFormatError("SMAP record " + std::to_string(px) + " is inconsistent");
        map.src_uv[2 * px] = u;
        map.src_uv[2 * px + 1] = v;
        map.mask[px] = m;
    }
    if (expected && *expected != map.provenance)
        throw StaleCacheError("sampling map was built from different inputs (provenance " + map.provenance.hex() +
                              ", expected " + expected->hex() + ")");
    return map;
}

inline void save_map(const SamplingMap& map, const std::string& path) {
    const auto bytes = encode_map(map);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw IoError("failed writing '" + path + "'");
}

inline SamplingMap load_map(const std::string& path, const std::optional<Digest>& expected = {}) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(in.tellg()));
    in.seekg(0);
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size())))
        throw IoError("failed reading '" + path + "'");
    return decode_map(bytes, expected);
}

}  // namespace uvt
