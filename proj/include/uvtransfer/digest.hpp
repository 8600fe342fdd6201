#pragma once

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "uvtransfer/errors.hpp"

namespace uvt {

/// 128-bit content digest (truncated SHA-256).
struct Digest {
    std::array<std::uint8_t, 16> bytes{};

    friend bool operator==(const Digest&, const Digest&) = default;

    std::string hex() const {
        static constexpr char kHex[] = "0123456789abcdef";
        std::string s;
        s.reserve(32);
        for (std::uint8_t b : bytes) {
            s.push_back(kHex[b >> 4]);
            s.push_back(kHex[b & 0xF]);
        }
        return s;
    }
};

/// Incremental SHA-256 over a canonical little-endian encoding of scalars.
class Hasher {
public:
    Hasher() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
            throw Error("SHA-256 initialisation failed");
    }

    Hasher& bytes(std::span<const std::uint8_t> data) {
        if (!data.empty()) EVP_DigestUpdate(ctx_.get(), data.data(), data.size());
        return *this;
    }

    Hasher& text(std::string_view s) {
        u64(s.size());
        EVP_DigestUpdate(ctx_.get(), s.data(), s.size());
        return *this;
    }

    Hasher& u32(std::uint32_t x) {
        std::array<std::uint8_t, 4> b{};
        for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(x >> (8 * i));
        return bytes(b);
    }

    Hasher& u64(std::uint64_t x) {
        std::array<std::uint8_t, 8> b{};
        for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(x >> (8 * i));
        return bytes(b);
    }

    Hasher& f64(double x) { return u64(std::bit_cast<std::uint64_t>(x)); }

    Hasher& digest(const Digest& d) { return bytes(d.bytes); }

    std::array<std::uint8_t, 32> finish() {
        std::array<std::uint8_t, 32> out{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), out.data(), &len);
        return out;
    }

    Digest finish_digest() {
        const auto full = finish();
        Digest d;
        std::memcpy(d.bytes.data(), full.data(), d.bytes.size());
        return d;
    }

    /// First eight bytes of the hash read as a little-endian integer.
    std::uint64_t finish_u64() {
        const auto full = finish();
        std::uint64_t x = 0;
        for (int i = 7; i >= 0; --i) x = (x << 8) | full[i];
        return x;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace uvt
