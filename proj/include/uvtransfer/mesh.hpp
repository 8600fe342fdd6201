#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "uvtransfer/digest.hpp"
#include "uvtransfer/errors.hpp"
#include "uvtransfer/geometry.hpp"

namespace uvt {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

/// One face corner: indices into UvMesh::positions and UvMesh::uv_coords.
struct Corner {
    std::uint32_t position = 0;
    std::uint32_t uv = 0;

    friend constexpr bool operator==(const Corner&, const Corner&) = default;
};

using Face = std::array<Corner, 3>;

/// Triangle mesh with per-corner UV coordinates. Positions are carried along
/// but never used by the transfer math. UV v is stored as read (v = 0 at the
/// bottom of the image).
struct UvMesh {
    std::vector<Vec3> positions;
    std::vector<Vec2> uv_coords;
    std::vector<Face> faces;

    std::size_t face_count() const { return faces.size(); }

    Triangle2D uv_triangle(std::size_t face) const {
        const Face& f = faces.at(face);
        return {uv_coords[f[0].uv], uv_coords[f[1].uv], uv_coords[f[2].uv]};
    }

    /// Throws ValidationError if any index is out of range or a UV lies
    /// outside [0,1]^2.
    void validate() const {
        for (std::size_t i = 0; i < uv_coords.size(); ++i) {
            const Vec2 t = uv_coords[i];
            if (!(t.u >= 0.0 && t.u <= 1.0 && t.v >= 0.0 && t.v <= 1.0))
                throw ValidationError("uv coordinate " + std::to_string(i) + " outside [0,1]^2");
        }
        for (std::size_t i = 0; i < faces.size(); ++i) {
            for (const Corner& c : faces[i]) {
                if (c.position >= positions.size() || c.uv >= uv_coords.size())
                    throw ValidationError("face " + std::to_string(i) + " references a missing vertex");
            }
        }
    }

    friend bool operator==(const UvMesh&, const UvMesh&) = default;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

inline double parse_double(std::string_view s, std::size_t line) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("invalid number '" + std::string(s) + "'", line);
    return value;
}

// OBJ indices are 1-based; negative values count back from the current end.
inline std::uint32_t parse_index(std::string_view s, std::size_t count, std::size_t line) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || value == 0)
        throw ParseError("invalid index '" + std::string(s) + "'", line);
    long long resolved = value > 0 ? value - 1 : static_cast<long long>(count) + value;
    if (resolved < 0 || resolved >= static_cast<long long>(count))
        throw ParseError("index " + std::string(s) + " out of range", line);
    return static_cast<std::uint32_t>(resolved);
}

}  // namespace detail

/// Parses the OBJ subset `v`, `vt`, `f`. Corners must be `v/vt` or
/// `v/vt/vn`. Polygons with more than three corners are fan-triangulated as
/// (0,i,i+1) for i = 1..n-2, so face order follows file order. Other
/// statements (`vn`, `g`, `o`, `s`, `usemtl`, ...) are ignored.
inline UvMesh parse_obj(std::istream& in) {
    UvMesh mesh;
    std::string raw;
    std::size_t line_no = 0;
    std::vector<Corner> polygon;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        if (tok[0] == "v") {
            if (tok.size() < 4) throw ParseError("vertex needs 3 coordinates", line_no);
            mesh.positions.push_back({detail::parse_double(tok[1], line_no),
                                      detail::parse_double(tok[2], line_no),
                                      detail::parse_double(tok[3], line_no)});
        } else if (tok[0] == "vt") {
            if (tok.size() < 3) throw ParseError("texture coordinate needs 2 components", line_no);
            const Vec2 t{detail::parse_double(tok[1], line_no), detail::parse_double(tok[2], line_no)};
            if (!(t.u >= 0.0 && t.u <= 1.0 && t.v >= 0.0 && t.v <= 1.0))
                throw ParseError("texture coordinate outside [0,1]^2", line_no);
            mesh.uv_coords.push_back(t);
        } else if (tok[0] == "f") {
            if (tok.size() < 4) throw ParseError("face needs at least 3 corners", line_no);
            polygon.clear();
            for (std::size_t k = 1; k < tok.size(); ++k) {
                const std::string_view c = tok[k];
                const auto s1 = c.find('/');
                if (s1 == std::string_view::npos) throw ParseError("missing texture coordinate index", line_no);
                const auto s2 = c.find('/', s1 + 1);
                const std::string_view vt = c.substr(s1 + 1, s2 == std::string_view::npos ? std::string_view::npos : s2 - s1 - 1);
                if (vt.empty()) throw ParseError("missing texture coordinate index", line_no);
                polygon.push_back({detail::parse_index(c.substr(0, s1), mesh.positions.size(), line_no),
                                   detail::parse_index(vt, mesh.uv_coords.size(), line_no)});
            }
            for (std::size_t i = 1; i + 1 < polygon.size(); ++i)
                mesh.faces.push_back({polygon[0], polygon[i], polygon[i + 1]});
        }
    }
    return mesh;
}

inline UvMesh parse_obj(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_obj(in);
}

inline UvMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mesh '" + path + "'");
    return parse_obj(in);
}

/// Writes triangles only; reloading gives back an identical mesh.
inline void write_obj(std::ostream& out, const UvMesh& mesh) {
    out.precision(17);
    for (const Vec3& p : mesh.positions) out << "v " << p.x << ' ' << p.y << ' ' << p.z << '\n';
    for (const Vec2& t : mesh.uv_coords) out << "vt " << t.u << ' ' << t.v << '\n';
    for (const Face& f : mesh.faces) {
        out << 'f';
        for (const Corner& c : f) out << ' ' << c.position + 1 << '/' << c.uv + 1;
        out << '\n';
    }
}

inline Digest fingerprint(const UvMesh& mesh) {
    Hasher h;
    h.text("uvmesh").u64(mesh.positions.size());
    for (const Vec3& p : mesh.positions) h.f64(p.x).f64(p.y).f64(p.z);
    h.u64(mesh.uv_coords.size());
    for (const Vec2& t : mesh.uv_coords) h.f64(t.u).f64(t.v);
    h.u64(mesh.faces.size());
    for (const Face& f : mesh.faces)
        for (const Corner& c : f) h.u32(c.position).u32(c.uv);
    return h.finish_digest();
}

}  // namespace uvt
