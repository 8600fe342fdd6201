#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uvtransfer/digest.hpp"
#include "uvtransfer/errors.hpp"
#include "uvtransfer/mesh.hpp"

namespace uvt {

enum class CorrespondenceMode { vertex, face };

/// Partial map from target indices to source indices.
///
/// In vertex mode keys and values are position indices; in face mode they
/// are face indices after triangulation and corners are paired by order.
/// Targets missing from `pairs` lie outside the transferred region.
struct CorrespondenceMap {
    CorrespondenceMode mode = CorrespondenceMode::vertex;
    std::map<std::uint32_t, std::uint32_t> pairs;

    std::size_t size() const { return pairs.size(); }

    std::optional<std::uint32_t> lookup(std::uint32_t target) const {
        if (auto it = pairs.find(target); it != pairs.end()) return it->second;
        return std::nullopt;
    }

    /// Checks every index against the meshes the map links.
    void validate(const UvMesh& target, const UvMesh& source) const {
        const bool vtx = mode == CorrespondenceMode::vertex;
        const std::size_t tgt_n = vtx ? target.positions.size() : target.faces.size();
        const std::size_t src_n = vtx ? source.positions.size() : source.faces.size();
        const char* what = vtx ? "vertex" : "face";
        for (const auto& [t, s] : pairs) {
            if (t >= tgt_n)
                throw ValidationError(std::string("target ") + what + " index " + std::to_string(t) + " out of range");
            if (s >= src_n)
                throw ValidationError(std::string("source ") + what + " index " + std::to_string(s) + " out of range");
        }
    }

    friend bool operator==(const CorrespondenceMap&, const CorrespondenceMap&) = default;
};

inline const char* to_string(CorrespondenceMode m) {
    return m == CorrespondenceMode::vertex ? "vertex" : "face";
}

/// Parses `{"mode":"vertex"|"face","pairs":{"<target>":<source>,...}}`.
inline CorrespondenceMap parse_correspondence(const std::string& text) {
    using nlohmann::json;
    // nlohmann keeps the last of two equal keys, so duplicates are caught
    // while parsing.
    std::vector<std::set<std::string>> open_objects;
    std::optional<std::string> duplicate;
    auto on_event = [&](int, json::parse_event_t event, json& parsed) {
        switch (event) {
            case json::parse_event_t::object_start: open_objects.emplace_back(); break;
            case json::parse_event_t::object_end: open_objects.pop_back(); break;
            case json::parse_event_t::key:
                if (!open_objects.back().insert(parsed.get<std::string>()).second && !duplicate)
                    duplicate = parsed.get<std::string>();
                break;
            default: break;
        }
        return true;
    };

    json doc;
    try {
        doc = json::parse(text, on_event);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("correspondence: ") + e.what());
    }
    if (duplicate) throw ValidationError("duplicate target index \"" + *duplicate + "\"");

    if (!doc.is_object()) throw ParseError("correspondence: document must be an object");
    for (const auto& [key, _] : doc.items())
        if (key != "mode" && key != "pairs") throw ParseError("correspondence: unknown field '" + key + "'");
    if (!doc.contains("mode") || !doc["mode"].is_string())
        throw ParseError("correspondence: missing string field 'mode'");
    if (!doc.contains("pairs") || !doc["pairs"].is_object())
        throw ParseError("correspondence: missing object field 'pairs'");

    CorrespondenceMap m;
    const std::string mode = doc["mode"].get<std::string>();
    if (mode == "vertex")
        m.mode = CorrespondenceMode::vertex;
    else if (mode == "face")
        m.mode = CorrespondenceMode::face;
    else
        throw ParseError("correspondence: mode must be \"vertex\" or \"face\"");

    for (const auto& [key, value] : doc["pairs"].items()) {
        std::uint32_t target = 0;
        auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), target);
        if (key.empty() || ec != std::errc() || ptr != key.data() + key.size())
            throw ParseError("correspondence: key '" + key + "' is not a non-negative index");
        if (!value.is_number_unsigned() || value.get<std::uint64_t>() > UINT32_MAX)
            throw ParseError("correspondence: value for '" + key + "' is not a non-negative index");
        m.pairs.emplace(target, value.get<std::uint32_t>());
    }
    return m;
}

inline CorrespondenceMap load_correspondence(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open correspondence '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_correspondence(buf.str());
}

/// Eager variant: also validates indices against both meshes.
inline CorrespondenceMap load_correspondence(const std::string& path, const UvMesh& target,
                                             const UvMesh& source) {
    CorrespondenceMap m = load_correspondence(path);
    m.validate(target, source);
    return m;
}

inline std::string serialize_correspondence(const CorrespondenceMap& m) {
    nlohmann::ordered_json pairs = nlohmann::ordered_json::object();
    for (const auto& [t, s] : m.pairs) pairs[std::to_string(t)] = s;
    nlohmann::ordered_json doc;
    doc["mode"] = to_string(m.mode);
    doc["pairs"] = std::move(pairs);
    return doc.dump();
}

inline Digest fingerprint(const CorrespondenceMap& m) {
    Hasher h;
    h.text("correspondence").u32(static_cast<std::uint32_t>(m.mode)).u64(m.pairs.size());
    for (const auto& [t, s] : m.pairs) h.u32(t).u32(s);
    return h.finish_digest();
}

}  // namespace uvt
