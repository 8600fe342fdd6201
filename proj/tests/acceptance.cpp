// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned
// here. Exit status is non-zero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "uvtransfer/fixtures.hpp"
#include "uvtransfer/timing.hpp"
#include "uvtransfer/uvtransfer.hpp"

using namespace uvt;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct NamedPairs {
    std::string name;
    std::vector<ResolvedPair> pairs;
};

std::vector<NamedPairs> fixture_pairs() {
    const UvMesh grid = fixtures::grid_mesh(8, 8);
    const UvMesh warped = fixtures::grid_mesh(8, 8, fixtures::head_warp);
    const auto hb = fixtures::head_body(8);
    return {
        {"grid_identity", resolve_pairs(grid, grid, fixtures::identity_vertex_map(grid.positions.size())).pairs},
        {"grid_warped", resolve_pairs(grid, warped, fixtures::identity_face_map(grid.faces.size())).pairs},
        {"head_from_body", resolve_pairs(hb.head, hb.body, hb.head_from_body).pairs},
        {"body_from_head", resolve_pairs(hb.body, hb.head, hb.body_from_head).pairs},
        {"random_overlapping", fixtures::random_pairs(40, 3)},
    };
}

int max_level_diff(const Texture& a, const Texture& b, std::span<const std::uint8_t> mask) {
    int worst = 0;
    for (std::size_t px = 0; px < a.pixel_count(); ++px) {
        if (!mask.empty() && !mask[px]) continue;
        for (int c = 0; c < a.channels; ++c)
            worst = std::max(worst, std::abs(int(a.data[px * a.channels + c]) - int(b.data[px * a.channels + c])));
    }
    return worst;
}

std::vector<std::uint8_t> file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome oracle_equivalence() {
    const std::pair<int, int> sizes[] = {{128, 128}, {64, 64}, {37, 53}, {128, 17}, {1, 1}};
    int compared = 0;
    for (const auto& f : fixture_pairs()) {
        for (auto [w, h] : sizes) {
            const SamplingMap fast = build_sampling_map(f.pairs, {w, h});
            const SamplingMap slow = oracle::brute_force_map(f.pairs, w, h, kDefaultInsideEps);
            if (!(fast == slow)) return {false, f.name + " differs at " + shape_string(w, h)};
            ++compared;
        }
    }
    return {true, fmt("%d fixture/size combinations bit-identical", compared)};
}

Outcome barycentric_identities() {
    constexpr int kCases = 100000;
    std::mt19937_64 rng(2024);
    auto coord = [&] { return -0.5 + 2.0 * fixtures::unit_double(rng); };
    double worst_sum = 0.0, worst_rec = 0.0;
    for (int n = 0; n < kCases;) {
        const Triangle2D t{{coord(), coord()}, {coord(), coord()}, {coord(), coord()}};
        if (std::abs(signed_area(t)) < 1e-6) continue;
        const Vec2 p{coord(), coord()};
        const BaryCoords bc = barycentric(p, t);
        worst_sum = std::max(worst_sum, std::abs(bc.alpha + bc.beta + bc.gamma - 1.0));
        const Vec2 r = map_source_point(bc, t);
        worst_rec = std::max({worst_rec, std::abs(r.u - p.u), std::abs(r.v - p.v)});
        ++n;
    }
    return {worst_sum <= 1e-9 && worst_rec <= 1e-7,
            fmt("%d cases, max |sum-1| %.2e (<= 1e-9), max reconstruction error %.2e (<= 1e-7)", kCases, worst_sum,
                worst_rec)};
}

Outcome identity_roundtrip() {
    constexpr int kSize = 1024;
    const UvMesh grid = fixtures::grid_mesh(8, 8);
    const SamplingMap m =
        build_sampling_map(grid, grid, fixtures::identity_vertex_map(grid.positions.size()), {kSize, kSize}).map;
    const Texture tex = fixtures::noise_texture(kSize, kSize, 5);
    const auto nearest = roundtrip(m, m, tex, BlendSettings::none(), Sampling::nearest);
    const auto bilinear = roundtrip(m, m, tex, BlendSettings::none(), Sampling::bilinear);
    const int dn = max_level_diff(tex, nearest.reconstructed, m.mask);
    const int db = max_level_diff(tex, bilinear.reconstructed, m.mask);
    const double pn = psnr(tex, nearest.reconstructed, m.mask), pb = psnr(tex, bilinear.reconstructed, m.mask);
    const bool ok = m.coverage() == 1.0 && dn == 0 && db == 0 && std::isinf(pn) && pn > 0 && std::isinf(pb) && pb > 0;
    return {ok, fmt("%dx%d, coverage %.3f, max diff nearest %d / bilinear %d, PSNR %s / %s", kSize, kSize, m.coverage(),
                    dn, db, metric_json(pn).dump().c_str(), metric_json(pb).dump().c_str())};
}

Outcome head_body_roundtrip() {
    const auto hb = fixtures::head_body(16);
    const SamplingMap fwd = build_sampling_map(hb.head, hb.body, hb.head_from_body, {1024, 1024}).map;
    const SamplingMap rev = build_sampling_map(hb.body, hb.head, hb.body_from_head, {2048, 2048}).map;
    const Texture original = fixtures::gradient_texture(2048, 2048);
    // Feather 0: the reverse pass must not blend the original back in.
    const auto r = roundtrip(fwd, rev, original, BlendSettings{{}, 0});
    const double p = psnr(original, r.reconstructed, rev.mask);
    const double s = ssim(original, r.reconstructed, rev.mask);
    return {p >= 35.0 && s >= 0.95,
            fmt("body 2048^2 -> head 1024^2 -> body, masked PSNR %.2f dB (>= 35), SSIM %.5f (>= 0.95), coverage %.4f", p,
                s, rev.coverage())};
}

Outcome baseline_agreement() {
    const int kW = 192, kH = 160;
    const Texture textures[] = {fixtures::gradient_texture(256, 256), fixtures::noise_texture(200, 120, 6),
                                fixtures::checkerboard_texture(128, 128, 8)};
    const BlendSettings blends[] = {BlendSettings::none(), BlendSettings::color({0.2, 0.4, 0.6}, 3)};
    int worst = 0, runs = 0;
    std::string where;
    for (const auto& f : fixture_pairs()) {
        const SamplingMap m = build_sampling_map(f.pairs, {kW, kH});
        for (const auto& tex : textures)
            for (const auto& blend : blends) {
                const Texture fast = apply(m, tex, blend);
                const Texture slow = transfer_affine(f.pairs, tex, kW, kH, blend, {});
                const int d = max_level_diff(fast, slow, m.mask);
                if (d > worst) worst = d, where = f.name;
                ++runs;
            }
    }
    return {worst <= 1, fmt("%d runs, max masked difference %d level(s) (<= 1)%s", runs, worst,
                            where.empty() ? "" : (" on " + where).c_str())};
}

Outcome speedup() {
    constexpr int kSize = 1024, kRepeat = 10;
    const UvMesh tgt = fixtures::grid_mesh(45, 45);
    const UvMesh src = fixtures::grid_mesh(45, 45, fixtures::head_warp);
    const CorrespondenceMap corr = fixtures::identity_face_map(tgt.faces.size());
    const Texture tex = fixtures::noise_texture(kSize, kSize, 9);
    const BlendSettings blend = BlendSettings::color({0.5, 0.5, 0.5}, 4);

    Stopwatch sw;
    const ResolvedPairs resolved = resolve_pairs(tgt, src, corr);
    const SamplingMap map = build_sampling_map(resolved.pairs, {kSize, kSize});
    const Resampler resampler(map, blend);
    const double precompute = sw.seconds();
    double applies = 0.0;
    Texture fast;
    for (int i = 0; i < kRepeat; ++i) {
        sw.reset();
        fast = resampler.apply(tex);
        applies += sw.seconds();
    }
    const double amortized = (precompute + applies) / kRepeat;

    sw.reset();
    const Texture slow = transfer_affine(resolved.pairs, tex, kSize, kSize, blend, {});
    const double baseline = sw.seconds();
    const double ratio = baseline / amortized;
    const int diff = max_level_diff(fast, slow, map.mask);
    return {ratio >= 20.0 && diff <= 1,
            fmt("%zu triangles at %d^2: baseline %.3f s/transfer, amortized fast path %.4f s/transfer "
                "(precompute %.4f s + %d applies), speedup %.1fx (>= 20)",
                resolved.pairs.size(), kSize, baseline, amortized, precompute, kRepeat, ratio)};
}

Outcome cache_integrity() {
    const auto hb = fixtures::head_body(6);
    const BuildResult built = build_sampling_map(hb.head, hb.body, hb.head_from_body, {24, 20});
    const auto dir = std::filesystem::temp_directory_path() / "uvt_acceptance_cache";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "map.smap").string();
    save_map(built.map, path);
    const SamplingMap loaded = load_map(path, built.map.provenance);
    if (!(loaded == built.map)) return {false, "loaded map differs from saved map"};
    const auto bytes = encode_map(built.map);
    const auto on_disk = file_bytes(path);
    if (on_disk != bytes) return {false, "file bytes differ from encoding"};
    if (encode_map(loaded) != bytes) return {false, "re-encoding is not bit-exact"};

    // Every single-bit flip and every truncation must be rejected as corruption.
    int corrupt = 0, wrong = 0;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        auto b = bytes;
        b[i] ^= 0x10;
        try {
            decode_map(b, built.map.provenance);
            ++wrong;
        } catch (const CacheChecksumError&) {
            ++corrupt;
        } catch (const CacheFormatError&) {
            ++corrupt;
        } catch (...) {
            ++wrong;
        }
    }
    for (std::size_t len : {std::size_t{0}, std::size_t{4}, kSmapHeaderBytes, bytes.size() - 1}) {
        try {
            decode_map({bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(len)});
            ++wrong;
        } catch (const CacheFormatError&) {
            ++corrupt;
        } catch (...) {
            ++wrong;
        }
    }

    // Same file, different generating inputs.
    const UvMesh other = fixtures::grid_mesh(6, 6, fixtures::no_warp);
    bool stale = false;
    try {
        load_map(path, fingerprint(hb.body, other, hb.head_from_body, {24, 20}));
    } catch (const StaleCacheError&) {
        stale = true;
    } catch (...) {
    }
    std::filesystem::remove_all(dir);
    return {wrong == 0 && stale, fmt("round trip bit-exact (%zu bytes); %d/%d corruptions rejected; stale %s", bytes.size(),
                                     corrupt, corrupt + wrong, stale ? "rejected" : "NOT rejected")};
}

Outcome determinism() {
    const unsigned n = std::max(4u, std::thread::hardware_concurrency());
    const UvMesh grid = fixtures::grid_mesh(20, 20);
    const UvMesh warped = fixtures::grid_mesh(20, 20, fixtures::head_warp);
    const auto hb = fixtures::head_body(12);
    struct Job {
        const UvMesh* tgt;
        const UvMesh* src;
        CorrespondenceMap corr;
        int w, h;
    };
    const Job jobs[] = {{&grid, &warped, fixtures::identity_face_map(grid.faces.size()), 512, 384},
                        {&hb.head, &hb.body, hb.head_from_body, 512, 512},
                        {&hb.body, &hb.head, hb.body_from_head, 640, 640}};
    const Texture tex = fixtures::noise_texture(300, 300, 11);
    const auto dir = std::filesystem::temp_directory_path() / "uvt_acceptance_det";
    std::filesystem::create_directories(dir);
    int idx = 0;
    bool ok = true;
    for (const auto& j : jobs) {
        const BuildResult one = build_sampling_map(*j.tgt, *j.src, j.corr, {j.w, j.h}, 1);
        const BuildResult many = build_sampling_map(*j.tgt, *j.src, j.corr, {j.w, j.h}, n);
        ok = ok && encode_map(one.map) == encode_map(many.map);
        const BlendSettings blend = BlendSettings::color({0.1, 0.9, 0.3}, 5);
        const auto a = dir / ("one" + std::to_string(idx) + ".png"), b = dir / ("many" + std::to_string(idx) + ".png");
        write_png(a.string(), apply(one.map, tex, blend, Sampling::bilinear, 1));
        write_png(b.string(), apply(many.map, tex, blend, Sampling::bilinear, n));
        ok = ok && file_bytes(a) == file_bytes(b);
        ++idx;
    }
    std::filesystem::remove_all(dir);
    return {ok, fmt("%d layouts, 1 vs %u threads: SMAP and PNG bytes %s", idx, n, ok ? "identical" : "DIFFER")};
}

Outcome metric_correctness() {
    std::mt19937_64 rng(77);
    FloatImage a(64, 48, 3), b(64, 48, 3);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        a.data[i] = 0.2 + 0.6 * fixtures::unit_double(rng);
        b.data[i] = a.data[i] + 0.1;
    }
    const double p = psnr(a, b), l1 = l1_distance(a, b);
    const Texture g = fixtures::gradient_texture(96, 80), nz = fixtures::noise_texture(96, 80, 4);
    const double self = ssim(g, g);

    Texture perturbed = g;
    for (std::size_t i = 0; i < perturbed.data.size(); ++i)
        perturbed.data[i] = static_cast<std::uint8_t>(std::clamp(int(g.data[i]) + int(nz.data[i] % 41) - 20, 0, 255));
    std::vector<std::uint8_t> mask(g.pixel_count(), 0);
    for (int row = 10; row < 70; ++row)
        for (int x = 5 + row / 4; x < 90; ++x) mask[static_cast<std::size_t>(row) * g.width + x] = 1;
    double worst = 0.0;
    using Pair = std::pair<const Texture*, const Texture*>;
    for (const auto& [x, y] : {Pair{&g, &perturbed}, Pair{&g, &nz}, Pair{&perturbed, &nz}}) {
        worst = std::max(worst, std::abs(ssim(*x, *y) - oracle::reference_ssim(*x, *y)));
        worst = std::max(worst, std::abs(ssim(*x, *y, mask) - oracle::reference_ssim(*x, *y, mask)));
    }
    const bool ok = std::abs(p - 20.0) <= 1e-6 && std::abs(l1 - 0.1) <= 1e-6 && std::abs(self - 1.0) <= 1e-9 &&
                    worst <= 1e-6;
    return {ok, fmt("PSNR %.9f dB (20 +/- 1e-6), L1 %.9f (0.1 +/- 1e-6), SSIM(a,a) %.12f, max |SSIM - reference| %.2e "
                    "(<= 1e-6)",
                    p, l1, self, worst)};
}

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"oracle-equivalence", 10, oracle_equivalence},
        {"barycentric-identities", 5, barycentric_identities},
        {"identity-roundtrip", 5, identity_roundtrip},
        {"lossy-roundtrip", 30, head_body_roundtrip},
        {"baseline-agreement", 60, baseline_agreement},
        {"speedup", 120, speedup},
        {"cache-integrity", 5, cache_integrity},
        {"determinism", 30, determinism},
        {"metric-correctness", 10, metric_correctness},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Stopwatch sw;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double t = sw.seconds();
        const bool in_time = t < c.budget_s;
        const bool pass = o.ok && in_time;
        failed += !pass;
        std::printf("%s  %-24s %s [%.2f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(),
                    t, c.budget_s, in_time ? "" : ", OVER BUDGET");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed ? 1 : 0;
}
