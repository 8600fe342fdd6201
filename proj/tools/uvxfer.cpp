// uvxfer: build, cache and apply UV sampling maps; evaluate and benchmark.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uvtransfer/fixtures.hpp"
#include "uvtransfer/timing.hpp"
#include "uvtransfer/uvtransfer.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace uvt;

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kStaleCache = 3,
    kShapeMismatch = 4,
    kCorruptCache = 5,
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const json& j, const std::string& path = {}) {
    if (path.empty()) {
        std::cout << j.dump(2) << std::endl;
        return;
    }
    std::ofstream out(path);
    if (!out || !(out << j.dump(2) << '\n')) throw IoError("cannot write report '" + path + "'");
}

void warn(const std::string& msg) { std::cerr << "uvxfer: warning: " << msg << '\n'; }

/// "#rrggbb" or "r,g,b" (0-255) is a color, anything else a PNG path.
BlendSettings parse_fill(const std::string& spec, int feather) {
    if (spec.empty() || spec == "none") return BlendSettings{{}, feather};
    unsigned r = 0, g = 0, b = 0;
    char tail = 0;
    if ((spec.size() == 7 && std::sscanf(spec.c_str(), "#%2x%2x%2x%c", &r, &g, &b, &tail) == 3) ||
        std::sscanf(spec.c_str(), "%u,%u,%u%c", &r, &g, &b, &tail) == 3) {
        if (r > 255 || g > 255 || b > 255) throw UsageError("fill color components must be 0-255");
        return BlendSettings::color({r / 255.0, g / 255.0, b / 255.0}, feather);
    }
    return BlendSettings::texture(read_png(spec), feather);
}

struct Inputs {
    UvMesh source;
    UvMesh target;
    CorrespondenceMap correspondence;
};

Inputs load_inputs(const std::string& src_mesh, const std::string& tgt_mesh, const std::string& corr) {
    Inputs in{load_mesh(src_mesh), load_mesh(tgt_mesh), load_correspondence(corr)};
    in.correspondence.validate(in.target, in.source);
    return in;
}

json skip_json(std::size_t unmapped, std::size_t degenerate) {
    return {{"unmapped", unmapped}, {"degenerate", degenerate}, {"total", unmapped + degenerate}};
}

// ---------------------------------------------------------------- build-map

struct BuildMapArgs {
    std::string src_mesh, tgt_mesh, corr, out;
    int width = 0, height = 0;
    double eps = kDefaultInsideEps;
};

int cmd_build_map(const BuildMapArgs& a, unsigned threads) {
    const Inputs in = load_inputs(a.src_mesh, a.tgt_mesh, a.corr);
    const BuildParams params{a.width, a.height, a.eps};
    Stopwatch sw;
    const BuildResult r = build_sampling_map(in.target, in.source, in.correspondence, params, threads);
    const double precompute_s = sw.seconds();
    save_map(r.map, a.out);

    if (r.skipped_degenerate) warn(std::to_string(r.skipped_degenerate) + " degenerate target triangle(s) skipped");
    emit({{"command", "build-map"},
          {"precompute_s", precompute_s},
          {"width", a.width},
          {"height", a.height},
          {"pairs", r.pair_count},
          {"mask_coverage", r.map.coverage()},
          {"skipped_faces", skip_json(r.skipped_unmapped, r.skipped_degenerate)},
          {"warnings", r.skipped_degenerate},
          {"provenance", r.map.provenance.hex()},
          {"out", a.out}});
    return kOk;
}

// ----------------------------------------------------------------- transfer

struct TransferArgs {
    std::string map, src_tex, out, fill;
    int feather = 4;
    bool nearest = false;
    std::string src_mesh, tgt_mesh, corr;
    double eps = kDefaultInsideEps;
};

/// Recomputes the provenance digest when the generating inputs are given.
std::optional<Digest> expected_provenance(const TransferArgs& a, int width, int height) {
    const int given = !a.src_mesh.empty() + !a.tgt_mesh.empty() + !a.corr.empty();
    if (given == 0) return std::nullopt;
    if (given != 3) throw UsageError("--src-mesh, --tgt-mesh and --corr must be given together");
    const Inputs in = load_inputs(a.src_mesh, a.tgt_mesh, a.corr);
    return fingerprint(in.source, in.target, in.correspondence, {width, height, a.eps});
}

int cmd_transfer(const TransferArgs& a, unsigned threads) {
    const SamplingMap map = load_map(a.map);
    if (const auto expected = expected_provenance(a, map.width, map.height); expected && *expected != map.provenance)
        throw StaleCacheError("sampling map was built from different inputs (provenance " + map.provenance.hex() +
                              ", expected " + expected->hex() + ")");
    const Texture src = read_png(a.src_tex);
    const Resampler resampler(map, parse_fill(a.fill, a.feather), a.nearest ? Sampling::nearest : Sampling::bilinear,
                              threads);
    Stopwatch sw;
    const Texture out = resampler.apply(src);
    const double apply_s = sw.seconds();
    write_png(a.out, out);
    emit({{"command", "transfer"},
          {"apply_s", apply_s},
          {"width", map.width},
          {"height", map.height},
          {"mask_coverage", map.coverage()},
          {"out", a.out}});
    return kOk;
}

// ---------------------------------------------------------------- roundtrip

struct RoundTripArgs {
    std::string fwd_map, rev_map, tex, out, report, fill;
    int feather = 4;
    bool nearest = false;
};

json metric_block(const MetricsReport& r) {
    return {{"l1", metric_json(r.l1)}, {"ssim", metric_json(r.ssim)}, {"psnr", metric_json(r.psnr)}};
}

int cmd_roundtrip(const RoundTripArgs& a, unsigned threads) {
    const SamplingMap fwd = load_map(a.fwd_map);
    const SamplingMap rev = load_map(a.rev_map);
    const Texture original = read_png(a.tex);
    const auto r = roundtrip(fwd, rev, original, parse_fill(a.fill, a.feather),
                             a.nearest ? Sampling::nearest : Sampling::bilinear, threads);
    write_png(a.out, r.reconstructed);

    const MetricsReport full = evaluate(original, r.reconstructed, {}, threads);
    MetricsReport masked = evaluate(original, r.reconstructed, rev.mask, threads);
    masked.timings = {{"apply_forward_s", r.forward_seconds}, {"apply_reverse_s", r.reverse_seconds}};

    json j{{"command", "roundtrip"}, {"region", "masked"}};
    const json metrics = to_json(masked);
    for (const auto& [k, v] : metrics.items()) j[k] = v;
    j["apply_s"] = r.forward_seconds + r.reverse_seconds;
    j["masked"] = metric_block(masked);
    j["full"] = metric_block(full);
    j["out"] = a.out;
    emit(j, a.report);
    return kOk;
}

// -------------------------------------------------------------------- bench

struct BenchArgs {
    std::string src_mesh, tgt_mesh, corr, tex, fill, out_dir;
    int width = 0, height = 0, repeat = 10, baseline_repeat = 1, feather = 4;
    double eps = kDefaultInsideEps;
    bool baseline_parallel = false;
};

int cmd_bench(const BenchArgs& a, unsigned threads) {
    const Inputs in = load_inputs(a.src_mesh, a.tgt_mesh, a.corr);
    const Texture src = read_png(a.tex);
    const BlendSettings blend = parse_fill(a.fill, a.feather);
    const BuildParams params{a.width, a.height, a.eps};

    // Fast path: resolve + rasterize once, then repeated gathers.
    Stopwatch sw;
    const ResolvedPairs resolved = resolve_pairs(in.target, in.source, in.correspondence);
    const SamplingMap map = build_sampling_map(resolved.pairs, params, threads);
    const Resampler resampler(map, blend, Sampling::bilinear, threads);
    const double precompute_s = sw.seconds();
    Texture fast;
    const double apply_s = median_seconds(a.repeat, [&] { fast = resampler.apply(src); });

    // Baseline: everything per call, from the already-resolved pairs.
    BaselineOptions bopt;
    bopt.eps = a.eps;
    bopt.parallel = a.baseline_parallel;
    bopt.threads = threads;
    Texture slow;
    const double baseline_s = median_seconds(a.baseline_repeat, [&] {
        slow = transfer_affine(resolved.pairs, src, a.width, a.height, blend, bopt);
    });

    int max_diff = 0;
    for (std::size_t px = 0; px < map.pixel_count(); ++px)
        if (map.mask[px])
            for (int c = 0; c < src.channels; ++c)
                max_diff = std::max(max_diff, std::abs(int(fast.data[px * src.channels + c]) -
                                                       int(slow.data[px * src.channels + c])));
    const MetricsReport agree = evaluate(slow, fast, map.mask, threads);

    if (!a.out_dir.empty()) {
        std::filesystem::create_directories(a.out_dir);
        write_png((std::filesystem::path(a.out_dir) / "fast.png").string(), fast);
        write_png((std::filesystem::path(a.out_dir) / "baseline.png").string(), slow);
    }

    const double amortized = (precompute_s + a.repeat * apply_s) / a.repeat;
    json j{{"command", "bench"},
           {"triangles", in.target.faces.size()},
           {"pairs", resolved.pairs.size()},
           {"width", a.width},
           {"height", a.height},
           {"repeat", a.repeat},
           {"baseline_repeat", a.baseline_repeat},
           {"threads", resolve_threads(threads)},
           {"baseline_parallel", a.baseline_parallel},
           {"precompute_s", precompute_s},
           {"apply_s", apply_s},
           {"baseline_s", baseline_s},
           {"speedup", baseline_s / apply_s},
           {"amortized_apply_s", amortized},
           {"amortized_speedup", baseline_s / amortized},
           {"mask_coverage", map.coverage()},
           {"skipped_faces", skip_json(resolved.skipped_unmapped, resolved.skipped_degenerate)},
           {"l1", metric_json(agree.l1)},
           {"ssim", metric_json(agree.ssim)},
           {"psnr", metric_json(agree.psnr)},
           {"max_level_diff", max_diff}};
    emit(j);
    return kOk;
}

// ------------------------------------------------------------- gen-fixtures

struct GenArgs {
    std::string out_dir;
    int grid = 8;
    std::uint64_t seed = 1;
    std::vector<int> sizes{256, 1024, 2048};
};

int cmd_gen_fixtures(const GenArgs& a) {
    const auto files = fixtures::write_fixture_set(a.out_dir, {a.grid, a.seed, a.sizes});
    emit({{"command", "gen-fixtures"},
          {"out_dir", a.out_dir},
          {"grid", a.grid},
          {"triangles", 2 * a.grid * a.grid},
          {"seed", a.seed},
          {"files", files}});
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UV texture retargeting with precomputed sampling maps"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all hardware threads)");

    BuildMapArgs bm;
    auto* build = app.add_subcommand("build-map", "Precompute a sampling map and write it as an SMAP file");
    build->add_option("--src-mesh", bm.src_mesh, "Source layout OBJ")->required()->check(CLI::ExistingFile);
    build->add_option("--tgt-mesh", bm.tgt_mesh, "Target layout OBJ")->required()->check(CLI::ExistingFile);
    build->add_option("--corr", bm.corr, "Correspondence JSON (target -> source)")->required()->check(CLI::ExistingFile);
    build->add_option("--width", bm.width, "Target texture width")->required()->check(CLI::Range(1, 65536));
    build->add_option("--height", bm.height, "Target texture height")->required()->check(CLI::Range(1, 65536));
    build->add_option("--out", bm.out, "Output SMAP path")->required();
    build->add_option("--eps", bm.eps, "Barycentric inside tolerance")->capture_default_str();

    TransferArgs tr;
    auto* transfer = app.add_subcommand("transfer", "Apply a cached sampling map to a texture");
    transfer->add_option("--map", tr.map, "SMAP file")->required()->check(CLI::ExistingFile);
    transfer->add_option("--src-tex", tr.src_tex, "Source texture PNG")->required()->check(CLI::ExistingFile);
    transfer->add_option("--out", tr.out, "Output PNG")->required();
    transfer->add_option("--fill", tr.fill, "Fill for uncovered pixels: #rrggbb, r,g,b or a PNG path");
    transfer->add_option("--feather", tr.feather, "Seam blend radius in pixels")->capture_default_str()->check(CLI::NonNegativeNumber);
    transfer->add_flag("--nearest", tr.nearest, "Nearest-texel sampling instead of bilinear");
    transfer->add_option("--src-mesh", tr.src_mesh, "Verify the map against this source OBJ");
    transfer->add_option("--tgt-mesh", tr.tgt_mesh, "Verify the map against this target OBJ");
    transfer->add_option("--corr", tr.corr, "Verify the map against this correspondence");
    transfer->add_option("--eps", tr.eps, "Tolerance the map was built with")->capture_default_str();

    RoundTripArgs rt;
    auto* round = app.add_subcommand("roundtrip", "Transfer forward and back, then score against the original");
    round->add_option("--fwd-map", rt.fwd_map, "Map into the intermediate layout")->required()->check(CLI::ExistingFile);
    round->add_option("--rev-map", rt.rev_map, "Map back into the original layout")->required()->check(CLI::ExistingFile);
    round->add_option("--tex", rt.tex, "Original texture PNG")->required()->check(CLI::ExistingFile);
    round->add_option("--out", rt.out, "Reconstructed PNG")->required();
    round->add_option("--report", rt.report, "Metrics JSON path (default: standard output)");
    round->add_option("--fill", rt.fill, "Fill for the forward pass");
    round->add_option("--feather", rt.feather, "Seam blend radius in pixels")->capture_default_str()->check(CLI::NonNegativeNumber);
    round->add_flag("--nearest", rt.nearest, "Nearest-texel sampling");

    BenchArgs bn;
    auto* bench = app.add_subcommand("bench", "Time the per-triangle baseline against the cached map");
    bench->add_option("--src-mesh", bn.src_mesh, "Source layout OBJ")->required()->check(CLI::ExistingFile);
    bench->add_option("--tgt-mesh", bn.tgt_mesh, "Target layout OBJ")->required()->check(CLI::ExistingFile);
    bench->add_option("--corr", bn.corr, "Correspondence JSON")->required()->check(CLI::ExistingFile);
    bench->add_option("--width", bn.width, "Target width")->required()->check(CLI::Range(1, 65536));
    bench->add_option("--height", bn.height, "Target height")->required()->check(CLI::Range(1, 65536));
    bench->add_option("--tex", bn.tex, "Source texture PNG")->required()->check(CLI::ExistingFile);
    bench->add_option("--repeat", bn.repeat, "Fast-path transfers to time")->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_option("--baseline-repeat", bn.baseline_repeat, "Baseline transfers to time")->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_option("--eps", bn.eps, "Barycentric inside tolerance")->capture_default_str();
    bench->add_option("--fill", bn.fill, "Fill for uncovered pixels");
    bench->add_option("--feather", bn.feather, "Seam blend radius in pixels")->capture_default_str()->check(CLI::NonNegativeNumber);
    bench->add_flag("--baseline-parallel", bn.baseline_parallel, "Run the baseline on all threads too");
    bench->add_option("--out-dir", bn.out_dir, "Also write fast.png and baseline.png here");

    GenArgs gn;
    auto* gen = app.add_subcommand("gen-fixtures", "Write synthetic meshes, correspondences and textures");
    gen->add_option("--out-dir", gn.out_dir, "Output directory")->required();
    gen->add_option("--grid", gn.grid, "Grid cells per side")->required()->check(CLI::Range(1, 1024));
    gen->add_option("--seed", gn.seed, "Noise seed")->capture_default_str();
    gen->add_option("--sizes", gn.sizes, "Texture sizes")->delimiter(',')->capture_default_str()->check(CLI::Range(16, 8192));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
        app.exit(e);
        return kUsage;
    }

    try {
        if (*build) return cmd_build_map(bm, threads);
        if (*transfer) return cmd_transfer(tr, threads);
        if (*round) return cmd_roundtrip(rt, threads);
        if (*bench) return cmd_bench(bn, threads);
        if (*gen) return cmd_gen_fixtures(gn);
    } catch (const UsageError& e) {
        std::cerr << "uvxfer: " << e.what() << '\n';
        return kUsage;
    } catch (const StaleCacheError& e) {
        std::cerr << "uvxfer: stale cache: " << e.what() << '\n';
        return kStaleCache;
    } catch (const ShapeMismatchError& e) {
        std::cerr << "uvxfer: shape mismatch: " << e.what() << '\n';
        return kShapeMismatch;
    } catch (const CacheChecksumError& e) {
        std::cerr << "uvxfer: corrupt cache: " << e.what() << '\n';
        return kCorruptCache;
    } catch (const CacheFormatError& e) {
        std::cerr << "uvxfer: corrupt cache: " << e.what() << '\n';
        return kCorruptCache;
    } catch (const std::exception& e) {
        std::cerr << "uvxfer: error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
