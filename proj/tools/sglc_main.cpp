// Command-line surface for the tiled global/local enhancement pipeline:
// dehaze, haze synthesis, dataset preparation, metrics, and the grid/window
// tiling debug verbs. Exit codes: 0 success, 1 I/O failure, 2 invalid
// configuration, 3 restorer failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sglc/grid.hpp"
#include "sglc/hazelab.hpp"
#include "sglc/io.hpp"
#include "sglc/metrics.hpp"
#include "sglc/pipeline.hpp"
#include "sglc/window.hpp"

namespace fs = std::filesystem;
using namespace sglc;

namespace {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError("not a boolean: " + v);
}

StageOrder parse_order(const std::string& v) {
    if (v == "sglc") return StageOrder::Sglc;
    if (v == "inv_sglc") return StageOrder::InvSglc;
    throw ConfigError("order must be sglc or inv_sglc, got: " + v);
}

PadMode parse_pad_mode(const std::string& v) {
    if (v == "replicate") return PadMode::Replicate;
    if (v == "reflect") return PadMode::Reflect;
    throw ConfigError("pad mode must be replicate or reflect, got: " + v);
}

std::vector<float> parse_light(const std::string& v, int channels) {
    std::vector<float> out;
    for (const std::string& part : split(v, ','))
        out.push_back(std::stof(trim(part)));
    if (out.empty()) throw ConfigError("empty atmospheric light");
    if (static_cast<int>(out.size()) == 1 && channels > 1)
        out.assign(static_cast<std::size_t>(channels), out[0]);
    if (static_cast<int>(out.size()) != channels)
        throw ConfigError("atmospheric light entries do not match image channels");
    for (float a : out)
        if (a < 0.0f || a > 1.0f) throw ConfigError("atmospheric light must be in [0,1]");
    return out;
}

// Everything a run needs beyond PipelineConfig itself.
struct RunOptions {
    PipelineConfig pipeline;
    std::string dm = "identity";
    std::string em = "identity";
    std::string light = "1.0";
    std::string transmission_path; // sidecar for the haze oracle
};

std::map<std::string, std::string> read_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line is not key=value: " + t);
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

void apply_config_file(RunOptions& opt, const fs::path& path) {
    for (const auto& [key, value] : read_config_file(path)) {
        if (key == "dm") opt.dm = value;
        else if (key == "em") opt.em = value;
        else if (key == "grid_patch_side") opt.pipeline.grid_patch_side = std::stoi(value);
        else if (key == "window_patch_side") opt.pipeline.window_patch_side = std::stoi(value);
        else if (key == "use_mops") opt.pipeline.use_mops = parse_bool(value);
        else if (key == "use_dihedral") opt.pipeline.use_dihedral = parse_bool(value);
        else if (key == "order") opt.pipeline.order = parse_order(value);
        else if (key == "pad_mode") opt.pipeline.pad_mode = parse_pad_mode(value);
        else if (key == "light") opt.light = value;
        else if (key == "transmission") opt.transmission_path = value;
        else throw ConfigError("unknown config key: " + key);
    }
}

std::unique_ptr<Restorer> make_restorer(const std::string& selector,
                                        const RunOptions& opt, int channels) {
    const auto parts = split(selector, ':');
    const std::string& kind = parts[0];

    if (kind == "identity") return identity_restorer();

    if (kind == "haze-oracle") {
        if (opt.transmission_path.empty())
            throw ConfigError("haze-oracle needs --transmission (or the config key)");
        HazeOracleParams params;
        params.transmission = read_raw(opt.transmission_path);
        params.atmospheric_light = parse_light(opt.light, channels);
        return haze_oracle_restorer(std::move(params));
    }

    if (kind == "border-damage") {
        const int width = parts.size() > 1 ? std::stoi(parts[1]) : 2;
        const float value = parts.size() > 2 ? std::stof(parts[2]) : 0.0f;
        return border_damage_restorer(width, value);
    }

    if (kind == "lewin") {
        LeWinConfig cfg;
        cfg.channels = channels;
        cfg.heads = 1;
        cfg.window = 8;
        cfg.seed = parts.size() > 1 ? std::stoull(parts[1]) : 0;
        if (parts.size() > 2) cfg.window = std::stoi(parts[2]);
        if (parts.size() > 3) cfg.heads = std::stoi(parts[3]);
        return lewin_restorer(cfg);
    }

    if (kind == "exec") {
        const auto colon = selector.find(':');
        const std::string command = colon == std::string::npos
                                        ? std::string()
                                        : selector.substr(colon + 1);
        if (command.empty()) throw ConfigError("exec restorer needs a command");
        return process_restorer(command);
    }

    throw ConfigError("unknown restorer selector: " + selector +
                      " (expected identity, haze-oracle, border-damage[:w[:v]], "
                      "lewin[:seed[:window[:heads]]], exec:<command>)");
}

ImageBuffer make_depth(const std::string& spec, int h, int w, std::uint64_t seed,
                       int octaves) {
    if (spec.rfind("constant:", 0) == 0)
        return ImageBuffer::constant(h, w, 1, std::stof(spec.substr(9)));
    if (spec == "noise") return smooth_depth_map(h, w, seed, octaves);
    const ImageBuffer depth = read_image(spec);
    if (depth.channels() != 1) throw ConfigError("depth map must be single channel");
    if (depth.height() != h || depth.width() != w)
        throw ConfigError("depth map dimensions do not match the clean image");
    return depth;
}

void write_manifest(const fs::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    for (const std::string& line : lines) out << line << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

std::map<std::string, std::string> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw IoError("malformed manifest line: " + t);
        kv[t.substr(0, eq)] = t.substr(eq + 1);
    }
    return kv;
}

int manifest_int(const std::map<std::string, std::string>& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw IoError("manifest missing key: " + key);
    return std::stoi(it->second);
}

// ---- subcommand bodies ----

struct DehazeArgs {
    std::string input, output, config, truth;
    RunOptions opt;
    bool mops_flag_set = false, dihedral_flag_set = false;
};

int cmd_dehaze(const DehazeArgs& args) {
    const ImageBuffer input = read_image(args.input);

    const auto dm = make_restorer(args.opt.dm, args.opt, input.channels());
    const auto em = make_restorer(args.opt.em, args.opt, input.channels());

    if (args.opt.dm == "haze-oracle" || args.opt.em == "haze-oracle") {
        const ImageBuffer t = read_raw(args.opt.transmission_path);
        if (t.height() != input.height() || t.width() != input.width())
            throw ConfigError("transmission sidecar dimensions do not match the input");
    }

    const auto start = std::chrono::steady_clock::now();
    const ImageBuffer restored = run_sglc(input, *dm, *em, args.opt.pipeline);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_image(args.output, restored);

    if (!args.truth.empty()) {
        const ImageBuffer truth = read_image(args.truth);
        const int side = args.opt.pipeline.effective_window_side();
        QualityReport report;
        report.psnr_db = psnr(truth, restored);
        report.ssim = ssim(truth, restored);
        // the seam statistic needs at least two tiles per axis
        report.seam = restored.height() >= 2 * side && restored.width() >= 2 * side
                          ? seam_metric(restored, side)
                          : 0.0;
        report.wall_time_s = seconds;
        std::cout << report.to_record();
    }
    return 0;
}

struct SynthArgs {
    std::string clean, output, depth = "noise", light = "1.0", transmission_out;
    double beta = 1.0;
    std::uint64_t seed = 0;
    int octaves = 3;
};

int cmd_synth(const SynthArgs& args) {
    const ImageBuffer clean = read_image(args.clean);

    HazeField field;
    field.beta = static_cast<float>(args.beta);
    field.depth = make_depth(args.depth, clean.height(), clean.width(), args.seed,
                             args.octaves);
    field.atmospheric_light = parse_light(args.light, clean.channels());

    const ImageBuffer t = transmission(field, clean.height(), clean.width());
    const ImageBuffer hazy = synthesize_haze(clean, field);

    write_image(args.output, hazy);
    const std::string sidecar = args.transmission_out.empty()
                                    ? args.output + ".trans.raw"
                                    : args.transmission_out;
    write_raw(sidecar, t);
    return 0;
}

struct CorruptArgs {
    std::string input, output, mask_out;
    CorruptionSpec spec;
};

int cmd_corrupt(const CorruptArgs& args) {
    const ImageBuffer clean = read_image(args.input);
    const CorruptionResult result = corrupt_white_squares(clean, args.spec);
    write_image(args.output, result.image);
    const std::string mask_path =
        args.mask_out.empty() ? args.output + ".mask.raw" : args.mask_out;
    write_raw(mask_path, result.mask);
    return 0;
}

struct MetricsArgs {
    std::string a, b;
    int tile_side = 0;
};

int cmd_metrics(const MetricsArgs& args) {
    const ImageBuffer a = read_image(args.a);
    const ImageBuffer b = read_image(args.b);
    QualityReport report;
    report.psnr_db = psnr(a, b);
    report.ssim = ssim(a, b);
    report.seam = args.tile_side > 0 ? seam_metric(b, args.tile_side) : 0.0;
    report.wall_time_s = 0.0;
    std::cout << report.to_record();
    return 0;
}

struct ExportArgs {
    std::string hazy_dir, clean_dir, out_dir, config;
    RunOptions opt;
};

std::map<std::string, fs::path> list_images(const fs::path& dir) {
    if (!fs::exists(dir)) throw IoError("no such directory: " + dir.string());
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const fs::path& p = entry.path();
        const std::string ext = p.extension().string();
        if (ext == ".png" || ext == ".raw") out[p.stem().string()] = p;
    }
    return out;
}

int cmd_export_lfe_dataset(const ExportArgs& args) {
    const auto hazy = list_images(args.hazy_dir);
    const auto clean = list_images(args.clean_dir);

    std::vector<std::string> unmatched;
    for (const auto& [stem, path] : hazy)
        if (clean.find(stem) == clean.end()) unmatched.push_back(stem + " (hazy only)");
    for (const auto& [stem, path] : clean)
        if (hazy.find(stem) == hazy.end()) unmatched.push_back(stem + " (clean only)");
    if (!unmatched.empty()) {
        std::string all;
        for (const std::string& u : unmatched) all += " " + u;
        throw ConfigError("unmatched pairs:" + all);
    }

    fs::create_directories(args.out_dir);
    const int window_side = args.opt.pipeline.effective_window_side();
    std::vector<std::string> manifest;

    for (const auto& [stem, hazy_path] : hazy) {
        const ImageBuffer hazy_img = read_image(hazy_path);
        const ImageBuffer clean_img = read_image(clean.at(stem));
        if (!hazy_img.same_shape(clean_img))
            throw ConfigError("pair dimensions differ for " + stem);

        const auto dm = make_restorer(args.opt.dm, args.opt, hazy_img.channels());
        const ImageBuffer prediction = run_gfg(hazy_img, *dm,
                                               args.opt.pipeline.grid_patch_side,
                                               args.opt.pipeline.pad_mode);

        const auto [pred_padded, spec1] =
            pad_to_multiple(prediction, window_side, args.opt.pipeline.pad_mode);
        const auto [clean_padded, spec2] =
            pad_to_multiple(clean_img, window_side, args.opt.pipeline.pad_mode);
        const WindowTileSet pred_tiles = window_extract(pred_padded, window_side);
        const WindowTileSet clean_tiles = window_extract(clean_padded, window_side);

        for (std::size_t i = 0; i < pred_tiles.tiles.size(); ++i) {
            const std::string pred_name =
                stem + "_t" + std::to_string(i) + "_pred.raw";
            const std::string clean_name =
                stem + "_t" + std::to_string(i) + "_clean.raw";
            write_raw(fs::path(args.out_dir) / pred_name, pred_tiles.tiles[i]);
            write_raw(fs::path(args.out_dir) / clean_name, clean_tiles.tiles[i]);
            manifest.push_back("pair=" + stem + " tile=" + std::to_string(i) +
                               " pred=" + pred_name + " clean=" + clean_name);
        }
    }
    write_manifest(fs::path(args.out_dir) / "manifest.txt", manifest);
    return 0;
}

struct TilingArgs {
    std::string input, outdir, indir, output;
    int side = 64;
    std::string pad_mode = "replicate";
};

int cmd_grid_extract(const TilingArgs& args) {
    const ImageBuffer img = read_image(args.input);
    const PadMode mode = parse_pad_mode(args.pad_mode);
    const auto [padded, spec] = pad_to_multiple(img, args.side, mode);
    const GridLayout layout = make_grid_layout(padded.height(), padded.width(), args.side);
    const GridPatchSet set = grid_extract(padded, layout);

    fs::create_directories(args.outdir);
    std::vector<std::string> manifest = {
        "kind=grid",
        "patch_side=" + std::to_string(layout.patch_side),
        "rows=" + std::to_string(layout.rows),
        "cols=" + std::to_string(layout.cols),
        "pad_right=" + std::to_string(spec.right),
        "pad_bottom=" + std::to_string(spec.bottom),
        "pad_mode=" + args.pad_mode,
    };
    char name[32];
    for (std::size_t i = 0; i < set.patches.size(); ++i) {
        std::snprintf(name, sizeof(name), "patch_%04zu.raw", i);
        write_raw(fs::path(args.outdir) / name, set.patches[i]);
    }
    write_manifest(fs::path(args.outdir) / "manifest.txt", manifest);
    return 0;
}

int cmd_grid_reconstruct(const TilingArgs& args) {
    const auto kv = read_manifest(fs::path(args.indir) / "manifest.txt");
    if (kv.count("kind") == 0 || kv.at("kind") != "grid")
        throw IoError("manifest does not describe grid patches");
    const int side = manifest_int(kv, "patch_side");
    const int rows = manifest_int(kv, "rows");
    const int cols = manifest_int(kv, "cols");

    GridPatchSet set;
    set.layout = make_grid_layout(rows * side, cols * side, side);
    char name[32];
    for (int i = 0; i < rows * cols; ++i) {
        std::snprintf(name, sizeof(name), "patch_%04d.raw", i);
        set.patches.push_back(read_raw(fs::path(args.indir) / name));
    }
    const ImageBuffer padded = grid_reconstruct(set);
    PadSpec spec;
    spec.right = manifest_int(kv, "pad_right");
    spec.bottom = manifest_int(kv, "pad_bottom");
    write_image(args.output, unpad(padded, spec));
    return 0;
}

int cmd_window_extract(const TilingArgs& args) {
    const ImageBuffer img = read_image(args.input);
    const PadMode mode = parse_pad_mode(args.pad_mode);
    const auto [padded, spec] = pad_to_multiple(img, args.side, mode);
    const WindowTileSet set = window_extract(padded, args.side);

    fs::create_directories(args.outdir);
    std::vector<std::string> manifest = {
        "kind=window",
        "tile_side=" + std::to_string(set.tile_side),
        "rows=" + std::to_string(set.rows),
        "cols=" + std::to_string(set.cols),
        "pad_right=" + std::to_string(spec.right),
        "pad_bottom=" + std::to_string(spec.bottom),
        "pad_mode=" + args.pad_mode,
    };
    char name[32];
    for (std::size_t i = 0; i < set.tiles.size(); ++i) {
        std::snprintf(name, sizeof(name), "tile_%04zu.raw", i);
        write_raw(fs::path(args.outdir) / name, set.tiles[i]);
    }
    write_manifest(fs::path(args.outdir) / "manifest.txt", manifest);
    return 0;
}

int cmd_window_reconstruct(const TilingArgs& args) {
    const auto kv = read_manifest(fs::path(args.indir) / "manifest.txt");
    if (kv.count("kind") == 0 || kv.at("kind") != "window")
        throw IoError("manifest does not describe window tiles");
    WindowTileSet set;
    set.tile_side = manifest_int(kv, "tile_side");
    set.rows = manifest_int(kv, "rows");
    set.cols = manifest_int(kv, "cols");
    char name[32];
    for (int i = 0; i < set.rows * set.cols; ++i) {
        std::snprintf(name, sizeof(name), "tile_%04d.raw", i);
        set.tiles.push_back(read_raw(fs::path(args.indir) / name));
    }
    const ImageBuffer padded = window_reconstruct_naive(set);
    PadSpec spec;
    spec.right = manifest_int(kv, "pad_right");
    spec.bottom = manifest_int(kv, "pad_bottom");
    write_image(args.output, unpad(padded, spec));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tiled global/local image enhancement pipeline"};
    app.require_subcommand(1);

    // dehaze
    DehazeArgs dehaze;
    auto* cmd_dh = app.add_subcommand("dehaze", "Run the two-stage pipeline on an image");
    cmd_dh->add_option("input", dehaze.input, "Input image (.png or raw)")->required();
    cmd_dh->add_option("output", dehaze.output, "Output image path")->required();
    cmd_dh->add_option("--config", dehaze.config, "key=value config file");
    auto* dm_opt = cmd_dh->add_option("--dm", dehaze.opt.dm, "Global-stage restorer selector");
    auto* em_opt = cmd_dh->add_option("--em", dehaze.opt.em, "Local-stage restorer selector");
    auto* gs_opt = cmd_dh->add_option("--grid-side", dehaze.opt.pipeline.grid_patch_side,
                                      "Grid patch side");
    auto* ws_opt = cmd_dh->add_option("--window-side", dehaze.opt.pipeline.window_patch_side,
                                      "Window patch side (0 = grid side)");
    auto* mops_opt = cmd_dh->add_flag("--mops,!--no-mops", dehaze.opt.pipeline.use_mops,
                                      "Overlap-blend the local stage");
    auto* dih_opt = cmd_dh->add_flag("--dihedral,!--no-dihedral",
                                     dehaze.opt.pipeline.use_dihedral,
                                     "Average the 8 rotation/mirror variants");
    std::string order_str, pad_str, light_str, trans_str;
    auto* order_opt = cmd_dh->add_option("--order", order_str, "sglc | inv_sglc");
    auto* pad_opt = cmd_dh->add_option("--pad-mode", pad_str, "replicate | reflect");
    auto* light_opt = cmd_dh->add_option("--light", light_str,
                                         "Atmospheric light (scalar or comma triple)");
    auto* trans_opt = cmd_dh->add_option("--transmission", trans_str,
                                         "Raw transmission sidecar for haze-oracle");
    cmd_dh->add_option("--truth", dehaze.truth, "Reference image; prints a QualityReport");

    // synth
    SynthArgs synth;
    auto* cmd_sy = app.add_subcommand("synth", "Synthesize haze over a clean image");
    cmd_sy->add_option("clean", synth.clean, "Clean input image")->required();
    cmd_sy->add_option("output", synth.output, "Hazy output image")->required();
    cmd_sy->add_option("--beta", synth.beta, "Scattering strength");
    cmd_sy->add_option("--seed", synth.seed, "Seed for the noise depth map");
    cmd_sy->add_option("--octaves", synth.octaves, "Noise octaves");
    cmd_sy->add_option("--depth", synth.depth, "constant:<v> | noise | <map path>");
    cmd_sy->add_option("--light", synth.light, "Atmospheric light");
    cmd_sy->add_option("--transmission-out", synth.transmission_out,
                       "Sidecar path (default <output>.trans.raw)");

    // corrupt
    CorruptArgs corrupt;
    int side_both = 0;
    auto* cmd_co = app.add_subcommand("corrupt", "Draw seeded white squares for "
                                                 "self-supervised pretraining data");
    cmd_co->add_option("input", corrupt.input, "Clean input image")->required();
    cmd_co->add_option("output", corrupt.output, "Corrupted output image")->required();
    cmd_co->add_option("--count", corrupt.spec.square_count, "Number of squares");
    auto* side_opt = cmd_co->add_option("--side", side_both, "Fixed square side");
    cmd_co->add_option("--side-min", corrupt.spec.side_min, "Minimum square side");
    cmd_co->add_option("--side-max", corrupt.spec.side_max, "Maximum square side");
    cmd_co->add_option("--fill", corrupt.spec.fill, "Fill value");
    cmd_co->add_option("--seed", corrupt.spec.seed, "Placement seed");
    cmd_co->add_option("--mask-out", corrupt.mask_out,
                       "Mask path (default <output>.mask.raw)");

    // metrics
    MetricsArgs metrics;
    auto* cmd_me = app.add_subcommand("metrics", "Print the QualityReport for a pair");
    cmd_me->add_option("a", metrics.a, "Reference image")->required();
    cmd_me->add_option("b", metrics.b, "Restored image")->required();
    cmd_me->add_option("--tile-side", metrics.tile_side,
                       "Tile side for the seam statistic (0 = skip)");

    // export-lfe-dataset
    ExportArgs exporter;
    auto* cmd_ex = app.add_subcommand(
        "export-lfe-dataset", "Write (global-stage prediction, clean) window-tile pairs");
    cmd_ex->add_option("hazy_dir", exporter.hazy_dir, "Directory of hazy images")->required();
    cmd_ex->add_option("clean_dir", exporter.clean_dir, "Directory of clean images")->required();
    cmd_ex->add_option("out_dir", exporter.out_dir, "Output directory")->required();
    cmd_ex->add_option("--config", exporter.config, "key=value config file");
    auto* ex_dm = cmd_ex->add_option("--dm", exporter.opt.dm, "Global-stage restorer");
    auto* ex_gs = cmd_ex->add_option("--grid-side", exporter.opt.pipeline.grid_patch_side,
                                     "Grid patch side");
    auto* ex_ws = cmd_ex->add_option("--window-side",
                                     exporter.opt.pipeline.window_patch_side,
                                     "Window tile side (0 = grid side)");
    std::string ex_trans, ex_light;
    auto* ex_tr = cmd_ex->add_option("--transmission", ex_trans, "Oracle sidecar");
    auto* ex_li = cmd_ex->add_option("--light", ex_light, "Atmospheric light");

    // grid / window debug verbs
    TilingArgs grid_ex, grid_re, win_ex, win_re;
    auto* cmd_grid = app.add_subcommand("grid", "Grid patching debug verbs");
    cmd_grid->require_subcommand(1);
    auto* cmd_ge = cmd_grid->add_subcommand("extract", "Pad and write grid patches");
    cmd_ge->add_option("input", grid_ex.input)->required();
    cmd_ge->add_option("outdir", grid_ex.outdir)->required();
    cmd_ge->add_option("--patch-side", grid_ex.side, "Patch side");
    cmd_ge->add_option("--pad-mode", grid_ex.pad_mode, "replicate | reflect");
    auto* cmd_gr = cmd_grid->add_subcommand("reconstruct", "Rebuild the image from patches");
    cmd_gr->add_option("indir", grid_re.indir)->required();
    cmd_gr->add_option("output", grid_re.output)->required();

    auto* cmd_win = app.add_subcommand("window", "Window tiling debug verbs");
    cmd_win->require_subcommand(1);
    auto* cmd_we = cmd_win->add_subcommand("extract", "Pad and write window tiles");
    cmd_we->add_option("input", win_ex.input)->required();
    cmd_we->add_option("outdir", win_ex.outdir)->required();
    cmd_we->add_option("--tile-side", win_ex.side, "Tile side");
    cmd_we->add_option("--pad-mode", win_ex.pad_mode, "replicate | reflect");
    auto* cmd_wr = cmd_win->add_subcommand("reconstruct", "Rebuild the image from tiles");
    cmd_wr->add_option("indir", win_re.indir)->required();
    cmd_wr->add_option("output", win_re.output)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cmd_dh) {
            // Config file values replace the defaults; flags the user passed
            // explicitly win over the file.
            if (!dehaze.config.empty()) {
                const RunOptions from_flags = dehaze.opt;
                apply_config_file(dehaze.opt, dehaze.config);
                if (dm_opt->count() > 0) dehaze.opt.dm = from_flags.dm;
                if (em_opt->count() > 0) dehaze.opt.em = from_flags.em;
                if (gs_opt->count() > 0)
                    dehaze.opt.pipeline.grid_patch_side = from_flags.pipeline.grid_patch_side;
                if (ws_opt->count() > 0)
                    dehaze.opt.pipeline.window_patch_side =
                        from_flags.pipeline.window_patch_side;
                if (mops_opt->count() > 0)
                    dehaze.opt.pipeline.use_mops = from_flags.pipeline.use_mops;
                if (dih_opt->count() > 0)
                    dehaze.opt.pipeline.use_dihedral = from_flags.pipeline.use_dihedral;
            }
            if (order_opt->count() > 0) dehaze.opt.pipeline.order = parse_order(order_str);
            if (pad_opt->count() > 0) dehaze.opt.pipeline.pad_mode = parse_pad_mode(pad_str);
            if (light_opt->count() > 0) dehaze.opt.light = light_str;
            if (trans_opt->count() > 0) dehaze.opt.transmission_path = trans_str;
            return cmd_dehaze(dehaze);
        }
        if (*cmd_sy) return cmd_synth(synth);
        if (*cmd_co) {
            if (side_opt->count() > 0) {
                corrupt.spec.side_min = side_both;
                corrupt.spec.side_max = side_both;
            }
            return cmd_corrupt(corrupt);
        }
        if (*cmd_me) return cmd_metrics(metrics);
        if (*cmd_ex) {
            if (!exporter.config.empty()) {
                const RunOptions from_flags = exporter.opt;
                apply_config_file(exporter.opt, exporter.config);
                if (ex_dm->count() > 0) exporter.opt.dm = from_flags.dm;
                if (ex_gs->count() > 0)
                    exporter.opt.pipeline.grid_patch_side =
                        from_flags.pipeline.grid_patch_side;
                if (ex_ws->count() > 0)
                    exporter.opt.pipeline.window_patch_side =
                        from_flags.pipeline.window_patch_side;
            }
            if (ex_tr->count() > 0) exporter.opt.transmission_path = ex_trans;
            if (ex_li->count() > 0) exporter.opt.light = ex_light;
            return cmd_export_lfe_dataset(exporter);
        }
        if (*cmd_grid) {
            if (*cmd_ge) return cmd_grid_extract(grid_ex);
            return cmd_grid_reconstruct(grid_re);
        }
        if (*cmd_win) {
            if (*cmd_we) return cmd_window_extract(win_ex);
            return cmd_window_reconstruct(win_re);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const RestorerError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
