#include "sglc/pipeline.hpp"

#include <stdexcept>
#include <string>

#include "sglc/grid.hpp"
#include "sglc/mops.hpp"
#include "sglc/parallel.hpp"
#include "sglc/window.hpp"

namespace sglc {

namespace {

void check_restorer(const Restorer& r, int patch_side, int channels, const char* role) {
    if (r.patch_side() != 0 && r.patch_side() != patch_side)
        throw std::invalid_argument(std::string(role) +
                                    ": restorer patch side does not match config");
    if (r.channels() != 0 && r.channels() != channels)
        throw std::invalid_argument(std::string(role) +
                                    ": restorer channels do not match input");
}

ImageBuffer restore_checked(const Restorer& r, const ImageBuffer& patch,
                            const PatchContext& ctx, const std::string& where) {
    ImageBuffer out;
    try {
        out = r.restore(patch, ctx);
    } catch (const RestorerError&) {
        throw;
    } catch (const std::exception& e) {
        throw RestorerError(where + ": " + e.what());
    }
    if (!out.same_shape(patch))
        throw RestorerError(where + ": restorer returned a different shape");
    return out;
}

} // namespace

ImageBuffer run_gfg(const ImageBuffer& img, const Restorer& dm, int patch_side,
                    PadMode mode) {
    check_restorer(dm, patch_side, img.channels(), "gfg");
    auto [padded, spec] = pad_to_multiple(img, patch_side, mode);
    const GridLayout layout =
        make_grid_layout(padded.height(), padded.width(), patch_side);
    GridPatchSet patches = grid_extract(padded, layout);

    GridPatchSet restored;
    restored.layout = layout;
    restored.patches.resize(patches.patches.size());
    parallel_for(patches.patches.size(), [&](std::size_t l) {
        PatchContext ctx;
        ctx.x0 = static_cast<int>(l) % layout.cols;
        ctx.y0 = static_cast<int>(l) / layout.cols;
        ctx.step_x = layout.cols;
        ctx.step_y = layout.rows;
        const std::string where = "dm failed on grid patch " + std::to_string(l) +
                                  " (offset " + std::to_string(ctx.x0) + "," +
                                  std::to_string(ctx.y0) + ")";
        restored.patches[l] = restore_checked(dm, patches.patches[l], ctx, where);
    });

    return unpad(grid_reconstruct(restored), spec);
}

ImageBuffer run_lfe(const ImageBuffer& img, const Restorer& em, int patch_side,
                    bool use_mops, bool use_dihedral, PadMode mode) {
    check_restorer(em, patch_side, img.channels(), "lfe");
    auto [padded, spec] = pad_to_multiple(img, patch_side, mode);

    if (use_mops)
        return unpad(mops_blend(padded, em, patch_side, use_dihedral), spec);

    WindowTileSet tiles = window_extract(padded, patch_side);
    WindowTileSet restored;
    restored.tile_side = tiles.tile_side;
    restored.rows = tiles.rows;
    restored.cols = tiles.cols;
    restored.tiles.resize(tiles.tiles.size());
    parallel_for(tiles.tiles.size(), [&](std::size_t i) {
        PatchContext ctx;
        ctx.x0 = (static_cast<int>(i) % tiles.cols) * patch_side;
        ctx.y0 = (static_cast<int>(i) / tiles.cols) * patch_side;
        const std::string where = "em failed on window tile " + std::to_string(i) +
                                  " (origin " + std::to_string(ctx.x0) + "," +
                                  std::to_string(ctx.y0) + ")";
        restored.tiles[i] = restore_checked(em, tiles.tiles[i], ctx, where);
    });
    return unpad(window_reconstruct_naive(restored), spec);
}

ImageBuffer run_sglc(const ImageBuffer& img, const Restorer& dm,
                     const Restorer& em, const PipelineConfig& cfg) {
    if (img.empty()) throw std::invalid_argument("run_sglc: empty image");
    if (cfg.grid_patch_side < 4 || cfg.grid_patch_side % 4 != 0 ||
        cfg.effective_window_side() < 4 || cfg.effective_window_side() % 4 != 0)
        throw std::invalid_argument("run_sglc: patch sides must be positive multiples of 4");

    const int window_side = cfg.effective_window_side();
    if (cfg.order == StageOrder::Sglc) {
        const ImageBuffer global = run_gfg(img, dm, cfg.grid_patch_side, cfg.pad_mode);
        return run_lfe(global, em, window_side, cfg.use_mops, cfg.use_dihedral,
                       cfg.pad_mode);
    }
    const ImageBuffer local =
        run_lfe(img, em, window_side, cfg.use_mops, cfg.use_dihedral, cfg.pad_mode);
    return run_gfg(local, dm, cfg.grid_patch_side, cfg.pad_mode);
}

QualityReport evaluate(const ImageBuffer& reference, const ImageBuffer& restored,
                       int tile_side, double wall_time_s) {
    if (!reference.same_shape(restored))
        throw std::invalid_argument("evaluate: shape mismatch");
    QualityReport report;
    report.psnr_db = psnr(reference, restored);
    report.ssim = ssim(reference, restored);
    report.seam = seam_metric(restored, tile_side);
    report.wall_time_s = wall_time_s;
    return report;
}

} // namespace sglc
