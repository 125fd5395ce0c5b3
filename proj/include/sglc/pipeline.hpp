#pragma once

#include "sglc/image.hpp"
#include "sglc/metrics.hpp"
#include "sglc/restorer.hpp"

namespace sglc {

enum class StageOrder {
    Sglc,    // global stage first, then local enhancement
    InvSglc, // the reversed ablation ordering
};

struct PipelineConfig {
    int grid_patch_side = 1024;  // production default; desk-scale tests use 64
    int window_patch_side = 0;   // 0 = same as grid_patch_side
    bool use_mops = true;
    bool use_dihedral = true;
    StageOrder order = StageOrder::Sglc;
    PadMode pad_mode = PadMode::Replicate;

    int effective_window_side() const {
        return window_patch_side > 0 ? window_patch_side : grid_patch_side;
    }
};

/// Global stage: pad to a multiple of patch_side, extract grid patches,
/// restore each with dm (in parallel), reverse-reconstruct, unpad. Output
/// dims equal input dims. Restorer failures are rethrown as RestorerError
/// with the patch index and offsets attached.
ImageBuffer run_gfg(const ImageBuffer& img, const Restorer& dm, int patch_side,
                    PadMode mode = PadMode::Replicate);

/// Local stage: pad to a multiple of patch_side, then either the overlap
/// smoother (use_mops) or naive window tiling + reconstruction, then unpad.
ImageBuffer run_lfe(const ImageBuffer& img, const Restorer& em, int patch_side,
                    bool use_mops, bool use_dihedral,
                    PadMode mode = PadMode::Replicate);

/// Full two-stage inference per cfg.order. Stages run strictly in sequence;
/// results are bit-identical across worker counts and repeated runs.
ImageBuffer run_sglc(const ImageBuffer& img, const Restorer& dm,
                     const Restorer& em, const PipelineConfig& cfg);

/// Bundles PSNR/SSIM against the reference, the seam statistic of the
/// restored image at tile_side, and the producing run's wall time.
QualityReport evaluate(const ImageBuffer& reference, const ImageBuffer& restored,
                       int tile_side, double wall_time_s);

} // namespace sglc
