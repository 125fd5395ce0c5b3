#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sglc/image.hpp"
#include "sglc/lewin.hpp"

namespace sglc {

/// Thrown when a patch restorer fails or violates its shape contract; the
/// pipeline attaches patch/tile coordinates to the message.
class RestorerError : public std::runtime_error {
public:
    explicit RestorerError(const std::string& what) : std::runtime_error(what) {}
};

/// Where a patch came from: source coordinates of the patch's local (0,0)
/// pixel and the source-coordinate stride between adjacent local pixels,
/// in the frame the patch was cut from (the padded image for grid/window
/// extraction, the blend frame for overlapped tiles, where coordinates may
/// be negative inside the margin). Restorers that need side-channel data
/// (the haze oracle's transmission map) sample it through this map;
/// self-contained restorers ignore it.
struct PatchContext {
    int x0 = 0;
    int y0 = 0;
    int step_x = 1;
    int step_y = 1;
};

/// The pluggable patch -> patch transform. Implementations are
/// shape-preserving, deterministic for a fixed configuration, stateless
/// between calls, and safe to invoke concurrently on distinct patches.
class Restorer {
public:
    virtual ~Restorer() = default;

    /// Expected patch side / channel count; 0 means any.
    virtual int patch_side() const { return 0; }
    virtual int channels() const { return 0; }

    virtual ImageBuffer restore(const ImageBuffer& patch,
                                const PatchContext& ctx) const = 0;
};

/// restore(P) == P bit-exactly. Test fixture and the "enhancer disabled"
/// configuration.
std::unique_ptr<Restorer> identity_restorer();

/// Parameters for the analytic inverse of the scattering model: given the
/// transmission map and atmospheric light used at synthesis, recovers the
/// clean patch as (hazy - (1-t)*A) / t, clamped to [0,1].
///
/// The transmission map is sampled at each patch pixel's source coordinate
/// (via PatchContext) with indices clamped to the map extent — i.e.
/// edge-replicate semantics, matching the pipeline's default pad mode.
struct HazeOracleParams {
    ImageBuffer transmission;             // single channel, synthesis-time t(x)
    std::vector<float> atmospheric_light; // per channel, values in [0,1]
    float min_transmission = 0.1f;        // inversion conditioning floor
};

std::unique_ptr<Restorer> haze_oracle_restorer(HazeOracleParams params);

/// Copies the patch and overwrites a `width`-pixel frame with `value`.
/// Deliberately reproduces the boundary-damage failure mode that makes
/// naive tile stitching show seams.
std::unique_ptr<Restorer> border_damage_restorer(int width, float value);

/// Wraps the window-attention block as a Restorer with seeded weights.
/// Patch side must be divisible by cfg.window and cfg.channels must match
/// the patch. Output is not clamped.
std::unique_ptr<Restorer> lewin_restorer(const LeWinConfig& cfg);

/// Runs `command` through /bin/sh as a child process and exchanges patches
/// over its stdio in the raw image format (one request, one response of
/// identical shape, strictly alternating). Calls are serialized internally,
/// so the restorer is concurrency-safe as long as the child is
/// deterministic. `cat` is the identity restorer under this protocol.
std::unique_ptr<Restorer> process_restorer(std::string command);

} // namespace sglc
