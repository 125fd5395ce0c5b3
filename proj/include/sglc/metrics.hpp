#pragma once

#include <string>

#include "sglc/image.hpp"

namespace sglc {

/// Mean squared error over all samples, double accumulation.
double mse(const ImageBuffer& a, const ImageBuffer& b);

/// 10*log10(1 / MSE) with peak 1.0; +infinity for identical images.
double psnr(const ImageBuffer& a, const ImageBuffer& b);
double psnr_from_mse(double mse_value);

/// Single-scale structural similarity: 11x11 Gaussian window (sigma 1.5),
/// C1 = 0.01^2, C2 = 0.03^2 on unit range, valid positions only, computed
/// per channel and averaged. Requires both sides >= 11.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

/// Tile-boundary discontinuity statistic: mean |second difference| taken
/// across a +-2-sample band around every grid line at multiples of
/// tile_side, divided by the same statistic at lines offset by tile_side/2
/// (an interior baseline). Both terms get a 1e-6 additive floor, so a
/// constant image scores exactly 1; seam-free content scores ~1 and
/// tile-boundary artifacts push the ratio above 1. Requires both sides
/// >= 2*tile_side.
double seam_metric(const ImageBuffer& img, int tile_side);

/// The evaluation record emitted by the pipeline and CLI. Serializes to a
/// stable line-oriented key=value format:
///   psnr_db=<v>\n ssim=<v>\n seam=<v>\n wall_time_s=<v>\n
/// with "inf" for the identical-image PSNR sentinel.
struct QualityReport {
    double psnr_db = 0.0;
    double ssim = 0.0;
    double seam = 0.0;
    double wall_time_s = 0.0;

    std::string to_record() const;
    static QualityReport from_record(const std::string& text);
};

} // namespace sglc
