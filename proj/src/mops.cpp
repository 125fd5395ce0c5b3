#include "sglc/mops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sglc/kernels.hpp"
#include "sglc/parallel.hpp"

namespace sglc {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

ImageBuffer rotate90_ccw(const ImageBuffer& img) {
    const int h = img.height();
    const int w = img.width();
    const int c = img.channels();
    ImageBuffer out(w, h, c);
    for (int y = 0; y < w; ++y) {
        float* dst = out.row(y);
        for (int x = 0; x < h; ++x) {
            const float* src = &img.at(x, w - 1 - y, 0);
            float* d = dst + static_cast<std::size_t>(x) * c;
            for (int ch = 0; ch < c; ++ch) d[ch] = src[ch];
        }
    }
    return out;
}

ImageBuffer rotate90_cw(const ImageBuffer& img) {
    const int h = img.height();
    const int w = img.width();
    const int c = img.channels();
    ImageBuffer out(w, h, c);
    for (int y = 0; y < w; ++y) {
        float* dst = out.row(y);
        for (int x = 0; x < h; ++x) {
            const float* src = &img.at(h - 1 - x, y, 0);
            float* d = dst + static_cast<std::size_t>(x) * c;
            for (int ch = 0; ch < c; ++ch) d[ch] = src[ch];
        }
    }
    return out;
}

ImageBuffer flip_horizontal(const ImageBuffer& img) {
    const int h = img.height();
    const int w = img.width();
    const int c = img.channels();
    ImageBuffer out(h, w, c);
    for (int y = 0; y < h; ++y) {
        const float* src = img.row(y);
        float* dst = out.row(y);
        for (int x = 0; x < w; ++x) {
            const float* s = src + static_cast<std::size_t>(w - 1 - x) * c;
            float* d = dst + static_cast<std::size_t>(x) * c;
            for (int ch = 0; ch < c; ++ch) d[ch] = s[ch];
        }
    }
    return out;
}

int round_up(int value, int multiple) {
    return (value + multiple - 1) / multiple * multiple;
}

/// One dihedral variant of the 50%-overlap spline blend. Input and output
/// dims match. Tiles within a row are restored in parallel; accumulation is
/// serial in row-major tile order.
ImageBuffer blend_single(const ImageBuffer& img, const Restorer& em,
                         const WeightWindow& ww, int variant) {
    const auto& k = kernels::active();
    const int side = ww.side;
    const int half = side / 2;
    const int h = img.height();
    const int w = img.width();
    const int c = img.channels();

    // Round to a whole number of strides, then add a half-tile margin on
    // every edge so each output pixel gets full-weight coverage.
    const int h2 = round_up(h, half);
    const int w2 = round_up(w, half);
    const ImageBuffer padded = pad_borders(img, half, half + (w2 - w), half,
                                           half + (h2 - h), PadMode::Reflect);
    const int ph = padded.height();
    const int pw = padded.width();

    std::vector<double> acc(static_cast<std::size_t>(ph) * pw * c, 0.0);
    std::vector<double> wacc(static_cast<std::size_t>(ph) * pw, 0.0);

    // Per-sample row weights (the x profile repeated per channel).
    std::vector<double> row_weights(static_cast<std::size_t>(side) * c);
    for (int x = 0; x < side; ++x)
        for (int ch = 0; ch < c; ++ch)
            row_weights[static_cast<std::size_t>(x) * c + ch] = ww.profile[x];

    const int tile_cols = w2 / half + 1;
    const int tile_rows = h2 / half + 1;

    std::vector<ImageBuffer> restored(static_cast<std::size_t>(tile_cols));
    for (int tr = 0; tr < tile_rows; ++tr) {
        const int ty = tr * half;
        parallel_for(static_cast<std::size_t>(tile_cols), [&](std::size_t tc) {
            const int tx = static_cast<int>(tc) * half;
            const ImageBuffer tile = crop(padded, tx, ty, side, side);
            PatchContext ctx;
            ctx.x0 = tx - half;
            ctx.y0 = ty - half;
            ImageBuffer result;
            try {
                result = em.restore(tile, ctx);
            } catch (const std::exception& e) {
                throw RestorerError("em failed on overlap tile at (" +
                                    std::to_string(ctx.x0) + "," + std::to_string(ctx.y0) +
                                    "), variant " + std::to_string(variant) + ": " +
                                    e.what());
            }
            if (result.height() != side || result.width() != side ||
                result.channels() != c)
                throw RestorerError("em returned wrong shape for overlap tile at (" +
                                    std::to_string(ctx.x0) + "," + std::to_string(ctx.y0) +
                                    "), variant " + std::to_string(variant));
            restored[tc] = std::move(result);
        });

        for (int tc = 0; tc < tile_cols; ++tc) {
            const int tx = tc * half;
            const ImageBuffer& tile = restored[tc];
            for (int y = 0; y < side; ++y) {
                const double wy = ww.profile[y];
                double* acc_row =
                    acc.data() + (static_cast<std::size_t>(ty + y) * pw + tx) * c;
                k.wmac(acc_row, tile.row(y), row_weights.data(), wy,
                       static_cast<std::size_t>(side) * c);
                double* wacc_row = wacc.data() + static_cast<std::size_t>(ty + y) * pw + tx;
                k.waxpy(wacc_row, ww.profile.data(), wy, static_cast<std::size_t>(side));
            }
        }
    }

    ImageBuffer out(h, w, c);
    std::vector<double> den(static_cast<std::size_t>(w) * c);
    for (int y = 0; y < h; ++y) {
        const double* wrow = wacc.data() + static_cast<std::size_t>(y + half) * pw + half;
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < c; ++ch)
                den[static_cast<std::size_t>(x) * c + ch] = wrow[x];
        const double* num =
            acc.data() + (static_cast<std::size_t>(y + half) * pw + half) * c;
        k.div_to_f32(out.row(y), num, den.data(), static_cast<std::size_t>(w) * c);
    }
    return out;
}

} // namespace

std::vector<double> spline_profile_raw(int side) {
    require(side >= 4, "spline window: side must be >= 4");
    require(side % 4 == 0, "spline window: side must be divisible by 4");

    std::vector<double> w(static_cast<std::size_t>(side));
    for (int i = 0; i < side; ++i) {
        const double t = static_cast<double>(i) / side;
        const double tri = 1.0 - std::abs(2.0 * t - 1.0);
        if (t < 0.25 || t >= 0.75) {
            w[i] = (2.0 * tri) * (2.0 * tri) / 2.0;
        } else {
            const double inv = 2.0 * (1.0 - tri);
            w[i] = 1.0 - inv * inv / 2.0;
        }
    }
    return w;
}

std::vector<double> spline_window_1d(int side) {
    std::vector<double> w = spline_profile_raw(side);
    double sum = 0.0;
    for (double v : w) sum += v;
    const double mean = sum / side;
    for (double& v : w) v /= mean;
    return w;
}

WeightWindow WeightWindow::make(int side) {
    WeightWindow ww;
    ww.side = side;
    ww.profile = spline_window_1d(side);
    return ww;
}

DihedralTransform dihedral_element(int index) {
    require(index >= 0 && index < kDihedralCount, "dihedral_element: index out of range");
    return DihedralTransform{index % 4, index >= 4};
}

ImageBuffer dihedral_apply(const ImageBuffer& img, const DihedralTransform& t) {
    require(!img.empty(), "dihedral_apply: empty image");
    require(t.rotation >= 0 && t.rotation < 4, "dihedral_apply: bad rotation");
    ImageBuffer out = t.mirrored ? flip_horizontal(img) : img;
    for (int r = 0; r < t.rotation; ++r) out = rotate90_ccw(out);
    return out;
}

ImageBuffer dihedral_inverse(const ImageBuffer& img, const DihedralTransform& t) {
    require(!img.empty(), "dihedral_inverse: empty image");
    require(t.rotation >= 0 && t.rotation < 4, "dihedral_inverse: bad rotation");
    ImageBuffer out = img;
    for (int r = 0; r < t.rotation; ++r) out = rotate90_cw(out);
    if (t.mirrored) out = flip_horizontal(out);
    return out;
}

ImageBuffer mops_blend(const ImageBuffer& img, const Restorer& em, int tile_side,
                       bool use_dihedral) {
    require(!img.empty(), "mops_blend: empty image");
    require(tile_side >= 4 && tile_side % 4 == 0,
            "mops_blend: tile side must be a positive multiple of 4");
    require(img.height() >= tile_side / 2 && img.width() >= tile_side / 2,
            "mops_blend: image smaller than half a tile");
    if (em.patch_side() != 0 && em.patch_side() != tile_side)
        throw std::invalid_argument("mops_blend: restorer patch side mismatch");
    if (em.channels() != 0 && em.channels() != img.channels())
        throw std::invalid_argument("mops_blend: restorer channel mismatch");

    const WeightWindow ww = WeightWindow::make(tile_side);
    const auto& k = kernels::active();
    const int variants = use_dihedral ? kDihedralCount : 1;

    std::vector<double> sum(img.sample_count(), 0.0);
    for (int v = 0; v < variants; ++v) {
        const DihedralTransform t = dihedral_element(v);
        const ImageBuffer transformed = dihedral_apply(img, t);
        const ImageBuffer blended = blend_single(transformed, em, ww, v);
        const ImageBuffer back = dihedral_inverse(blended, t);
        k.add_f32(sum.data(), back.data(), sum.size());
    }

    ImageBuffer out(img.height(), img.width(), img.channels());
    k.scale_to_f32(out.data(), sum.data(), 1.0 / variants, sum.size());
    return out;
}

} // namespace sglc
