#include "sglc/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sglc/kernels.hpp"

namespace sglc {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

constexpr double kBlur[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

struct PlaneD {
    int h = 0;
    int w = 0;
    std::vector<double> v;

    PlaneD() = default;
    PlaneD(int height, int width)
        : h(height), w(width), v(static_cast<std::size_t>(height) * width, 0.0) {}

    double* row(int y) { return v.data() + static_cast<std::size_t>(y) * w; }
    const double* row(int y) const { return v.data() + static_cast<std::size_t>(y) * w; }
};

int clampi(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

PlaneD blur5(const PlaneD& in) {
    const auto& k = kernels::active();
    PlaneD mid(in.h, in.w);
    for (int y = 0; y < in.h; ++y)
        k.conv5_row(mid.row(y), in.row(y), static_cast<std::size_t>(in.w), kBlur);
    PlaneD out(in.h, in.w);
    k.conv5_col(out.v.data(), mid.v.data(), static_cast<std::size_t>(in.w),
                static_cast<std::size_t>(in.h), kBlur);
    return out;
}

// Transpose of blur5 (rows then columns forward => columns then rows here);
// each forward gather becomes a scatter onto the clamped source indices.
PlaneD blur5_adjoint(const PlaneD& in) {
    PlaneD mid(in.h, in.w);
    for (int y = 0; y < in.h; ++y) {
        for (int tap = 0; tap < 5; ++tap) {
            const int sy = clampi(y + tap - 2, in.h);
            const double kv = kBlur[tap];
            const double* src = in.row(y);
            double* dst = mid.row(sy);
            for (int x = 0; x < in.w; ++x) dst[x] += kv * src[x];
        }
    }
    PlaneD out(in.h, in.w);
    for (int y = 0; y < in.h; ++y) {
        const double* src = mid.row(y);
        double* dst = out.row(y);
        for (int x = 0; x < in.w; ++x)
            for (int tap = 0; tap < 5; ++tap)
                dst[clampi(x + tap - 2, in.w)] += kBlur[tap] * src[x];
    }
    return out;
}

PlaneD decimate2(const PlaneD& in) {
    PlaneD out((in.h + 1) / 2, (in.w + 1) / 2);
    for (int y = 0; y < out.h; ++y) {
        const double* src = in.row(2 * y);
        double* dst = out.row(y);
        for (int x = 0; x < out.w; ++x) dst[x] = src[2 * x];
    }
    return out;
}

PlaneD decimate2_adjoint(const PlaneD& in, int parent_h, int parent_w) {
    PlaneD out(parent_h, parent_w);
    for (int y = 0; y < in.h; ++y) {
        const double* src = in.row(y);
        double* dst = out.row(2 * y);
        for (int x = 0; x < in.w; ++x) dst[2 * x] = src[x];
    }
    return out;
}

// 1D polyphase upsampling: zero-insertion followed by the doubled binomial
// kernel, with the missing neighbors taken from clamped coarse samples so
// constants are preserved exactly.
//   even o: (g[i-1] + 6 g[i] + g[i+1]) / 8,   i = o/2
//   odd o:  (g[i] + g[i+1]) / 2,              i = (o-1)/2
void upsample_1d(const double* g, int m, double* out, int n) {
    for (int o = 0; o < n; ++o) {
        if (o % 2 == 0) {
            const int i = o / 2;
            out[o] = (g[clampi(i - 1, m)] + 6.0 * g[i] + g[clampi(i + 1, m)]) / 8.0;
        } else {
            const int i = (o - 1) / 2;
            out[o] = (g[i] + g[clampi(i + 1, m)]) / 2.0;
        }
    }
}

void upsample_1d_adjoint(const double* v, int n, double* out, int m) {
    for (int i = 0; i < m; ++i) out[i] = 0.0;
    for (int o = 0; o < n; ++o) {
        if (o % 2 == 0) {
            const int i = o / 2;
            out[clampi(i - 1, m)] += v[o] / 8.0;
            out[i] += 6.0 * v[o] / 8.0;
            out[clampi(i + 1, m)] += v[o] / 8.0;
        } else {
            const int i = (o - 1) / 2;
            out[i] += v[o] / 2.0;
            out[clampi(i + 1, m)] += v[o] / 2.0;
        }
    }
}

// Horizontal then vertical expansion to the recorded parent dims.
PlaneD upsample_to(const PlaneD& g, int target_h, int target_w) {
    PlaneD wide(g.h, target_w);
    for (int y = 0; y < g.h; ++y) upsample_1d(g.row(y), g.w, wide.row(y), target_w);

    PlaneD out(target_h, target_w);
    std::vector<double> col(static_cast<std::size_t>(g.h));
    std::vector<double> up(static_cast<std::size_t>(target_h));
    for (int x = 0; x < target_w; ++x) {
        for (int y = 0; y < g.h; ++y) col[y] = wide.v[static_cast<std::size_t>(y) * target_w + x];
        upsample_1d(col.data(), g.h, up.data(), target_h);
        for (int y = 0; y < target_h; ++y) out.v[static_cast<std::size_t>(y) * target_w + x] = up[y];
    }
    return out;
}

// Adjoint of upsample_to: vertical adjoint first, then horizontal.
PlaneD upsample_to_adjoint(const PlaneD& v, int coarse_h, int coarse_w) {
    PlaneD narrow(coarse_h, v.w);
    std::vector<double> col(static_cast<std::size_t>(v.h));
    std::vector<double> down(static_cast<std::size_t>(coarse_h));
    for (int x = 0; x < v.w; ++x) {
        for (int y = 0; y < v.h; ++y) col[y] = v.v[static_cast<std::size_t>(y) * v.w + x];
        upsample_1d_adjoint(col.data(), v.h, down.data(), coarse_h);
        for (int y = 0; y < coarse_h; ++y)
            narrow.v[static_cast<std::size_t>(y) * v.w + x] = down[y];
    }
    PlaneD out(coarse_h, coarse_w);
    for (int y = 0; y < coarse_h; ++y)
        upsample_1d_adjoint(narrow.row(y), v.w, out.row(y), coarse_w);
    return out;
}

// K band-pass levels plus the low-pass residual (levels.size() == K + 1).
std::vector<PlaneD> forward_levels(PlaneD g0, int levels) {
    std::vector<PlaneD> out;
    out.reserve(static_cast<std::size_t>(levels) + 1);
    PlaneD g = std::move(g0);
    for (int k = 0; k < levels; ++k) {
        PlaneD next = decimate2(blur5(g));
        PlaneD up = upsample_to(next, g.h, g.w);
        PlaneD band(g.h, g.w);
        for (std::size_t i = 0; i < band.v.size(); ++i) band.v[i] = g.v[i] - up.v[i];
        out.push_back(std::move(band));
        g = std::move(next);
    }
    out.push_back(std::move(g));
    return out;
}

// Transpose of forward_levels applied to level-shaped input.
PlaneD backward_levels(const std::vector<PlaneD>& v) {
    const int levels = static_cast<int>(v.size()) - 1;
    PlaneD grad = v[levels]; // residual contribution
    for (int k = levels - 1; k >= 0; --k) {
        // band_k = g_k - up(g_{k+1}) and g_{k+1} = dec(blur(g_k))
        const PlaneD up_adj = upsample_to_adjoint(v[k], grad.h, grad.w);
        for (std::size_t i = 0; i < grad.v.size(); ++i) grad.v[i] -= up_adj.v[i];
        PlaneD parent = blur5_adjoint(decimate2_adjoint(grad, v[k].h, v[k].w));
        for (std::size_t i = 0; i < parent.v.size(); ++i) parent.v[i] += v[k].v[i];
        grad = std::move(parent);
    }
    return grad;
}

PlaneD extract_channel(const ImageBuffer& img, int ch) {
    PlaneD p(img.height(), img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            p.v[static_cast<std::size_t>(y) * img.width() + x] = img.at(y, x, ch);
    return p;
}

void check_pyramid_feasible(int h, int w, int levels) {
    require(levels >= 1, "pyramid: levels must be >= 1");
    int ch = h;
    int cw = w;
    for (int k = 0; k < levels; ++k) {
        ch = (ch + 1) / 2;
        cw = (cw + 1) / 2;
    }
    require(ch >= 4 && cw >= 4, "pyramid: image too small for requested levels");
}

void check_params(const LossParams& p, const ImageBuffer& img) {
    require(p.epsilon > 0.0, "loss: epsilon must be > 0");
    require(p.pyramid_levels >= 0, "loss: pyramid levels must be >= 0");
    // pyramid_levels == 0 drops the pyramid term entirely (spatial-only loss).
    if (p.pyramid_levels > 0)
        check_pyramid_feasible(img.height(), img.width(), p.pyramid_levels);
}

} // namespace

LaplacianPyramid pyramid_build(const ImageBuffer& img, int levels) {
    require(!img.empty(), "pyramid_build: empty image");
    check_pyramid_feasible(img.height(), img.width(), levels);

    const int c = img.channels();
    std::vector<std::vector<PlaneD>> per_channel;
    per_channel.reserve(static_cast<std::size_t>(c));
    for (int ch = 0; ch < c; ++ch)
        per_channel.push_back(forward_levels(extract_channel(img, ch), levels));

    LaplacianPyramid pyr;
    for (int k = 0; k <= levels; ++k) {
        const PlaneD& ref = per_channel[0][k];
        ImageBuffer level(ref.h, ref.w, c);
        for (int ch = 0; ch < c; ++ch) {
            const PlaneD& p = per_channel[ch][k];
            for (int y = 0; y < p.h; ++y)
                for (int x = 0; x < p.w; ++x)
                    level.at(y, x, ch) =
                        static_cast<float>(p.v[static_cast<std::size_t>(y) * p.w + x]);
        }
        if (k < levels)
            pyr.bands.push_back(std::move(level));
        else
            pyr.residual = std::move(level);
    }
    return pyr;
}

ImageBuffer pyramid_collapse(const LaplacianPyramid& pyr) {
    require(!pyr.residual.empty(), "pyramid_collapse: empty pyramid");
    const int c = pyr.residual.channels();
    const int levels = pyr.level_count();
    require(levels >= 1, "pyramid_collapse: no band-pass levels");

    ImageBuffer out(pyr.bands[0].height(), pyr.bands[0].width(), c);
    for (int ch = 0; ch < c; ++ch) {
        PlaneD g = extract_channel(pyr.residual, ch);
        for (int k = levels - 1; k >= 0; --k) {
            const ImageBuffer& band = pyr.bands[static_cast<std::size_t>(k)];
            PlaneD up = upsample_to(g, band.height(), band.width());
            g = PlaneD(band.height(), band.width());
            for (int y = 0; y < g.h; ++y)
                for (int x = 0; x < g.w; ++x)
                    g.v[static_cast<std::size_t>(y) * g.w + x] =
                        band.at(y, x, ch) + up.v[static_cast<std::size_t>(y) * g.w + x];
        }
        for (int y = 0; y < g.h; ++y)
            for (int x = 0; x < g.w; ++x)
                out.at(y, x, ch) =
                    static_cast<float>(g.v[static_cast<std::size_t>(y) * g.w + x]);
    }
    return out;
}

ImageBuffer pyramid_adjoint(const LaplacianPyramid& v) {
    require(!v.residual.empty() && v.level_count() >= 1,
            "pyramid_adjoint: empty pyramid");
    const int c = v.residual.channels();
    ImageBuffer out(v.bands[0].height(), v.bands[0].width(), c);
    for (int ch = 0; ch < c; ++ch) {
        std::vector<PlaneD> planes;
        planes.reserve(static_cast<std::size_t>(v.level_count()) + 1);
        for (const ImageBuffer& band : v.bands) planes.push_back(extract_channel(band, ch));
        planes.push_back(extract_channel(v.residual, ch));
        const PlaneD grad = backward_levels(planes);
        for (int y = 0; y < grad.h; ++y)
            for (int x = 0; x < grad.w; ++x)
                out.at(y, x, ch) =
                    static_cast<float>(grad.v[static_cast<std::size_t>(y) * grad.w + x]);
    }
    return out;
}

double loss_eval(const ImageBuffer& truth, const ImageBuffer& pred,
                 const LossParams& params) {
    require(!truth.empty(), "loss_eval: empty image");
    require(truth.same_shape(pred), "loss_eval: shape mismatch");
    check_params(params, truth);

    const auto& k = kernels::active();
    const std::size_t n = truth.sample_count();
    double total = k.sum_sq_diff_f32(truth.data(), pred.data(), n) / static_cast<double>(n);

    const int levels = params.pyramid_levels;
    if (levels > 0) {
        const int c = truth.channels();
        std::vector<double> level_sums(static_cast<std::size_t>(levels) + 1, 0.0);
        std::vector<std::size_t> level_counts(static_cast<std::size_t>(levels) + 1, 0);
        for (int ch = 0; ch < c; ++ch) {
            const auto lt = forward_levels(extract_channel(truth, ch), levels);
            const auto lp = forward_levels(extract_channel(pred, ch), levels);
            for (int kLev = 0; kLev <= levels; ++kLev) {
                level_sums[kLev] += k.sum_sq_diff_f64(lt[kLev].v.data(),
                                                      lp[kLev].v.data(),
                                                      lt[kLev].v.size());
                level_counts[kLev] += lt[kLev].v.size();
            }
        }
        for (int kLev = 0; kLev <= levels; ++kLev)
            total += level_sums[kLev] / static_cast<double>(level_counts[kLev]);
    }

    return std::sqrt(total + params.epsilon * params.epsilon);
}

ImageBuffer loss_grad(const ImageBuffer& truth, const ImageBuffer& pred,
                      const LossParams& params) {
    require(!truth.empty(), "loss_grad: empty image");
    require(truth.same_shape(pred), "loss_grad: shape mismatch");
    check_params(params, truth);

    const auto& k = kernels::active();
    const int levels = params.pyramid_levels;
    const int c = truth.channels();
    const std::size_t n = truth.sample_count();

    // Forward both pyramids, keeping the per-channel levels for the backward
    // pass; accumulate the loss inner sum along the way.
    std::vector<std::vector<PlaneD>> lt(static_cast<std::size_t>(c));
    std::vector<std::vector<PlaneD>> lp(static_cast<std::size_t>(c));
    double total = k.sum_sq_diff_f32(truth.data(), pred.data(), n) / static_cast<double>(n);
    std::vector<double> level_sums(static_cast<std::size_t>(levels) + 1, 0.0);
    std::vector<std::size_t> level_counts(static_cast<std::size_t>(levels) + 1, 0);
    if (levels > 0) {
        for (int ch = 0; ch < c; ++ch) {
            lt[ch] = forward_levels(extract_channel(truth, ch), levels);
            lp[ch] = forward_levels(extract_channel(pred, ch), levels);
            for (int kLev = 0; kLev <= levels; ++kLev) {
                level_sums[kLev] += k.sum_sq_diff_f64(lt[ch][kLev].v.data(),
                                                      lp[ch][kLev].v.data(),
                                                      lt[ch][kLev].v.size());
                level_counts[kLev] += lt[ch][kLev].v.size();
            }
        }
        for (int kLev = 0; kLev <= levels; ++kLev)
            total += level_sums[kLev] / static_cast<double>(level_counts[kLev]);
    }
    const double loss = std::sqrt(total + params.epsilon * params.epsilon);
    const double outer = 1.0 / (2.0 * loss);

    ImageBuffer grad(truth.height(), truth.width(), c);
    for (int ch = 0; ch < c; ++ch) {
        PlaneD pyr_grad(truth.height(), truth.width());
        if (levels > 0) {
            // dS/dL_k = (2 / n_k) (pred_k - truth_k), pushed through the adjoint.
            std::vector<PlaneD> residuals;
            residuals.reserve(static_cast<std::size_t>(levels) + 1);
            for (int kLev = 0; kLev <= levels; ++kLev) {
                PlaneD r(lt[ch][kLev].h, lt[ch][kLev].w);
                const double scale = 2.0 / static_cast<double>(level_counts[kLev]);
                for (std::size_t i = 0; i < r.v.size(); ++i)
                    r.v[i] = scale * (lp[ch][kLev].v[i] - lt[ch][kLev].v[i]);
                residuals.push_back(std::move(r));
            }
            pyr_grad = backward_levels(residuals);
        }

        const double spatial_scale = 2.0 / static_cast<double>(n);
        for (int y = 0; y < grad.height(); ++y) {
            for (int x = 0; x < grad.width(); ++x) {
                const double spatial =
                    spatial_scale * (static_cast<double>(pred.at(y, x, ch)) -
                                     static_cast<double>(truth.at(y, x, ch)));
                const double g =
                    pyr_grad.v[static_cast<std::size_t>(y) * grad.width() + x];
                grad.at(y, x, ch) = static_cast<float>(outer * (spatial + g));
            }
        }
    }
    return grad;
}

double charbonnier(double x, double epsilon) {
    require(epsilon > 0.0, "charbonnier: epsilon must be > 0");
    return std::sqrt(x * x + epsilon * epsilon);
}

} // namespace sglc
