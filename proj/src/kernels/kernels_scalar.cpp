#include "sglc/kernels.hpp"

#include <algorithm>
#include <cstddef>

// Reference kernels. These define the operation sequence the AVX2 variants
// must reproduce bit-for-bit: no contraction (the build sets
// -ffp-contract=off), fixed association order, 4-lane blocked reductions.

namespace sglc::kernels {
namespace {

void clamp01_scalar(float* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        data[i] = std::min(std::max(data[i], 0.0f), 1.0f);
}

void haze_blend_scalar(float* out, const float* clean, const float* trans,
                       const float* light, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const float direct = trans[i] * clean[i];
        const float airlight = (1.0f - trans[i]) * light[i];
        out[i] = direct + airlight;
    }
}

void haze_invert_scalar(float* out, const float* hazy, const float* trans,
                        const float* light, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const float airlight = light[i] * (1.0f - trans[i]);
        const float direct = hazy[i] - airlight;
        const float restored = direct / trans[i];
        out[i] = std::min(std::max(restored, 0.0f), 1.0f);
    }
}

void wmac_scalar(double* acc, const float* x, const double* w, double scale,
                 std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        acc[i] += (w[i] * scale) * static_cast<double>(x[i]);
}

void waxpy_scalar(double* acc, const double* w, double scale, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += w[i] * scale;
}

void add_f32_scalar(double* acc, const float* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += static_cast<double>(x[i]);
}

void div_to_f32_scalar(float* out, const double* num, const double* den,
                       std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = den[i] > 1e-12 ? static_cast<float>(num[i] / den[i]) : 0.0f;
}

void scale_to_f32_scalar(float* out, const double* acc, double scale,
                         std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<float>(acc[i] * scale);
}

void conv5_row_scalar(double* out, const double* in, std::size_t n,
                      const double k[5]) {
    auto cl = [n](std::ptrdiff_t i) -> std::size_t {
        if (i < 0) return 0;
        if (i >= static_cast<std::ptrdiff_t>(n)) return n - 1;
        return static_cast<std::size_t>(i);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = static_cast<std::ptrdiff_t>(i);
        out[i] = ((((k[0] * in[cl(s - 2)] + k[1] * in[cl(s - 1)]) + k[2] * in[i]) +
                   k[3] * in[cl(s + 1)]) +
                  k[4] * in[cl(s + 2)]);
    }
}

void conv5_col_scalar(double* out, const double* in, std::size_t width,
                      std::size_t height, const double k[5]) {
    auto cl = [height](std::ptrdiff_t y) -> std::size_t {
        if (y < 0) return 0;
        if (y >= static_cast<std::ptrdiff_t>(height)) return height - 1;
        return static_cast<std::size_t>(y);
    };
    for (std::size_t y = 0; y < height; ++y) {
        const auto s = static_cast<std::ptrdiff_t>(y);
        const double* r0 = in + cl(s - 2) * width;
        const double* r1 = in + cl(s - 1) * width;
        const double* r2 = in + y * width;
        const double* r3 = in + cl(s + 1) * width;
        const double* r4 = in + cl(s + 2) * width;
        double* o = out + y * width;
        for (std::size_t x = 0; x < width; ++x)
            o[x] = ((((k[0] * r0[x] + k[1] * r1[x]) + k[2] * r2[x]) + k[3] * r3[x]) +
                    k[4] * r4[x]);
    }
}

double sum_sq_diff_f32_scalar(const float* a, const float* b, std::size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        for (int j = 0; j < 4; ++j) {
            const double d = static_cast<double>(a[i + j]) - static_cast<double>(b[i + j]);
            lane[j] += d * d;
        }
    }
    double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (; i < n; ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        total += d * d;
    }
    return total;
}

double sum_sq_diff_f64_scalar(const double* a, const double* b, std::size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        for (int j = 0; j < 4; ++j) {
            const double d = a[i + j] - b[i + j];
            lane[j] += d * d;
        }
    }
    double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        total += d * d;
    }
    return total;
}

const KernelTable kScalarTable = {
    "scalar",
    clamp01_scalar,
    haze_blend_scalar,
    haze_invert_scalar,
    wmac_scalar,
    waxpy_scalar,
    add_f32_scalar,
    div_to_f32_scalar,
    scale_to_f32_scalar,
    conv5_row_scalar,
    conv5_col_scalar,
    sum_sq_diff_f32_scalar,
    sum_sq_diff_f64_scalar,
};

} // namespace

const KernelTable& scalar_table() { return kScalarTable; }

} // namespace sglc::kernels
