#pragma once

#include <cstddef>

namespace sglc::kernels {

/// Table of the arithmetic inner loops that dominate pipeline runtime.
/// Two implementations exist: portable scalar reference kernels and AVX2
/// variants. Both compute the *same IEEE operation sequence per element*
/// (no FMA contraction, fixed association order, 4-lane blocked reductions
/// in both paths), so their outputs are bit-identical; the equivalence test
/// suite asserts exactly that. Backend selection therefore never changes
/// results, only speed.
struct KernelTable {
    const char* name;

    // f32 elementwise
    // data[i] = min(max(data[i], 0), 1)
    void (*clamp01)(float* data, std::size_t n);
    // out[i] = trans[i]*clean[i] + (1 - trans[i])*light[i]
    void (*haze_blend)(float* out, const float* clean, const float* trans,
                       const float* light, std::size_t n);
    // out[i] = clamp01((hazy[i] - light[i]*(1 - trans[i])) / trans[i])
    void (*haze_invert)(float* out, const float* hazy, const float* trans,
                        const float* light, std::size_t n);

    // f64 accumulation (overlap blending)
    // acc[i] += (w[i]*scale) * (double)x[i]
    void (*wmac)(double* acc, const float* x, const double* w, double scale,
                 std::size_t n);
    // acc[i] += w[i]*scale
    void (*waxpy)(double* acc, const double* w, double scale, std::size_t n);
    // acc[i] += (double)x[i]
    void (*add_f32)(double* acc, const float* x, std::size_t n);
    // out[i] = den[i] > 1e-12 ? (float)(num[i]/den[i]) : 0
    void (*div_to_f32)(float* out, const double* num, const double* den,
                       std::size_t n);
    // out[i] = (float)(acc[i]*scale)
    void (*scale_to_f32)(float* out, const double* acc, double scale,
                         std::size_t n);

    // f64 five-tap stencils (pyramid blur), replicate boundary, association
    // order ((((k0*a + k1*b) + k2*c) + k3*d) + k4*e)
    void (*conv5_row)(double* out, const double* in, std::size_t n,
                      const double k[5]);
    // vertical pass over a width x height plane, vectorized across x
    void (*conv5_col)(double* out, const double* in, std::size_t width,
                      std::size_t height, const double k[5]);

    // reductions: sum of squared differences, accumulated in four
    // independent f64 partial sums (lane j takes elements i ≡ j mod 4),
    // combined as (s0+s1)+(s2+s3), tail elements added in index order.
    double (*sum_sq_diff_f32)(const float* a, const float* b, std::size_t n);
    double (*sum_sq_diff_f64)(const double* a, const double* b, std::size_t n);
};

/// Portable reference kernels. Always available.
const KernelTable& scalar_table();

/// AVX2 kernels, or nullptr when the binary was built without AVX2 support
/// or the CPU lacks it.
const KernelTable* avx2_table();

/// The runtime-selected table: AVX2 when available, else scalar. The
/// SGLC_KERNELS environment variable ("scalar" or "avx2") forces a backend;
/// an unavailable forced backend falls back to scalar.
const KernelTable& active();

} // namespace sglc::kernels
