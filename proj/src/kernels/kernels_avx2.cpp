#include "sglc/kernels.hpp"

// AVX2 variants of the reference kernels. This translation unit is the only
// one compiled with -mavx2; everything here mirrors the scalar operation
// sequence exactly (mul/add intrinsics only, never FMA, identical lane
// layout for reductions) so outputs are bit-identical to the scalar table.

#if defined(__AVX2__)

#include <immintrin.h>

#include <algorithm>
#include <cstddef>

namespace sglc::kernels {
namespace {

void clamp01_avx2(float* data, std::size_t n) {
    const __m256 zero = _mm256_setzero_ps();
    const __m256 one = _mm256_set1_ps(1.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 v = _mm256_loadu_ps(data + i);
        v = _mm256_min_ps(_mm256_max_ps(v, zero), one);
        _mm256_storeu_ps(data + i, v);
    }
    for (; i < n; ++i) data[i] = std::min(std::max(data[i], 0.0f), 1.0f);
}

void haze_blend_avx2(float* out, const float* clean, const float* trans,
                     const float* light, std::size_t n) {
    const __m256 one = _mm256_set1_ps(1.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 t = _mm256_loadu_ps(trans + i);
        const __m256 direct = _mm256_mul_ps(t, _mm256_loadu_ps(clean + i));
        const __m256 airlight =
            _mm256_mul_ps(_mm256_sub_ps(one, t), _mm256_loadu_ps(light + i));
        _mm256_storeu_ps(out + i, _mm256_add_ps(direct, airlight));
    }
    for (; i < n; ++i) {
        const float direct = trans[i] * clean[i];
        const float airlight = (1.0f - trans[i]) * light[i];
        out[i] = direct + airlight;
    }
}

void haze_invert_avx2(float* out, const float* hazy, const float* trans,
                      const float* light, std::size_t n) {
    const __m256 zero = _mm256_setzero_ps();
    const __m256 one = _mm256_set1_ps(1.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 t = _mm256_loadu_ps(trans + i);
        const __m256 airlight =
            _mm256_mul_ps(_mm256_loadu_ps(light + i), _mm256_sub_ps(one, t));
        const __m256 direct = _mm256_sub_ps(_mm256_loadu_ps(hazy + i), airlight);
        __m256 restored = _mm256_div_ps(direct, t);
        restored = _mm256_min_ps(_mm256_max_ps(restored, zero), one);
        _mm256_storeu_ps(out + i, restored);
    }
    for (; i < n; ++i) {
        const float airlight = light[i] * (1.0f - trans[i]);
        const float direct = hazy[i] - airlight;
        const float restored = direct / trans[i];
        out[i] = std::min(std::max(restored, 0.0f), 1.0f);
    }
}

void wmac_avx2(double* acc, const float* x, const double* w, double scale,
               std::size_t n) {
    const __m256d sc = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ws = _mm256_mul_pd(_mm256_loadu_pd(w + i), sc);
        const __m256d xv = _mm256_cvtps_pd(_mm_loadu_ps(x + i));
        const __m256d a = _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(ws, xv));
        _mm256_storeu_pd(acc + i, a);
    }
    for (; i < n; ++i) acc[i] += (w[i] * scale) * static_cast<double>(x[i]);
}

void waxpy_avx2(double* acc, const double* w, double scale, std::size_t n) {
    const __m256d sc = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_add_pd(_mm256_loadu_pd(acc + i),
                                        _mm256_mul_pd(_mm256_loadu_pd(w + i), sc));
        _mm256_storeu_pd(acc + i, a);
    }
    for (; i < n; ++i) acc[i] += w[i] * scale;
}

void add_f32_avx2(double* acc, const float* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_cvtps_pd(_mm_loadu_ps(x + i));
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), xv));
    }
    for (; i < n; ++i) acc[i] += static_cast<double>(x[i]);
}

void div_to_f32_avx2(float* out, const double* num, const double* den,
                     std::size_t n) {
    const __m256d floor = _mm256_set1_pd(1e-12);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_loadu_pd(den + i);
        const __m256d q = _mm256_div_pd(_mm256_loadu_pd(num + i), d);
        const __m256d mask = _mm256_cmp_pd(d, floor, _CMP_GT_OQ);
        const __m256d sel = _mm256_blendv_pd(zero, q, mask);
        _mm_storeu_ps(out + i, _mm256_cvtpd_ps(sel));
    }
    for (; i < n; ++i)
        out[i] = den[i] > 1e-12 ? static_cast<float>(num[i] / den[i]) : 0.0f;
}

void scale_to_f32_avx2(float* out, const double* acc, double scale,
                       std::size_t n) {
    const __m256d sc = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_mul_pd(_mm256_loadu_pd(acc + i), sc);
        _mm_storeu_ps(out + i, _mm256_cvtpd_ps(v));
    }
    for (; i < n; ++i) out[i] = static_cast<float>(acc[i] * scale);
}

inline __m256d conv5_lanes(__m256d a, __m256d b, __m256d c, __m256d d, __m256d e,
                           const __m256d k[5]) {
    __m256d s = _mm256_add_pd(_mm256_mul_pd(k[0], a), _mm256_mul_pd(k[1], b));
    s = _mm256_add_pd(s, _mm256_mul_pd(k[2], c));
    s = _mm256_add_pd(s, _mm256_mul_pd(k[3], d));
    return _mm256_add_pd(s, _mm256_mul_pd(k[4], e));
}

inline double conv5_one(const double* in, std::size_t i, std::size_t n,
                        const double k[5]) {
    auto cl = [n](std::ptrdiff_t j) -> std::size_t {
        if (j < 0) return 0;
        if (j >= static_cast<std::ptrdiff_t>(n)) return n - 1;
        return static_cast<std::size_t>(j);
    };
    const auto s = static_cast<std::ptrdiff_t>(i);
    return ((((k[0] * in[cl(s - 2)] + k[1] * in[cl(s - 1)]) + k[2] * in[i]) +
             k[3] * in[cl(s + 1)]) +
            k[4] * in[cl(s + 2)]);
}

void conv5_row_avx2(double* out, const double* in, std::size_t n,
                    const double k[5]) {
    if (n < 8) {
        for (std::size_t i = 0; i < n; ++i) out[i] = conv5_one(in, i, n, k);
        return;
    }
    const __m256d kv[5] = {_mm256_set1_pd(k[0]), _mm256_set1_pd(k[1]),
                           _mm256_set1_pd(k[2]), _mm256_set1_pd(k[3]),
                           _mm256_set1_pd(k[4])};
    out[0] = conv5_one(in, 0, n, k);
    out[1] = conv5_one(in, 1, n, k);
    std::size_t i = 2;
    for (; i + 4 <= n - 2; i += 4) {
        const __m256d a = _mm256_loadu_pd(in + i - 2);
        const __m256d b = _mm256_loadu_pd(in + i - 1);
        const __m256d c = _mm256_loadu_pd(in + i);
        const __m256d d = _mm256_loadu_pd(in + i + 1);
        const __m256d e = _mm256_loadu_pd(in + i + 2);
        _mm256_storeu_pd(out + i, conv5_lanes(a, b, c, d, e, kv));
    }
    for (; i < n; ++i) out[i] = conv5_one(in, i, n, k);
}

void conv5_col_avx2(double* out, const double* in, std::size_t width,
                    std::size_t height, const double k[5]) {
    auto cl = [height](std::ptrdiff_t y) -> std::size_t {
        if (y < 0) return 0;
        if (y >= static_cast<std::ptrdiff_t>(height)) return height - 1;
        return static_cast<std::size_t>(y);
    };
    const __m256d kv[5] = {_mm256_set1_pd(k[0]), _mm256_set1_pd(k[1]),
                           _mm256_set1_pd(k[2]), _mm256_set1_pd(k[3]),
                           _mm256_set1_pd(k[4])};
    for (std::size_t y = 0; y < height; ++y) {
        const auto s = static_cast<std::ptrdiff_t>(y);
        const double* r0 = in + cl(s - 2) * width;
        const double* r1 = in + cl(s - 1) * width;
        const double* r2 = in + y * width;
        const double* r3 = in + cl(s + 1) * width;
        const double* r4 = in + cl(s + 2) * width;
        double* o = out + y * width;
        std::size_t x = 0;
        for (; x + 4 <= width; x += 4) {
            const __m256d a = _mm256_loadu_pd(r0 + x);
            const __m256d b = _mm256_loadu_pd(r1 + x);
            const __m256d c = _mm256_loadu_pd(r2 + x);
            const __m256d d = _mm256_loadu_pd(r3 + x);
            const __m256d e = _mm256_loadu_pd(r4 + x);
            _mm256_storeu_pd(o + x, conv5_lanes(a, b, c, d, e, kv));
        }
        for (; x < width; ++x)
            o[x] = ((((k[0] * r0[x] + k[1] * r1[x]) + k[2] * r2[x]) + k[3] * r3[x]) +
                    k[4] * r4[x]);
    }
}

double sum_sq_diff_f32_avx2(const float* a, const float* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d av = _mm256_cvtps_pd(_mm_loadu_ps(a + i));
        const __m256d bv = _mm256_cvtps_pd(_mm_loadu_ps(b + i));
        const __m256d d = _mm256_sub_pd(av, bv);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double lane[4];
    _mm256_storeu_pd(lane, acc);
    double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (; i < n; ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        total += d * d;
    }
    return total;
}

double sum_sq_diff_f64_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double lane[4];
    _mm256_storeu_pd(lane, acc);
    double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        total += d * d;
    }
    return total;
}

const KernelTable kAvx2Table = {
    "avx2",
    clamp01_avx2,
    haze_blend_avx2,
    haze_invert_avx2,
    wmac_avx2,
    waxpy_avx2,
    add_f32_avx2,
    div_to_f32_avx2,
    scale_to_f32_avx2,
    conv5_row_avx2,
    conv5_col_avx2,
    sum_sq_diff_f32_avx2,
    sum_sq_diff_f64_avx2,
};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

} // namespace

const KernelTable* avx2_table() { return cpu_has_avx2() ? &kAvx2Table : nullptr; }

} // namespace sglc::kernels

#else // !__AVX2__

namespace sglc::kernels {

const KernelTable* avx2_table() { return nullptr; }

} // namespace sglc::kernels

#endif
