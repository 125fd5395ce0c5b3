#pragma once

#include <vector>

#include "sglc/image.hpp"

namespace sglc {

/// Multi-level band-pass decomposition: bands L_0..L_{K-1} (L_k at the
/// resolution of level k, each subsequent level ceil-halved) plus the final
/// low-pass residual. Built with the separable binomial [1,4,6,4,1]/16
/// blur (edge-replicate), even-index decimation, and constant-preserving
/// polyphase upsampling; collapse reconstructs the source exactly up to
/// f32 rounding.
struct LaplacianPyramid {
    std::vector<ImageBuffer> bands;
    ImageBuffer residual;

    int level_count() const { return static_cast<int>(bands.size()); }
};

/// Builds K band-pass levels plus the residual. Requires the coarsest level
/// to keep both sides >= 4 (i.e. ceil-halving K times from the input dims).
LaplacianPyramid pyramid_build(const ImageBuffer& img, int levels);

/// Exact inverse of pyramid_build: upsample-and-add from the residual down.
ImageBuffer pyramid_collapse(const LaplacianPyramid& pyr);

/// Adjoint (transpose) of the linear map img -> (L_0..L_{K-1}, residual),
/// applied to a pyramid-shaped input. Satisfies
/// <pyramid_build(u), v> == <u, pyramid_adjoint(v)> and drives loss_grad.
ImageBuffer pyramid_adjoint(const LaplacianPyramid& v);

struct LossParams {
    double epsilon = 1e-3;
    int pyramid_levels = 4; // 0 drops the pyramid term (spatial-only loss)
};

/// sqrt( mse(I, P) + sum_k mse(L_k(I), L_k(P)) + mse(residuals) + eps^2 ).
/// Norms are per-element means so the value is resolution-independent; the
/// eps^2 term sits under the root, giving loss == eps at P == I. All
/// internal arithmetic is double precision.
double loss_eval(const ImageBuffer& truth, const ImageBuffer& pred,
                 const LossParams& params);

/// Analytic d(loss)/d(pred) via the chain rule and the pyramid adjoint;
/// matches central finite differences to ~1e-8 relative.
ImageBuffer loss_grad(const ImageBuffer& truth, const ImageBuffer& pred,
                      const LossParams& params);

/// sqrt(x^2 + eps^2): smooth, even, >= eps, asymptotically |x|.
double charbonnier(double x, double epsilon);

} // namespace sglc
