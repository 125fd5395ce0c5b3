#pragma once

#include <vector>

#include "sglc/image.hpp"
#include "sglc/restorer.hpp"

namespace sglc {

/// Raw second-order spline profile of length `side` (side >= 4, divisible
/// by 4). With t = i/side and tri(t) = 1 - |2t - 1|:
///   outer quarters (t < 1/4 or t >= 3/4):  w = (2*tri(t))^2 / 2
///   inner half:                            w = 1 - (2*(1 - tri(t)))^2 / 2
/// Copies shifted by side/2 sum to exactly 1 at every covered index, which
/// is what makes 50%-overlap blends seamless.
std::vector<double> spline_profile_raw(int side);

/// The raw profile divided by its mean, so the average weight is 1.
std::vector<double> spline_window_1d(int side);

/// Separable 2D blending window: weight(y, x) = profile[y] * profile[x],
/// with the normalized 1D profile. Strictly positive away from the first
/// row/column, symmetric under horizontal and vertical flips.
struct WeightWindow {
    int side = 0;
    std::vector<double> profile;

    double weight(int y, int x) const { return profile[y] * profile[x]; }

    static WeightWindow make(int side);
};

/// One of the 8 symmetries of the square: optional horizontal mirror
/// followed by `rotation` quarter-turns counterclockwise.
struct DihedralTransform {
    int rotation = 0;   // 0..3 quarter-turns CCW
    bool mirrored = false;
};

/// Enumerates the 8 group elements (index 0 is the identity).
DihedralTransform dihedral_element(int index);
inline constexpr int kDihedralCount = 8;

ImageBuffer dihedral_apply(const ImageBuffer& img, const DihedralTransform& t);
/// Exact inverse: dihedral_inverse(dihedral_apply(img, t), t) == img bit-exactly.
ImageBuffer dihedral_inverse(const ImageBuffer& img, const DihedralTransform& t);

/// Multiple Overlapping Patches Smoother. For each dihedral variant (all 8
/// when use_dihedral, else just the identity): reflect-pad by tile_side/2,
/// restore tiles extracted at 50% overlap (stride tile_side/2), accumulate
/// prediction*weight and weight in double precision, divide, undo the
/// transform; the output is the mean over variants, cropped to the input
/// size.
///
/// Accumulation follows a fixed canonical order (variant-major, tiles
/// row-major), so the result is bit-identical across runs and worker
/// counts. If the restorer maps [0,1] into [0,1] the blend stays in [0,1].
/// Requires tile_side divisible by 4 and both image sides >= tile_side/2.
ImageBuffer mops_blend(const ImageBuffer& img, const Restorer& em,
                       int tile_side, bool use_dihedral);

} // namespace sglc
