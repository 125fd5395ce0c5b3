#include "sglc/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "sglc/kernels.hpp"

namespace sglc {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;
constexpr int kSeamBand = 2; // second differences sampled within +-2 of each line
constexpr double kSeamFloor = 1e-6;

std::vector<double> gaussian_taps() {
    std::vector<double> taps(kSsimWindow);
    const int half = kSsimWindow / 2;
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - half;
        taps[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
        sum += taps[i];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

// Valid-mode separable blur: (h - 10) x (w - 10) output.
std::vector<double> blur_valid(const std::vector<double>& in, int h, int w,
                               const std::vector<double>& taps) {
    const int vw = w - kSsimWindow + 1;
    const int vh = h - kSsimWindow + 1;
    std::vector<double> mid(static_cast<std::size_t>(h) * vw);
    for (int y = 0; y < h; ++y) {
        const double* src = in.data() + static_cast<std::size_t>(y) * w;
        double* dst = mid.data() + static_cast<std::size_t>(y) * vw;
        for (int x = 0; x < vw; ++x) {
            double acc = 0.0;
            for (int t = 0; t < kSsimWindow; ++t) acc += taps[t] * src[x + t];
            dst[x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(vh) * vw);
    for (int y = 0; y < vh; ++y) {
        double* dst = out.data() + static_cast<std::size_t>(y) * vw;
        for (int x = 0; x < vw; ++x) {
            double acc = 0.0;
            for (int t = 0; t < kSsimWindow; ++t)
                acc += taps[t] * mid[static_cast<std::size_t>(y + t) * vw + x];
            dst[x] = acc;
        }
    }
    return out;
}

std::vector<double> channel_plane(const ImageBuffer& img, int ch) {
    std::vector<double> p(img.pixel_count());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            p[static_cast<std::size_t>(y) * img.width() + x] = img.at(y, x, ch);
    return p;
}

struct SeamAccumulator {
    double sum = 0.0;
    std::size_t count = 0;

    double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
};

// |f[t-1] - 2 f[t] + f[t+1]| accumulated over a +-kSeamBand band around each
// line at `start`, `start+step`, ... along the chosen axis.
SeamAccumulator second_diff_stat(const ImageBuffer& img, bool vertical_lines,
                                 int start, int step) {
    SeamAccumulator acc;
    const int extent = vertical_lines ? img.width() : img.height();
    const int other = vertical_lines ? img.height() : img.width();
    const int c = img.channels();
    for (int line = start; line < extent; line += step) {
        for (int off = -kSeamBand; off <= kSeamBand; ++off) {
            const int t = line + off;
            if (t < 1 || t > extent - 2) continue;
            for (int u = 0; u < other; ++u) {
                for (int ch = 0; ch < c; ++ch) {
                    double a, b, d;
                    if (vertical_lines) {
                        a = img.at(u, t - 1, ch);
                        b = img.at(u, t, ch);
                        d = img.at(u, t + 1, ch);
                    } else {
                        a = img.at(t - 1, u, ch);
                        b = img.at(t, u, ch);
                        d = img.at(t + 1, u, ch);
                    }
                    acc.sum += std::abs(a - 2.0 * b + d);
                    ++acc.count;
                }
            }
        }
    }
    return acc;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

double mse(const ImageBuffer& a, const ImageBuffer& b) {
    require(!a.empty(), "mse: empty image");
    require(a.same_shape(b), "mse: shape mismatch");
    const std::size_t n = a.sample_count();
    return kernels::active().sum_sq_diff_f32(a.data(), b.data(), n) /
           static_cast<double>(n);
}

double psnr_from_mse(double mse_value) {
    if (mse_value <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse_value);
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    return psnr_from_mse(mse(a, b));
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
    require(!a.empty(), "ssim: empty image");
    require(a.same_shape(b), "ssim: shape mismatch");
    require(a.height() >= kSsimWindow && a.width() >= kSsimWindow,
            "ssim: image smaller than the 11x11 window");

    const std::vector<double> taps = gaussian_taps();
    const int h = a.height();
    const int w = a.width();
    double total = 0.0;
    std::size_t count = 0;
    for (int ch = 0; ch < a.channels(); ++ch) {
        const std::vector<double> pa = channel_plane(a, ch);
        const std::vector<double> pb = channel_plane(b, ch);
        std::vector<double> paa(pa.size()), pbb(pa.size()), pab(pa.size());
        for (std::size_t i = 0; i < pa.size(); ++i) {
            paa[i] = pa[i] * pa[i];
            pbb[i] = pb[i] * pb[i];
            pab[i] = pa[i] * pb[i];
        }
        const auto mu_a = blur_valid(pa, h, w, taps);
        const auto mu_b = blur_valid(pb, h, w, taps);
        const auto m_aa = blur_valid(paa, h, w, taps);
        const auto m_bb = blur_valid(pbb, h, w, taps);
        const auto m_ab = blur_valid(pab, h, w, taps);
        for (std::size_t i = 0; i < mu_a.size(); ++i) {
            const double va = m_aa[i] - mu_a[i] * mu_a[i];
            const double vb = m_bb[i] - mu_b[i] * mu_b[i];
            const double cov = m_ab[i] - mu_a[i] * mu_b[i];
            const double num = (2.0 * mu_a[i] * mu_b[i] + kSsimC1) * (2.0 * cov + kSsimC2);
            const double den =
                (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kSsimC1) * (va + vb + kSsimC2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double seam_metric(const ImageBuffer& img, int tile_side) {
    require(!img.empty(), "seam_metric: empty image");
    require(tile_side >= 2, "seam_metric: tile side must be >= 2");
    require(img.height() >= 2 * tile_side && img.width() >= 2 * tile_side,
            "seam_metric: image smaller than two tiles");

    SeamAccumulator seam;
    SeamAccumulator baseline;
    const int half = tile_side / 2;
    for (const bool vertical : {true, false}) {
        const auto s = second_diff_stat(img, vertical, tile_side, tile_side);
        const auto b = second_diff_stat(img, vertical, half, tile_side);
        seam.sum += s.sum;
        seam.count += s.count;
        baseline.sum += b.sum;
        baseline.count += b.count;
    }
    return (seam.mean() + kSeamFloor) / (baseline.mean() + kSeamFloor);
}

std::string QualityReport::to_record() const {
    std::string out;
    out += "psnr_db=" + format_double(psnr_db) + "\n";
    out += "ssim=" + format_double(ssim) + "\n";
    out += "seam=" + format_double(seam) + "\n";
    out += "wall_time_s=" + format_double(wall_time_s) + "\n";
    return out;
}

QualityReport QualityReport::from_record(const std::string& text) {
    QualityReport r;
    std::istringstream in(text);
    std::string line;
    bool seen[4] = {false, false, false, false};
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("QualityReport: malformed line: " + line);
        const std::string key = line.substr(0, eq);
        const double value = std::stod(line.substr(eq + 1));
        if (key == "psnr_db") {
            r.psnr_db = value;
            seen[0] = true;
        } else if (key == "ssim") {
            r.ssim = value;
            seen[1] = true;
        } else if (key == "seam") {
            r.seam = value;
            seen[2] = true;
        } else if (key == "wall_time_s") {
            r.wall_time_s = value;
            seen[3] = true;
        } else {
            throw std::invalid_argument("QualityReport: unknown key: " + key);
        }
    }
    if (!(seen[0] && seen[1] && seen[2] && seen[3]))
        throw std::invalid_argument("QualityReport: missing fields");
    return r;
}

} // namespace sglc
