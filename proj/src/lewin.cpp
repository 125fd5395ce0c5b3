#include "sglc/lewin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sglc/image.hpp"
#include "sglc/rng.hpp"

namespace sglc {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

float activate(float v, Activation act) {
    if (act == Activation::Identity) return v;
    const double x = static_cast<double>(v);
    return static_cast<float>(0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))));
}

void fill_uniform(SplitMix64& rng, std::vector<float>& v, std::size_t n,
                  float offset = 0.0f) {
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = offset + rng.next_float(-0.1f, 0.1f);
}

// Token i of an m x m window sits at (i / m, i % m).
int bias_index(int i, int j, int m) {
    const int dy = i / m - j / m + (m - 1);
    const int dx = i % m - j % m + (m - 1);
    return dy * (2 * m - 1) + dx;
}

} // namespace

void LeWinConfig::validate() const {
    require(channels >= 1, "lewin config: channels must be >= 1");
    require(window >= 1, "lewin config: window must be >= 1");
    require(heads >= 1, "lewin config: heads must be >= 1");
    require(channels % heads == 0, "lewin config: channels not divisible by heads");
    require(ffn_ratio >= 1, "lewin config: ffn_ratio must be >= 1");
}

LeWinWeights LeWinWeights::seeded(const LeWinConfig& cfg) {
    cfg.validate();
    const std::size_t c = static_cast<std::size_t>(cfg.channels);
    const std::size_t hidden = c * cfg.ffn_ratio;
    const std::size_t bias_side = 2 * static_cast<std::size_t>(cfg.window) - 1;

    LeWinWeights w;
    SplitMix64 rng(cfg.seed);
    fill_uniform(rng, w.ln1_gamma, c, 1.0f);
    fill_uniform(rng, w.ln1_beta, c);
    fill_uniform(rng, w.wq, c * c);
    fill_uniform(rng, w.wk, c * c);
    fill_uniform(rng, w.wv, c * c);
    // The bias draw happens regardless so the stream stays aligned when the
    // zero-bias fixture knob is set.
    fill_uniform(rng, w.pos_bias, static_cast<std::size_t>(cfg.heads) * bias_side * bias_side);
    if (cfg.zero_position_bias)
        std::fill(w.pos_bias.begin(), w.pos_bias.end(), 0.0f);
    fill_uniform(rng, w.ln2_gamma, c, 1.0f);
    fill_uniform(rng, w.ln2_beta, c);
    fill_uniform(rng, w.ffn_w1, c * hidden);
    fill_uniform(rng, w.ffn_b1, hidden);
    fill_uniform(rng, w.dw_kernel, hidden * 9);
    fill_uniform(rng, w.dw_bias, hidden);
    fill_uniform(rng, w.ffn_w2, hidden * c);
    fill_uniform(rng, w.ffn_b2, c);
    return w;
}

LeWinWeights LeWinWeights::zeros(const LeWinConfig& cfg) {
    cfg.validate();
    const std::size_t c = static_cast<std::size_t>(cfg.channels);
    const std::size_t hidden = c * cfg.ffn_ratio;
    const std::size_t bias_side = 2 * static_cast<std::size_t>(cfg.window) - 1;

    LeWinWeights w;
    w.ln1_gamma.assign(c, 0.0f);
    w.ln1_beta.assign(c, 0.0f);
    w.wq.assign(c * c, 0.0f);
    w.wk.assign(c * c, 0.0f);
    w.wv.assign(c * c, 0.0f);
    w.pos_bias.assign(static_cast<std::size_t>(cfg.heads) * bias_side * bias_side, 0.0f);
    w.ln2_gamma.assign(c, 0.0f);
    w.ln2_beta.assign(c, 0.0f);
    w.ffn_w1.assign(c * hidden, 0.0f);
    w.ffn_b1.assign(hidden, 0.0f);
    w.dw_kernel.assign(hidden * 9, 0.0f);
    w.dw_bias.assign(hidden, 0.0f);
    w.ffn_w2.assign(hidden * c, 0.0f);
    w.ffn_b2.assign(c, 0.0f);
    return w;
}

FeatureMap layer_norm(const FeatureMap& x, const float* gamma, const float* beta) {
    const int c = x.channels;
    require(c >= 1, "layer_norm: empty feature map");
    FeatureMap out(x.height, x.width, c);
    const std::size_t tokens = static_cast<std::size_t>(x.height) * x.width;
    for (std::size_t t = 0; t < tokens; ++t) {
        const float* src = x.values.data() + t * c;
        float* dst = out.values.data() + t * c;
        double mean = 0.0;
        for (int i = 0; i < c; ++i) mean += src[i];
        mean /= c;
        double var = 0.0;
        for (int i = 0; i < c; ++i) {
            const double d = src[i] - mean;
            var += d * d;
        }
        var /= c;
        const double inv = 1.0 / std::sqrt(var + 1e-6);
        for (int i = 0; i < c; ++i) {
            double v = (src[i] - mean) * inv;
            if (gamma != nullptr) v = v * gamma[i] + (beta != nullptr ? beta[i] : 0.0f);
            dst[i] = static_cast<float>(v);
        }
    }
    return out;
}

std::vector<FeatureMap> window_partition(const FeatureMap& x, int window) {
    require(window >= 1, "window_partition: window must be >= 1");
    require(x.height % window == 0 && x.width % window == 0,
            "window_partition: dimensions not divisible by window");
    const int rows = x.height / window;
    const int cols = x.width / window;
    std::vector<FeatureMap> out;
    out.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        for (int col = 0; col < cols; ++col) {
            FeatureMap win(window, window, x.channels);
            for (int y = 0; y < window; ++y)
                for (int xx = 0; xx < window; ++xx)
                    for (int ch = 0; ch < x.channels; ++ch)
                        win.at(y, xx, ch) =
                            x.at(r * window + y, col * window + xx, ch);
            out.push_back(std::move(win));
        }
    }
    return out;
}

FeatureMap window_reverse(const std::vector<FeatureMap>& windows, int window,
                          int height, int width) {
    require(window >= 1 && height % window == 0 && width % window == 0,
            "window_reverse: dimensions not divisible by window");
    const int rows = height / window;
    const int cols = width / window;
    require(windows.size() == static_cast<std::size_t>(rows) * cols,
            "window_reverse: window count mismatch");
    const int c = windows.empty() ? 0 : windows[0].channels;
    FeatureMap out(height, width, c);
    for (int r = 0; r < rows; ++r) {
        for (int col = 0; col < cols; ++col) {
            const FeatureMap& win = windows[static_cast<std::size_t>(r) * cols + col];
            require(win.height == window && win.width == window && win.channels == c,
                    "window_reverse: window shape mismatch");
            for (int y = 0; y < window; ++y)
                for (int xx = 0; xx < window; ++xx)
                    for (int ch = 0; ch < c; ++ch)
                        out.at(r * window + y, col * window + xx, ch) = win.at(y, xx, ch);
        }
    }
    return out;
}

TokenMatrix attention(const TokenMatrix& q, const TokenMatrix& k,
                      const TokenMatrix& v, const TokenMatrix& bias,
                      int head_dim) {
    require(head_dim >= 1, "attention: head_dim must be >= 1");
    require(q.cols == k.cols, "attention: Q/K feature dims differ");
    require(k.rows == v.rows, "attention: K/V token counts differ");
    const bool has_bias = !bias.values.empty();
    if (has_bias)
        require(bias.rows == q.rows && bias.cols == k.rows,
                "attention: bias shape mismatch");

    const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
    TokenMatrix out(q.rows, v.cols);
    std::vector<double> logits(static_cast<std::size_t>(k.rows));
    for (int i = 0; i < q.rows; ++i) {
        double max_logit = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < k.rows; ++j) {
            double dot = 0.0;
            for (int d = 0; d < q.cols; ++d)
                dot += static_cast<double>(q.at(i, d)) * static_cast<double>(k.at(j, d));
            double l = dot * scale;
            if (has_bias) l += static_cast<double>(bias.at(i, j));
            logits[j] = l;
            max_logit = std::max(max_logit, l);
        }
        double norm = 0.0;
        for (int j = 0; j < k.rows; ++j) {
            logits[j] = std::exp(logits[j] - max_logit);
            norm += logits[j];
        }
        for (int d = 0; d < v.cols; ++d) {
            double acc = 0.0;
            for (int j = 0; j < k.rows; ++j)
                acc += logits[j] * static_cast<double>(v.at(j, d));
            out.at(i, d) = static_cast<float>(acc / norm);
        }
    }
    return out;
}

FeatureMap nwmsa_forward(const FeatureMap& x, const LeWinConfig& cfg,
                         const LeWinWeights& w) {
    cfg.validate();
    require(x.channels == cfg.channels, "nwmsa: channel mismatch");
    const int m = cfg.window;
    const int c = cfg.channels;
    const int dk = cfg.head_dim();
    const int n = m * m;
    const int bias_side = 2 * m - 1;

    std::vector<FeatureMap> windows = window_partition(x, m);
    for (FeatureMap& win : windows) {
        // Tokens row-major within the window.
        TokenMatrix tokens(n, c);
        for (int y = 0; y < m; ++y)
            for (int xx = 0; xx < m; ++xx)
                for (int ch = 0; ch < c; ++ch)
                    tokens.at(y * m + xx, ch) = win.at(y, xx, ch);

        TokenMatrix merged(n, c);
        for (int h = 0; h < cfg.heads; ++h) {
            TokenMatrix q(n, dk), k(n, dk), v(n, dk);
            for (int i = 0; i < n; ++i) {
                for (int d = 0; d < dk; ++d) {
                    const int col = h * dk + d;
                    double aq = 0.0, ak = 0.0, av = 0.0;
                    for (int ch = 0; ch < c; ++ch) {
                        const double t = tokens.at(i, ch);
                        const std::size_t idx = static_cast<std::size_t>(ch) * c + col;
                        aq += t * w.wq[idx];
                        ak += t * w.wk[idx];
                        av += t * w.wv[idx];
                    }
                    q.at(i, d) = static_cast<float>(aq);
                    k.at(i, d) = static_cast<float>(ak);
                    v.at(i, d) = static_cast<float>(av);
                }
            }
            TokenMatrix bias(n, n);
            const float* table =
                w.pos_bias.data() +
                static_cast<std::size_t>(h) * bias_side * bias_side;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    bias.at(i, j) = table[bias_index(i, j, m)];

            const TokenMatrix head_out = attention(q, k, v, bias, dk);
            for (int i = 0; i < n; ++i)
                for (int d = 0; d < dk; ++d)
                    merged.at(i, h * dk + d) = head_out.at(i, d);
        }

        for (int y = 0; y < m; ++y)
            for (int xx = 0; xx < m; ++xx)
                for (int ch = 0; ch < c; ++ch)
                    win.at(y, xx, ch) = merged.at(y * m + xx, ch);
    }
    return window_reverse(windows, m, x.height, x.width);
}

FeatureMap nwmsa_forward(const FeatureMap& x, const LeWinConfig& cfg) {
    return nwmsa_forward(x, cfg, LeWinWeights::seeded(cfg));
}

FeatureMap lff_forward(const FeatureMap& x, const LeWinConfig& cfg,
                       const LeWinWeights& w) {
    cfg.validate();
    require(x.channels == cfg.channels, "lff: channel mismatch");
    const int c = cfg.channels;
    const int hidden = c * cfg.ffn_ratio;
    const int h = x.height;
    const int wd = x.width;

    // Token-wise expansion C -> hidden.
    FeatureMap up(h, wd, hidden);
    for (int y = 0; y < h; ++y) {
        for (int xx = 0; xx < wd; ++xx) {
            const float* src = &x.at(y, xx, 0);
            float* dst = &up.values[(static_cast<std::size_t>(y) * wd + xx) * hidden];
            for (int j = 0; j < hidden; ++j) {
                double acc = w.ffn_b1[j];
                for (int ch = 0; ch < c; ++ch)
                    acc += static_cast<double>(src[ch]) *
                           static_cast<double>(w.ffn_w1[static_cast<std::size_t>(ch) * hidden + j]);
                dst[j] = activate(static_cast<float>(acc), cfg.activation);
            }
        }
    }

    // Depthwise 3x3, edge-replicate.
    FeatureMap conv = up;
    for (int y = 0; y < h; ++y) {
        for (int xx = 0; xx < wd; ++xx) {
            float* dst = &conv.values[(static_cast<std::size_t>(y) * wd + xx) * hidden];
            for (int j = 0; j < hidden; ++j) {
                const float* kern = &w.dw_kernel[static_cast<std::size_t>(j) * 9];
                double acc = w.dw_bias[j];
                for (int dy = -1; dy <= 1; ++dy) {
                    const int sy = clamp_index(y + dy, h);
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int sx = clamp_index(xx + dx, wd);
                        acc += static_cast<double>(
                                   up.values[(static_cast<std::size_t>(sy) * wd + sx) *
                                                 hidden +
                                             j]) *
                               static_cast<double>(kern[(dy + 1) * 3 + (dx + 1)]);
                    }
                }
                dst[j] = activate(static_cast<float>(acc), cfg.activation);
            }
        }
    }

    // Token-wise reduction hidden -> C.
    FeatureMap out(h, wd, c);
    for (int y = 0; y < h; ++y) {
        for (int xx = 0; xx < wd; ++xx) {
            const float* src = &conv.values[(static_cast<std::size_t>(y) * wd + xx) * hidden];
            float* dst = &out.at(y, xx, 0);
            for (int ch = 0; ch < c; ++ch) {
                double acc = w.ffn_b2[ch];
                for (int j = 0; j < hidden; ++j)
                    acc += static_cast<double>(src[j]) *
                           static_cast<double>(w.ffn_w2[static_cast<std::size_t>(j) * c + ch]);
                dst[ch] = static_cast<float>(acc);
            }
        }
    }
    return out;
}

FeatureMap lff_forward(const FeatureMap& x, const LeWinConfig& cfg) {
    return lff_forward(x, cfg, LeWinWeights::seeded(cfg));
}

FeatureMap lewin_forward(const FeatureMap& x, const LeWinConfig& cfg,
                         const LeWinWeights& w) {
    cfg.validate();
    const FeatureMap attn = nwmsa_forward(
        layer_norm(x, w.ln1_gamma.data(), w.ln1_beta.data()), cfg, w);
    FeatureMap mid(x.height, x.width, x.channels);
    for (std::size_t i = 0; i < mid.values.size(); ++i)
        mid.values[i] = attn.values[i] + x.values[i];

    const FeatureMap ffn = lff_forward(
        layer_norm(mid, w.ln2_gamma.data(), w.ln2_beta.data()), cfg, w);
    FeatureMap out(x.height, x.width, x.channels);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = ffn.values[i] + mid.values[i];
    return out;
}

FeatureMap lewin_forward(const FeatureMap& x, const LeWinConfig& cfg) {
    return lewin_forward(x, cfg, LeWinWeights::seeded(cfg));
}

} // namespace sglc
