#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sglc {

/// 2D feature map, row-major channel-interleaved like ImageBuffer but with
/// arbitrary channel count and unconstrained value range.
struct FeatureMap {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<float> values;

    FeatureMap() = default;
    FeatureMap(int h, int w, int c)
        : height(h), width(w), channels(c),
          values(static_cast<std::size_t>(h) * w * c, 0.0f) {}

    float& at(int y, int x, int c) {
        return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    const float& at(int y, int x, int c) const {
        return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

/// Small row-major matrix of tokens (rows = token count, cols = feature dim).
struct TokenMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<float> values;

    TokenMatrix() = default;
    TokenMatrix(int r, int c)
        : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0f) {}

    float& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
    float at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

enum class Activation { Gelu, Identity };

/// Configuration for the window-attention block. channels must be divisible
/// by heads and feature-map sides by window. The identity activation exists
/// for algebraic test fixtures.
struct LeWinConfig {
    int channels = 8;
    int window = 8;   // m: attention window side in pixels
    int heads = 2;    // k
    int ffn_ratio = 4; // hidden dim of the feed-forward = ffn_ratio * channels
    std::uint64_t seed = 0;
    Activation activation = Activation::Gelu;
    bool zero_position_bias = false; // fixture knob: B = 0 in the attention

    int head_dim() const { return channels / heads; }
    void validate() const;
};

/// All learned tensors of one block, plain and public so tests can build
/// exact fixtures (zeros, identities, zeroed position bias).
///
/// seeded() draws from SplitMix64(seed) in this fixed order:
///   ln1_gamma (1 + u), ln1_beta (u), wq, wk, wv (u), pos_bias (u),
///   ln2_gamma (1 + u), ln2_beta (u), ffn_w1, ffn_b1, dw_kernel, dw_bias,
///   ffn_w2, ffn_b2 (u)
/// where u is uniform in [-0.1, 0.1]. Projection matrices are stored
/// row-major [channels x channels] with head h owning column block
/// [h*head_dim, (h+1)*head_dim); pos_bias is heads x (2m-1)^2.
struct LeWinWeights {
    std::vector<float> ln1_gamma, ln1_beta;
    std::vector<float> wq, wk, wv;
    std::vector<float> pos_bias;
    std::vector<float> ln2_gamma, ln2_beta;
    std::vector<float> ffn_w1, ffn_b1;   // [C x ratio*C], [ratio*C]
    std::vector<float> dw_kernel, dw_bias; // [ratio*C x 3 x 3], [ratio*C]
    std::vector<float> ffn_w2, ffn_b2;   // [ratio*C x C], [C]

    static LeWinWeights seeded(const LeWinConfig& cfg);
    static LeWinWeights zeros(const LeWinConfig& cfg);
};

/// Per-token layer norm over channels (population variance, eps 1e-6),
/// then optional affine gamma/beta (pass nullptr to skip, i.e. to observe
/// the pre-affine normalized statistics).
FeatureMap layer_norm(const FeatureMap& x, const float* gamma, const float* beta);

/// Row-major enumeration of non-overlapping m x m windows; rejects sides
/// not divisible by m.
std::vector<FeatureMap> window_partition(const FeatureMap& x, int window);

/// Exact inverse of window_partition.
FeatureMap window_reverse(const std::vector<FeatureMap>& windows, int window,
                          int height, int width);

/// softmax(Q K^T / sqrt(head_dim) + bias) V. bias may be empty (treated as
/// zero) or rows x rows. Softmax rows are max-shifted and normalized with a
/// double accumulator.
TokenMatrix attention(const TokenMatrix& q, const TokenMatrix& k,
                      const TokenMatrix& v, const TokenMatrix& bias,
                      int head_dim);

/// Non-overlapping-window multi-head self-attention: per window and head,
/// project tokens by wq/wk/wv, apply attention with the relative-position
/// bias, concatenate heads. Windows never exchange information.
FeatureMap nwmsa_forward(const FeatureMap& x, const LeWinConfig& cfg,
                         const LeWinWeights& w);
FeatureMap nwmsa_forward(const FeatureMap& x, const LeWinConfig& cfg);

/// Locally-enhanced feed-forward: per-token linear C -> ratio*C, activation,
/// depthwise 3x3 convolution (edge-replicate), activation, linear back to C.
FeatureMap lff_forward(const FeatureMap& x, const LeWinConfig& cfg,
                       const LeWinWeights& w);
FeatureMap lff_forward(const FeatureMap& x, const LeWinConfig& cfg);

/// Full block: x' = NWMSA(LN(x)) + x; out = LFF(LN(x')) + x'.
FeatureMap lewin_forward(const FeatureMap& x, const LeWinConfig& cfg,
                         const LeWinWeights& w);
FeatureMap lewin_forward(const FeatureMap& x, const LeWinConfig& cfg);

} // namespace sglc
