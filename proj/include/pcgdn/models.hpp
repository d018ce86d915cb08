#pragma once

#include <functional>
#include <string>

#include "pcgdn/nn/graph.hpp"
#include "pcgdn/spectral.hpp"
#include "pcgdn/waveform.hpp"

namespace pcgdn {

// Encoder ladder doubles 8 -> 64 over four 2x2 pools, bottleneck 128, so a
// 64x64 input reaches a 4x4x128 latent. Every conv is followed by batch
// norm + ReLU except the linear 1x1 head (spectra carry negative values).
struct UNetConfig {
    int input_hw = 64;
    int input_channels = 2;
    std::vector<int> encoder_filters{8, 16, 32, 64};
    int bottleneck_filters = 128;
    int convs_per_level = 2;
    int output_channels = 2;
};

// Same ladder and training setup as the U-Net, skip connections removed.
struct DAEConfig {
    UNetConfig base;
};

namespace detail {

template <typename T>
nn::ModelT<T> build_encoder_decoder(const UNetConfig& cfg, uint64_t seed, bool with_skips) {
    const int levels = static_cast<int>(cfg.encoder_filters.size());
    if (levels < 1) throw DomainError("model config: empty encoder ladder");
    if (cfg.input_hw % (1 << levels) != 0)
        throw DomainError("model config: input size must be divisible by 2^levels");
    if (cfg.convs_per_level < 1) throw DomainError("model config: convs_per_level must be >= 1");

    Rng rng(seed);
    nn::ModelT<T> m;
    int x = m.add_input("input");
    int channels = cfg.input_channels;

    auto conv_block = [&](const std::string& prefix, int node, int& cin, int cout) {
        for (int i = 1; i <= cfg.convs_per_level; ++i) {
            const std::string tag = prefix + "/conv" + std::to_string(i);
            node = m.add_conv(tag, node, 3, cin, cout, rng);
            node = m.add_batchnorm(prefix + "/bn" + std::to_string(i), node, cout);
            node = m.add_simple(nn::LayerKind::ReLU, prefix + "/relu" + std::to_string(i), node);
            cin = cout;
        }
        return node;
    };

    std::vector<int> skips;
    std::vector<int> skip_channels;
    for (int l = 0; l < levels; ++l) {
        const std::string prefix = "enc" + std::to_string(l + 1);
        x = conv_block(prefix, x, channels, cfg.encoder_filters[static_cast<size_t>(l)]);
        skips.push_back(x);
        skip_channels.push_back(channels);
        x = m.add_simple(nn::LayerKind::MaxPool2x2, prefix + "/pool", x);
    }

    x = conv_block("bottleneck", x, channels, cfg.bottleneck_filters);

    for (int l = levels - 1; l >= 0; --l) {
        const std::string prefix = "dec" + std::to_string(l + 1);
        x = m.add_simple(nn::LayerKind::Upsample2x2, prefix + "/up", x);
        if (with_skips) {
            x = m.add_simple(nn::LayerKind::ConcatSkip, prefix + "/skip", x,
                             skips[static_cast<size_t>(l)]);
            channels += skip_channels[static_cast<size_t>(l)];
        }
        x = conv_block(prefix, x, channels, cfg.encoder_filters[static_cast<size_t>(l)]);
    }

    m.add_conv("head", x, 1, channels, cfg.output_channels, rng);
    return m;
}

} // namespace detail

template <typename T = float>
nn::ModelT<T> build_unet(const UNetConfig& cfg, uint64_t seed) {
    return detail::build_encoder_decoder<T>(cfg, seed, /*with_skips=*/true);
}

template <typename T = float>
nn::ModelT<T> build_dae(const DAEConfig& cfg, uint64_t seed) {
    return detail::build_encoder_decoder<T>(cfg.base, seed, /*with_skips=*/false);
}

// Full frame pipeline with a pluggable spectrum-to-spectrum map:
// resample to 1500 Hz -> frame -> stft -> pack -> map -> unpack -> istft ->
// concatenate. Exposed so tests can push an identity map through the
// lossy-resize path.
Waveform denoise_pipeline(const Waveform& noisy_4khz,
                          const std::function<nn::Tensor(const nn::Tensor&)>& spectrum_map);

// Runs the model in inference mode over all frames of a 4 kHz recording and
// returns the denoised 1500 Hz waveform (same duration within one sample).
Waveform denoise_waveform(nn::Model& model, const Waveform& noisy_4khz);

} // namespace pcgdn
