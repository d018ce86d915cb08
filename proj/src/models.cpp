#include "pcgdn/models.hpp"

#include "pcgdn/errors.hpp"
#include "pcgdn/resample.hpp"

namespace pcgdn {

Waveform denoise_pipeline(const Waveform& noisy_4khz,
                          const std::function<nn::Tensor(const nn::Tensor&)>& spectrum_map) {
    if (noisy_4khz.sample_rate_hz != kMixRateHz)
        throw DomainError("denoise: expected 4000 Hz input, got " +
                          std::to_string(noisy_4khz.sample_rate_hz));
    if (noisy_4khz.empty()) throw DomainError("denoise: empty input");

    const Waveform down = resample(noisy_4khz, kModelRateHz);
    if (static_cast<int>(down.samples.size()) < kHopLen)
        throw DomainError("denoise: input shorter than one hop after resampling");

    const auto frames = frame_signal(down);
    std::vector<Frame> out_frames;
    out_frames.reserve(frames.size());
    for (const Frame& f : frames) {
        const nn::Tensor mapped = spectrum_map(pack(stft(f)));
        out_frames.push_back(istft(unpack(mapped), f.pad_len));
    }
    return reconstruct(out_frames);
}

Waveform denoise_waveform(nn::Model& model, const Waveform& noisy_4khz) {
    if (noisy_4khz.sample_rate_hz != kMixRateHz)
        throw DomainError("denoise: expected 4000 Hz input, got " +
                          std::to_string(noisy_4khz.sample_rate_hz));
    if (noisy_4khz.empty()) throw DomainError("denoise: empty input");

    const Waveform down = resample(noisy_4khz, kModelRateHz);
    if (static_cast<int>(down.samples.size()) < kHopLen)
        throw DomainError("denoise: input shorter than one hop after resampling");

    // All frames of the recording go through as one inference batch.
    const auto frames = frame_signal(down);
    const int n = static_cast<int>(frames.size());
    nn::Tensor batch({n, kPackedHw, kPackedHw, 2});
    const int64_t stride = static_cast<int64_t>(kPackedHw) * kPackedHw * 2;
    for (int i = 0; i < n; ++i) {
        const nn::Tensor packed = pack(stft(frames[static_cast<size_t>(i)]));
        std::copy(packed.data.begin(), packed.data.end(), batch.data.begin() + i * stride);
    }

    const nn::Tensor& pred = model.forward(batch, /*training=*/false);
    if (pred.shape != batch.shape)
        throw DomainError("denoise: model output shape " + nn::shape_str(pred.shape) +
                          " does not match input " + nn::shape_str(batch.shape));

    std::vector<Frame> out_frames;
    out_frames.reserve(frames.size());
    for (int i = 0; i < n; ++i) {
        nn::Tensor one({kPackedHw, kPackedHw, 2});
        std::copy(pred.data.begin() + i * stride, pred.data.begin() + (i + 1) * stride,
                  one.data.begin());
        out_frames.push_back(istft(unpack(one), frames[static_cast<size_t>(i)].pad_len));
    }
    Waveform out = reconstruct(out_frames);
    model.clear_caches();
    return out;
}

} // namespace pcgdn
