#pragma once

#include <complex>
#include <vector>

#include "pcgdn/nn/tensor.hpp"
#include "pcgdn/waveform.hpp"

namespace pcgdn {

// Frozen time-frequency geometry: 1.5 s rectangular frames at 1500 Hz,
// Hann STFT with 64-sample segments, 50% overlap, 128 FFT points, one-sided
// spectrum scaled by the window sum. A 2250-sample frame maps to 65 x 72.
inline constexpr int kFrameSamples = 2250;
inline constexpr int kSegmentLen = 64;
inline constexpr int kHopLen = 32;
inline constexpr int kFftLen = 128;
inline constexpr int kSpecBins = 65;
inline constexpr int kSpecSteps = 72;
inline constexpr int kPackedHw = 64;

// One 1.5 s analysis frame. pad_len counts trailing zeros added when the
// source signal did not fill the frame.
struct Frame {
    std::vector<double> samples; // exactly kFrameSamples
    int pad_len = 0;
};

// Complex STFT of one frame, bins x time steps, row-major.
struct ComplexSpectrum {
    std::vector<std::complex<double>> v; // kSpecBins * kSpecSteps

    ComplexSpectrum() : v(static_cast<size_t>(kSpecBins) * kSpecSteps) {}

    std::complex<double>& at(int bin, int step) {
        return v[static_cast<size_t>(bin) * kSpecSteps + step];
    }
    const std::complex<double>& at(int bin, int step) const {
        return v[static_cast<size_t>(bin) * kSpecSteps + step];
    }
};

// 64 x 64 x 2 network tensor; channel 0 = real part, channel 1 = imaginary.
using PackedSpectrum = nn::Tensor;

// Splits a 1500 Hz waveform into consecutive non-overlapping frames;
// the final partial frame is zero padded with pad_len recorded.
std::vector<Frame> frame_signal(const Waveform& w);

ComplexSpectrum stft(const Frame& f);

// Exact inverse of stft (overlap-add with the same window and scaling);
// pad_len is carried through for reconstruct.
Frame istft(const ComplexSpectrum& s, int pad_len = 0);

// Bilinear corner-aligned resize 65x72 -> 64x64 of the real and imaginary
// parts, stacked along the channel axis.
PackedSpectrum pack(const ComplexSpectrum& s);

// Inverse resize 64x64 -> 65x72 and recombination to a complex matrix.
ComplexSpectrum unpack(const PackedSpectrum& t);

// Concatenates frames and strips the final frame's padding.
// Only the final frame may carry pad_len > 0.
Waveform reconstruct(const std::vector<Frame>& frames);

} // namespace pcgdn
