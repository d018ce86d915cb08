#pragma once

#include <vector>

#include "pcgdn/waveform.hpp"

namespace pcgdn {

enum class WaveletKind { Db4, Db8, Sym8 };
enum class ThresholdRule { Universal, Fixed };
enum class ThresholdMode { Soft, Hard };

// Boundary handling for the filter bank. Symmetric extension is the
// denoiser default; periodized circular convolution makes the transform
// orthogonal (exact energy preservation) and is used by the property tests.
enum class WaveletBoundary { Symmetric, Periodic };

struct WaveletConfig {
    WaveletKind wavelet = WaveletKind::Db4;
    int levels = 5;
    ThresholdRule rule = ThresholdRule::Universal;
    ThresholdMode mode = ThresholdMode::Soft;
    double fixed_threshold = 0.0; // used by ThresholdRule::Fixed
};

// Orthonormal scaling filter (sums to sqrt 2).
const std::vector<double>& wavelet_filter(WaveletKind kind);

struct WaveletPyramid {
    std::vector<double> approx;               // coarsest approximation
    std::vector<std::vector<double>> details; // details, coarsest first
    std::vector<int> level_lengths;           // signal length entering each level
    WaveletKind kind = WaveletKind::Db4;
    WaveletBoundary boundary = WaveletBoundary::Symmetric;
};

// Multilevel analysis/synthesis. Perfect reconstruction:
// idwt(dwt(x)) == x within 1e-8. Throws DomainError if the signal is
// shorter than the filter or levels exceeds log2(len / filter length).
WaveletPyramid dwt(const std::vector<double>& x, const WaveletConfig& cfg,
                   WaveletBoundary boundary = WaveletBoundary::Symmetric);
std::vector<double> idwt(const WaveletPyramid& pyr);

// Wavelet-thresholding denoiser: per-level soft/hard shrinkage of the detail
// coefficients under the universal threshold sigma * sqrt(2 ln N), sigma
// estimated per level as median(|detail|) / 0.6745. Output length equals
// input length.
Waveform wt_denoise(const Waveform& w, const WaveletConfig& cfg = {});

} // namespace pcgdn
