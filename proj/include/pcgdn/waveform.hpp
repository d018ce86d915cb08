#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace pcgdn {

// Corpus and pipeline sample rates.
inline constexpr int kNoiseCorpusRateHz = 44100;
inline constexpr int kMixRateHz = 4000;
inline constexpr int kModelRateHz = 1500;

// Mono time-domain signal; samples are dimensionless, nominally in [-1, 1].
struct Waveform {
    std::vector<double> samples;
    int sample_rate_hz = 0;

    Waveform() = default;
    Waveform(std::vector<double> s, int rate) : samples(std::move(s)), sample_rate_hz(rate) {}

    bool empty() const { return samples.empty(); }
    size_t size() const { return samples.size(); }
    double duration_s() const {
        return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
    }
};

// Peak scaling to [-1, 1]: x / max|x|. All-zero input stays all-zero.
// Idempotent, and invariant under positive rescaling of the input.
inline void normalize_in_place(std::vector<double>& x) {
    double peak = 0.0;
    for (const double v : x) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return;
    // True division so the peak sample lands on exactly +-1 and a second
    // normalize is a no-op.
    for (double& v : x) v /= peak;
}

inline std::vector<double> normalize(std::vector<double> x) {
    normalize_in_place(x);
    return x;
}

inline Waveform normalize(Waveform w) {
    normalize_in_place(w.samples);
    return w;
}

} // namespace pcgdn
