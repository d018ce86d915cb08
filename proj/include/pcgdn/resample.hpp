#pragma once

#include <vector>

#include "pcgdn/waveform.hpp"

namespace pcgdn {

// Rational sample-rate conversion with a Kaiser-windowed-sinc polyphase
// filter (>= 60 dB stopband at the smaller Nyquist, passband flat through
// 0.95 * Nyquist). Output length is round(len * target / source). Kernel
// sums are renormalized near the edges so constants map to constants and
// boundary roll-off stays small. target == source returns the input
// unchanged; target == 0 throws DomainError.
std::vector<double> resample(const std::vector<double>& x, int source_hz, int target_hz);

Waveform resample(const Waveform& w, int target_hz);

} // namespace pcgdn
