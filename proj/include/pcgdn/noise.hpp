#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcgdn/rng.hpp"
#include "pcgdn/waveform.hpp"

namespace pcgdn {

// The five ARCA23K labels considered relevant for heart-sound corruption.
enum class NoiseCategory {
    ChildSpeech,
    Hiss,
    CrumplingCrinkling,
    Cough,
    Sneeze,
};

inline constexpr int kNumNoiseCategories = 5;

const std::vector<NoiseCategory>& all_noise_categories();

// Canonical short token used in manifests, file layouts and reports.
std::string category_token(NoiseCategory c);

// Parses a label: accepts the canonical token and the long-form corpus
// spellings ("Child speech and kid speaking", ...). Unknown labels return
// nullopt; ingestion rejects them.
std::optional<NoiseCategory> parse_category(const std::string& label);

// Segment duration model, a per-category log-normal moment-matched to the
// corpus statistics (mean, std in seconds), clipped to [0.05 s, 4 s].
struct SegmentLengthModel {
    double mean_s;
    double std_s;
    double mu;    // log-normal parameters
    double sigma;
};

const SegmentLengthModel& segment_length_model(NoiseCategory c);

inline constexpr double kMinSegmentS = 0.05;
inline constexpr double kMaxSegmentS = 4.0;

// A contiguous slice of a noise recording at the 4 kHz mixing rate.
struct NoiseSegment {
    NoiseCategory category;
    std::vector<double> samples; // at kMixRateHz
    int64_t source_offset = 0;   // sample offset into the source recording

    double duration_s() const { return static_cast<double>(samples.size()) / kMixRateHz; }
};

// Draws `count` segments from one noise recording. Lengths come from the
// category's clipped log-normal; offsets are uniform. `max_duration_s`
// additionally caps lengths (used so segments never outgrow the clean
// recording they will be placed on). Throws if the recording is shorter
// than the minimum segment.
std::vector<NoiseSegment> extract_segments(const Waveform& noise, NoiseCategory category,
                                           int count, Rng& rng,
                                           double max_duration_s = kMaxSegmentS);

// Places segments at uniformly random offsets on a zero vector of `length`
// samples (overlaps sum), then peak-normalizes. No segments -> zeros.
std::vector<double> build_noise_vector(const std::vector<NoiseSegment>& segments, int64_t length,
                                       Rng& rng,
                                       std::vector<int64_t>* placement_offsets = nullptr);

// Sample-wise sum of the clean signal and the category noise vectors,
// peak-normalized. All vectors must match the clean length.
Waveform mix(const Waveform& clean, const std::vector<std::vector<double>>& noise_vectors);

} // namespace pcgdn
