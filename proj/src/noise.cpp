#include "pcgdn/noise.hpp"

#include <algorithm>
#include <cmath>

#include "pcgdn/errors.hpp"

namespace pcgdn {

const std::vector<NoiseCategory>& all_noise_categories() {
    static const std::vector<NoiseCategory> cats{
        NoiseCategory::ChildSpeech, NoiseCategory::Hiss, NoiseCategory::CrumplingCrinkling,
        NoiseCategory::Cough, NoiseCategory::Sneeze};
    return cats;
}

std::string category_token(NoiseCategory c) {
    switch (c) {
        case NoiseCategory::ChildSpeech: return "child_speech";
        case NoiseCategory::Hiss: return "hiss";
        case NoiseCategory::CrumplingCrinkling: return "crumpling_crinkling";
        case NoiseCategory::Cough: return "cough";
        case NoiseCategory::Sneeze: return "sneeze";
    }
    return "?";
}

std::optional<NoiseCategory> parse_category(const std::string& label) {
    std::string s;
    s.reserve(label.size());
    for (const char c : label) {
        if (c >= 'A' && c <= 'Z')
            s.push_back(static_cast<char>(c - 'A' + 'a'));
        else if (c == ' ' || c == '-')
            s.push_back('_');
        else
            s.push_back(c);
    }
    if (s == "child_speech" || s == "child_speech_and_kid_speaking") return NoiseCategory::ChildSpeech;
    if (s == "hiss") return NoiseCategory::Hiss;
    if (s == "crumpling_crinkling" || s == "crumpling_and_crinkling")
        return NoiseCategory::CrumplingCrinkling;
    if (s == "cough") return NoiseCategory::Cough;
    if (s == "sneeze") return NoiseCategory::Sneeze;
    return std::nullopt;
}

namespace {

SegmentLengthModel make_model(double mean, double std) {
    SegmentLengthModel m;
    m.mean_s = mean;
    m.std_s = std;
    const double r = std / mean;
    m.sigma = std::sqrt(std::log1p(r * r));
    m.mu = std::log(mean) - 0.5 * m.sigma * m.sigma;
    return m;
}

} // namespace

const SegmentLengthModel& segment_length_model(NoiseCategory c) {
    // Corpus segment statistics (mean, std) per category, seconds.
    static const SegmentLengthModel child = make_model(0.76, 0.76);
    static const SegmentLengthModel hiss = make_model(0.64, 0.68);
    static const SegmentLengthModel crump = make_model(0.62, 0.66);
    static const SegmentLengthModel cough = make_model(0.84, 0.73);
    static const SegmentLengthModel sneeze = make_model(0.84, 0.73);
    switch (c) {
        case NoiseCategory::ChildSpeech: return child;
        case NoiseCategory::Hiss: return hiss;
        case NoiseCategory::CrumplingCrinkling: return crump;
        case NoiseCategory::Cough: return cough;
        case NoiseCategory::Sneeze: return sneeze;
    }
    return hiss;
}

std::vector<NoiseSegment> extract_segments(const Waveform& noise, NoiseCategory category,
                                           int count, Rng& rng, double max_duration_s) {
    if (noise.sample_rate_hz != kMixRateHz)
        throw DomainError("extract_segments: noise must be at 4000 Hz");
    if (count < 1) throw DomainError("extract_segments: count must be >= 1");
    const int64_t n = static_cast<int64_t>(noise.samples.size());
    const double noise_dur = noise.duration_s();
    if (noise_dur < kMinSegmentS)
        throw DomainError("extract_segments: noise recording shorter than " +
                          std::to_string(kMinSegmentS) + " s");

    const SegmentLengthModel& model = segment_length_model(category);
    const double hi = std::min({kMaxSegmentS, noise_dur, max_duration_s});

    std::vector<NoiseSegment> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        double dur = rng.log_normal(model.mu, model.sigma);
        dur = std::clamp(dur, kMinSegmentS, hi);
        int64_t len = std::clamp<int64_t>(std::llround(dur * kMixRateHz), 1, n);
        const int64_t offset = static_cast<int64_t>(rng.uniform_index(static_cast<uint64_t>(n - len + 1)));
        NoiseSegment seg;
        seg.category = category;
        seg.source_offset = offset;
        seg.samples.assign(noise.samples.begin() + offset, noise.samples.begin() + offset + len);
        out.push_back(std::move(seg));
    }
    return out;
}

std::vector<double> build_noise_vector(const std::vector<NoiseSegment>& segments, int64_t length,
                                       Rng& rng, std::vector<int64_t>* placement_offsets) {
    if (length <= 0) throw DomainError("build_noise_vector: length must be positive");
    std::vector<double> v(static_cast<size_t>(length), 0.0);
    if (placement_offsets) placement_offsets->clear();
    for (const NoiseSegment& seg : segments) {
        const int64_t len = static_cast<int64_t>(seg.samples.size());
        if (len > length)
            throw DomainError("build_noise_vector: segment longer than the target vector");
        const int64_t offset =
            static_cast<int64_t>(rng.uniform_index(static_cast<uint64_t>(length - len + 1)));
        for (int64_t i = 0; i < len; ++i)
            v[static_cast<size_t>(offset + i)] += seg.samples[static_cast<size_t>(i)];
        if (placement_offsets) placement_offsets->push_back(offset);
    }
    normalize_in_place(v);
    return v;
}

Waveform mix(const Waveform& clean, const std::vector<std::vector<double>>& noise_vectors) {
    if (clean.sample_rate_hz != kMixRateHz) throw DomainError("mix: clean must be at 4000 Hz");
    if (clean.empty()) throw DomainError("mix: empty clean signal");
    Waveform out;
    out.sample_rate_hz = kMixRateHz;
    out.samples = clean.samples;
    for (const auto& nv : noise_vectors) {
        if (nv.size() != clean.samples.size())
            throw DomainError("mix: noise vector length does not match the clean signal");
        for (size_t i = 0; i < nv.size(); ++i) out.samples[i] += nv[i];
    }
    normalize_in_place(out.samples);
    return out;
}

} // namespace pcgdn
