#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "pcgdn/noise.hpp"
#include "pcgdn/waveform.hpp"

namespace pcgdn {

inline constexpr const char* kToolVersion = "0.1.0";

// One placed noise segment, recorded with enough provenance to replay the
// mix bit-for-bit: which file, which slice, where it landed.
struct MixPlacement {
    NoiseCategory category;
    std::string noise_path;
    int64_t noise_offset = 0; // slice start in the source recording
    int64_t length = 0;       // slice length in samples
    int64_t offset = 0;       // placement start in the noise vector
};

struct MixRecipe {
    std::string clean_id;
    int variant_index = 0;
    uint64_t rng_seed = 0;
    std::vector<NoiseCategory> categories;
    std::vector<MixPlacement> placements;
};

struct ManifestEntry {
    std::string noisy_path; // relative to the manifest directory
    std::string clean_path;
    std::string subject_id;
    std::string partition; // train | val | test (empty before split)
    MixRecipe recipe;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::array<double, 3> ratios{0.64, 0.16, 0.20};
    uint64_t master_seed = 0;
    std::string tool_version = kToolVersion;
};

struct CleanRecording {
    std::string id;
    std::string path;
    Waveform wave; // at 4 kHz, peak-normalized
};

struct NoiseRecording {
    std::string path;
    Waveform wave; // at 4 kHz
};

using NoiseCorpus = std::map<NoiseCategory, std::vector<NoiseRecording>>;

// Loads every WAV under `dir` as a clean recording: resampled to 4 kHz if
// needed and peak-normalized. The recording id is the file stem.
std::vector<CleanRecording> load_clean_dir(const std::string& dir);

// Loads the noise corpus, resampling to 4 kHz. Layout is either one
// subdirectory per category token, or a labels.csv ("file,label") next to
// the files. Unknown labels are rejected.
NoiseCorpus load_noise_dir(const std::string& dir);

struct SynthesisOptions {
    int variants_per_clean = 20;
    uint64_t master_seed = 0;
    double density_scale = 1.0; // scales the Poisson segment-count rate
};

// Emits `variants_per_clean` noisy recordings per clean recording into
// out_dir and returns the manifest (partitions unassigned). Fully
// deterministic under master_seed: every variant derives its own seed from
// (master_seed, clean_id, variant_index).
DatasetManifest synthesize_dataset(const std::vector<CleanRecording>& clean,
                                   const NoiseCorpus& noise, const std::string& out_dir,
                                   const SynthesisOptions& opts);

// Builds one noisy waveform from a recipe (the replay path used by the
// determinism checks and the denoise/eval loaders).
Waveform replay_recipe(const MixRecipe& recipe, const Waveform& clean, const NoiseCorpus& noise);

// Subject-level split: subjects shuffled, then assigned by largest-remainder
// rounding of the ratios; every partition non-empty. All variants of a
// subject share its partition.
DatasetManifest split_dataset(const DatasetManifest& manifest, std::array<double, 3> ratios,
                              Rng& rng);

struct CategoryStats {
    int64_t count = 0;
    double mean_s = 0.0;
    double std_s = 0.0;
    double mode_s = 0.0; // left edge of the fullest 0.01 s bin
};

// Duration statistics over all placed segments recorded in the manifest.
std::map<NoiseCategory, CategoryStats> segment_stats(const DatasetManifest& manifest);

void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

// Entries of one partition ("train", "val", "test").
std::vector<ManifestEntry> partition_entries(const DatasetManifest& m, const std::string& part);

} // namespace pcgdn
