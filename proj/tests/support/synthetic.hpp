#pragma once

// Synthetic corpora for tests: heart-sound-like clean recordings at 4 kHz
// and category-flavoured noise recordings at 44.1 kHz.

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "pcgdn/noise.hpp"
#include "pcgdn/rng.hpp"
#include "pcgdn/wav_io.hpp"
#include "pcgdn/waveform.hpp"

namespace pcgdn::testsupport {

// Periodic S1/S2 bursts (damped low-frequency oscillations) with mild
// cycle-to-cycle jitter; peak-normalized.
inline Waveform make_heart_sound(uint64_t seed, double duration_s, int rate = kMixRateHz) {
    Rng rng(seed);
    const double beat_period = rng.uniform(0.72, 0.92);
    const double f_s1 = rng.uniform(45.0, 60.0);
    const double f_s2 = rng.uniform(65.0, 85.0);

    const auto n = static_cast<size_t>(duration_s * rate);
    std::vector<double> x(n, 0.0);

    auto add_burst = [&](double t0, double freq, double amp, double tau) {
        const auto begin = static_cast<int64_t>(t0 * rate);
        const auto len = static_cast<int64_t>(0.12 * rate);
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        for (int64_t i = 0; i < len; ++i) {
            const int64_t k = begin + i;
            if (k < 0 || k >= static_cast<int64_t>(n)) continue;
            const double t = static_cast<double>(i) / rate;
            x[static_cast<size_t>(k)] +=
                amp * std::exp(-t / tau) * std::sin(2.0 * M_PI * freq * t + phase);
        }
    };

    for (double t = 0.05; t < duration_s; t += beat_period) {
        const double jitter = rng.uniform(-0.01, 0.01);
        add_burst(t + jitter, f_s1, 1.0, 0.03);
        add_burst(t + 0.33 * beat_period + jitter, f_s2, 0.75, 0.022);
    }
    normalize_in_place(x);
    return Waveform(std::move(x), rate);
}

// Category-flavoured wide-band interference. Realism is not the point;
// the categories just need distinct, heart-sound-unlike spectra.
inline Waveform make_noise_sound(uint64_t seed, NoiseCategory cat, double duration_s,
                                 int rate = kNoiseCorpusRateHz) {
    Rng rng(seed);
    const auto n = static_cast<size_t>(duration_s * rate);
    std::vector<double> x(n, 0.0);

    switch (cat) {
        case NoiseCategory::Hiss: {
            // broadband noise with a slow envelope
            double lp = 0.0;
            for (size_t i = 0; i < n; ++i) {
                const double w = rng.uniform(-1.0, 1.0);
                lp = 0.2 * lp + 0.8 * w;
                const double env = 0.6 + 0.4 * std::sin(2.0 * M_PI * 0.3 * i / rate);
                x[i] = env * lp;
            }
            break;
        }
        case NoiseCategory::ChildSpeech: {
            // amplitude-modulated harmonic stack around 300-900 Hz
            const double f0 = rng.uniform(280.0, 360.0);
            for (size_t i = 0; i < n; ++i) {
                const double t = static_cast<double>(i) / rate;
                const double am = 0.5 + 0.5 * std::sin(2.0 * M_PI * rng.uniform(2.5, 3.5) * t);
                x[i] = am * (std::sin(2.0 * M_PI * f0 * t) + 0.5 * std::sin(2.0 * M_PI * 2 * f0 * t) +
                             0.3 * std::sin(2.0 * M_PI * 3 * f0 * t));
            }
            break;
        }
        case NoiseCategory::CrumplingCrinkling: {
            // sparse crackles: short bipolar impulses
            const auto crackles = static_cast<int>(duration_s * 80);
            for (int c = 0; c < crackles; ++c) {
                const size_t pos = rng.uniform_index(n);
                const double a = rng.uniform(-1.0, 1.0);
                for (int j = 0; j < 20 && pos + static_cast<size_t>(j) < n; ++j)
                    x[pos + static_cast<size_t>(j)] += a * std::exp(-j / 4.0) * (j % 2 ? -1 : 1);
            }
            break;
        }
        case NoiseCategory::Cough:
        case NoiseCategory::Sneeze: {
            // a few loud noise bursts
            const int bursts = 1 + static_cast<int>(rng.uniform_index(3));
            for (int b = 0; b < bursts; ++b) {
                const size_t pos = rng.uniform_index(n);
                const auto len = static_cast<size_t>(rng.uniform(0.2, 0.5) * rate);
                for (size_t j = 0; j < len && pos + j < n; ++j) {
                    const double env = std::exp(-static_cast<double>(j) / (0.15 * rate));
                    x[pos + j] += env * rng.uniform(-1.0, 1.0);
                }
            }
            break;
        }
    }
    normalize_in_place(x);
    return Waveform(std::move(x), rate);
}

struct CorpusPaths {
    std::string clean_dir;
    std::string noise_dir;
};

// Writes a clean + noise corpus under root and returns the directory paths.
inline CorpusPaths write_test_corpus(const std::string& root, int clean_count,
                                     int noise_per_category, uint64_t seed,
                                     double clean_min_s = 4.5, double clean_max_s = 7.5,
                                     double noise_s = 6.0) {
    namespace fs = std::filesystem;
    CorpusPaths paths;
    paths.clean_dir = (fs::path(root) / "clean").string();
    paths.noise_dir = (fs::path(root) / "noise").string();
    fs::create_directories(paths.clean_dir);

    Rng rng(derive_seed(seed, "corpus"));
    for (int i = 0; i < clean_count; ++i) {
        const double dur = rng.uniform(clean_min_s, clean_max_s);
        const Waveform w = make_heart_sound(derive_seed(seed, "clean", static_cast<uint64_t>(i)), dur);
        char name[32];
        std::snprintf(name, sizeof(name), "subject%03d.wav", i);
        write_wav(w, (fs::path(paths.clean_dir) / name).string());
    }
    for (const auto cat : all_noise_categories()) {
        const fs::path dir = fs::path(paths.noise_dir) / category_token(cat);
        fs::create_directories(dir);
        for (int i = 0; i < noise_per_category; ++i) {
            const Waveform w = make_noise_sound(
                derive_seed(seed, category_token(cat), static_cast<uint64_t>(i)), cat, noise_s);
            char name[32];
            std::snprintf(name, sizeof(name), "%s%02d.wav", category_token(cat).c_str(), i);
            write_wav(w, (dir / name).string());
        }
    }
    return paths;
}

// Unique scratch directory under the system temp dir, wiped on creation.
inline std::string scratch_dir(const std::string& tag) {
    namespace fs = std::filesystem;
    const fs::path p = fs::temp_directory_path() / ("pcgdn_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p.string();
}

} // namespace pcgdn::testsupport
