#include <doctest.h>

#include <cmath>

#include "pcgdn/errors.hpp"
#include "pcgdn/rng.hpp"
#include "pcgdn/wavelet.hpp"

using namespace pcgdn;

namespace {

std::vector<double> random_signal(size_t n, uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    return x;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double energy(const std::vector<double>& x) {
    double e = 0.0;
    for (const double v : x) e += v * v;
    return e;
}

} // namespace

TEST_CASE("dwt/idwt: perfect reconstruction for all filters and boundaries") {
    for (const auto kind : {WaveletKind::Db4, WaveletKind::Db8, WaveletKind::Sym8}) {
        for (const auto boundary : {WaveletBoundary::Symmetric, WaveletBoundary::Periodic}) {
            for (const size_t n : {size_t{512}, size_t{1000}, size_t{1003}}) {
                if (boundary == WaveletBoundary::Periodic && n % 2 != 0) continue;
                WaveletConfig cfg;
                cfg.wavelet = kind;
                cfg.levels = 3;
                const auto x = random_signal(n, 7 + n);
                const auto pyr = dwt(x, cfg, boundary);
                const auto back = idwt(pyr);
                REQUIRE(back.size() == n);
                CHECK(max_abs_diff(x, back) < 1e-8);
            }
        }
    }
}

TEST_CASE("dwt: constant input annihilates the detail bands") {
    WaveletConfig cfg;
    cfg.levels = 4;
    const std::vector<double> x(1024, 0.7);
    const auto pyr = dwt(x, cfg);
    for (const auto& detail : pyr.details)
        for (const double c : detail) CHECK(std::abs(c) < 1e-10);
}

TEST_CASE("dwt: periodized transform preserves energy (orthogonality)") {
    for (const auto kind : {WaveletKind::Db4, WaveletKind::Db8, WaveletKind::Sym8}) {
        WaveletConfig cfg;
        cfg.wavelet = kind;
        cfg.levels = 5;
        const auto x = random_signal(4096, 11);
        const auto pyr = dwt(x, cfg, WaveletBoundary::Periodic);
        double coeff_energy = energy(pyr.approx);
        for (const auto& d : pyr.details) coeff_energy += energy(d);
        CHECK(coeff_energy == doctest::Approx(energy(x)).epsilon(1e-6));
    }
}

TEST_CASE("dwt: level and length validation") {
    WaveletConfig cfg;
    cfg.levels = 5;
    CHECK_THROWS_AS(dwt(random_signal(6, 1), cfg), DomainError); // shorter than the filter
    WaveletConfig deep;
    deep.levels = 12;
    CHECK_THROWS_AS(dwt(random_signal(256, 2), deep), DomainError); // 12 > log2(256/8)
    WaveletConfig zero;
    zero.levels = 0;
    CHECK_THROWS_AS(dwt(random_signal(256, 3), zero), DomainError);
}

TEST_CASE("wt_denoise: degenerate inputs") {
    SUBCASE("zero signal stays zero") {
        Waveform w;
        w.sample_rate_hz = kModelRateHz;
        w.samples.assign(3000, 0.0);
        const auto out = wt_denoise(w);
        REQUIRE(out.samples.size() == w.samples.size());
        for (const double v : out.samples) CHECK(std::abs(v) < 1e-12);
    }
    SUBCASE("fixed threshold 0 is a no-op up to reconstruction error") {
        Waveform w;
        w.sample_rate_hz = kModelRateHz;
        w.samples = random_signal(3000, 21);
        WaveletConfig cfg;
        cfg.rule = ThresholdRule::Fixed;
        cfg.fixed_threshold = 0.0;
        const auto out = wt_denoise(w, cfg);
        CHECK(max_abs_diff(out.samples, w.samples) < 1e-8);
    }
    SUBCASE("empty input rejected") {
        Waveform w;
        w.sample_rate_hz = kModelRateHz;
        CHECK_THROWS_AS(wt_denoise(w), DomainError);
    }
}

TEST_CASE("wt_denoise: improves SNR on a noisy sinusoid") {
    // The tone sits in the approximation band of the default 5-level
    // transform (< 23 Hz at 1500 Hz); the detail bands carry only noise, so
    // shrinkage removes noise and keeps the tone.
    const size_t n = 6000;
    Rng rng(31);
    std::vector<double> clean(n), noisy(n);
    for (size_t i = 0; i < n; ++i)
        clean[i] = std::sin(2.0 * M_PI * 15.0 * static_cast<double>(i) / kModelRateHz);
    // white noise at 10 dB SNR: noise power = signal power / 10
    const double sigma = std::sqrt(0.5 / 10.0);
    for (size_t i = 0; i < n; ++i) noisy[i] = clean[i] + rng.normal(0.0, sigma);

    Waveform w;
    w.sample_rate_hz = kModelRateHz;
    w.samples = noisy;
    const auto out = wt_denoise(w);

    auto snr = [&](const std::vector<double>& est) {
        double sig = 0.0, err = 0.0;
        for (size_t i = 0; i < n; ++i) {
            sig += clean[i] * clean[i];
            const double d = est[i] - clean[i];
            err += d * d;
        }
        return 10.0 * std::log10(sig / err);
    };
    CHECK(snr(out.samples) > snr(noisy));
}

TEST_CASE("wt_denoise: scale covariance under the universal rule") {
    Waveform w;
    w.sample_rate_hz = kModelRateHz;
    w.samples = random_signal(4000, 41);
    const auto base = wt_denoise(w);

    const double c = 7.3;
    Waveform scaled = w;
    for (auto& v : scaled.samples) v *= c;
    const auto out = wt_denoise(scaled);

    double max_rel = 0.0;
    for (size_t i = 0; i < w.samples.size(); ++i) {
        const double want = c * base.samples[i];
        max_rel =
            std::max(max_rel, std::abs(out.samples[i] - want) / std::max(1.0, std::abs(want)));
    }
    CHECK(max_rel < 1e-6);
}

TEST_CASE("wt_denoise: detail energy never grows (shrinkage is a contraction)") {
    WaveletConfig cfg; // universal soft, db4, 5 levels
    Waveform w;
    w.sample_rate_hz = kModelRateHz;
    w.samples = random_signal(4096, 51);

    const auto before = dwt(w.samples, cfg, WaveletBoundary::Periodic);
    const auto out = wt_denoise(w, cfg);
    const auto after = dwt(out.samples, cfg, WaveletBoundary::Periodic);
    REQUIRE(before.details.size() == after.details.size());
    for (size_t l = 0; l < before.details.size(); ++l)
        CHECK(energy(after.details[l]) <= energy(before.details[l]) + 1e-9);
}
