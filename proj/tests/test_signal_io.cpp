#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "pcgdn/errors.hpp"
#include "pcgdn/resample.hpp"
#include "pcgdn/rng.hpp"
#include "pcgdn/wav_io.hpp"
#include "pcgdn/waveform.hpp"
#include "support/synthetic.hpp"

using namespace pcgdn;
namespace fs = std::filesystem;

namespace {

// Hand-built WAV writer covering formats the library reader must accept
// (stereo, 8/24-bit, float32) and reject (non-PCM codecs).
void write_raw_wav(const std::string& path, uint16_t format, uint16_t channels, uint32_t rate,
                   uint16_t bits, const std::vector<uint8_t>& payload) {
    std::vector<uint8_t> out;
    auto u16 = [&](uint16_t v) {
        out.push_back(v & 0xFF);
        out.push_back(v >> 8);
    };
    auto u32 = [&](uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
    };
    const char* riff = "RIFF";
    out.insert(out.end(), riff, riff + 4);
    u32(static_cast<uint32_t>(36 + payload.size()));
    const char* wavefmt = "WAVEfmt ";
    out.insert(out.end(), wavefmt, wavefmt + 8);
    u32(16);
    u16(format);
    u16(channels);
    u32(rate);
    u32(rate * channels * bits / 8);
    u16(static_cast<uint16_t>(channels * bits / 8));
    u16(bits);
    const char* data = "data";
    out.insert(out.end(), data, data + 4);
    u32(static_cast<uint32_t>(payload.size()));
    out.insert(out.end(), payload.begin(), payload.end());
    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

// Direct DFT magnitude (independent of any FFT in the library).
double dft_amplitude(const std::vector<double>& x, int bin) {
    double re = 0.0, im = 0.0;
    const double w = 2.0 * M_PI * bin / static_cast<double>(x.size());
    for (size_t n = 0; n < x.size(); ++n) {
        re += x[n] * std::cos(w * static_cast<double>(n));
        im -= x[n] * std::sin(w * static_cast<double>(n));
    }
    return 2.0 * std::hypot(re, im) / static_cast<double>(x.size());
}

double rms(const std::vector<double>& x) {
    double acc = 0.0;
    for (const double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

} // namespace

TEST_CASE("normalize: peak scaling") {
    CHECK(normalize(std::vector<double>{0.5, -0.25}) == std::vector<double>{1.0, -0.5});
    CHECK(normalize(std::vector<double>{0.0, 0.0, 0.0}) == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(normalize(std::vector<double>{-2.0, 1.0}) == std::vector<double>{-1.0, 0.5});
}

TEST_CASE("normalize: idempotent and scale invariant") {
    Rng rng(7);
    std::vector<double> x(301);
    for (auto& v : x) v = rng.uniform(-3.0, 3.0);
    const auto once = normalize(x);
    CHECK(normalize(once) == once); // exact

    auto scaled = x;
    for (auto& v : scaled) v *= 37.5;
    const auto from_scaled = normalize(scaled);
    for (size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(from_scaled[i] - once[i]) < 1e-12);
}

TEST_CASE("read_wav: 16-bit full-scale arithmetic") {
    const auto dir = testsupport::scratch_dir("wav_read16");
    std::vector<uint8_t> payload;
    for (const int16_t v : {int16_t{0}, int16_t{16384}, int16_t{-32768}}) {
        payload.push_back(static_cast<uint8_t>(v & 0xFF));
        payload.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
    }
    const auto path = dir + "/a.wav";
    write_raw_wav(path, 1, 1, 4000, 16, payload);
    const Waveform w = read_wav(path);
    CHECK(w.sample_rate_hz == 4000);
    REQUIRE(w.samples.size() == 3);
    CHECK(w.samples[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(w.samples[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w.samples[2] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("read_wav: stereo averaged to mono") {
    const auto dir = testsupport::scratch_dir("wav_stereo");
    // one frame: L = 1.0 (32767 ~ 0.99997), use 8-bit for exact halves instead
    // 8-bit: 255 -> (255-128)/128 = 0.9921875, 128 -> 0.0
    const auto path = dir + "/s.wav";
    write_raw_wav(path, 1, 2, 8000, 8, {255, 128});
    const Waveform w = read_wav(path);
    REQUIRE(w.samples.size() == 1);
    CHECK(w.samples[0] == doctest::Approx((0.9921875 + 0.0) / 2).epsilon(1e-12));
}

TEST_CASE("read_wav: 24-bit and float32") {
    const auto dir = testsupport::scratch_dir("wav_fmts");
    {
        // 24-bit: value 0x400000 = 4194304 -> 0.5
        const auto path = dir + "/b24.wav";
        write_raw_wav(path, 1, 1, 4000, 24, {0x00, 0x00, 0x40});
        const Waveform w = read_wav(path);
        REQUIRE(w.samples.size() == 1);
        CHECK(w.samples[0] == doctest::Approx(0.5).epsilon(1e-12));
    }
    {
        const auto path = dir + "/f32.wav";
        const float v = -0.25f;
        std::vector<uint8_t> payload(4);
        std::memcpy(payload.data(), &v, 4);
        write_raw_wav(path, 3, 1, 44100, 32, payload);
        const Waveform w = read_wav(path);
        REQUIRE(w.samples.size() == 1);
        CHECK(w.samples[0] == doctest::Approx(-0.25).epsilon(1e-12));
    }
}

TEST_CASE("read_wav: error taxonomy") {
    const auto dir = testsupport::scratch_dir("wav_err");
    CHECK_THROWS_AS(read_wav(dir + "/missing.wav"), IoError);

    const auto garbage = dir + "/garbage.wav";
    std::ofstream(garbage) << "this is not a wav";
    CHECK_THROWS_AS(read_wav(garbage), FormatError);

    const auto adpcm = dir + "/adpcm.wav";
    write_raw_wav(adpcm, 2, 1, 8000, 16, {0, 0});
    CHECK_THROWS_AS(read_wav(adpcm), UnsupportedError);

    // data chunk claims more bytes than exist
    const auto trunc = dir + "/trunc.wav";
    write_raw_wav(trunc, 1, 1, 8000, 16, {0, 0, 0, 0});
    auto bytes = [&] {
        std::ifstream f(trunc, std::ios::binary);
        return std::vector<char>((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
    }();
    bytes.resize(bytes.size() - 2);
    std::ofstream(trunc, std::ios::binary | std::ios::trunc)
        .write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    CHECK_THROWS_AS(read_wav(trunc), FormatError);
}

TEST_CASE("write_wav: round trips") {
    const auto dir = testsupport::scratch_dir("wav_write");

    SUBCASE("zero sample") {
        const auto path = dir + "/zero.wav";
        write_wav(Waveform({0.0}, 1500), path);
        const Waveform r = read_wav(path);
        CHECK(r.sample_rate_hz == 1500);
        REQUIRE(r.samples.size() == 1);
        CHECK(r.samples[0] == 0.0);
    }

    SUBCASE("full scale within quantization") {
        const auto path = dir + "/fs.wav";
        write_wav(Waveform({1.0, -1.0}, 4000), path);
        const Waveform r = read_wav(path);
        CHECK(std::abs(r.samples[0] - 1.0) < 3.1e-5);
        CHECK(std::abs(r.samples[1] + 1.0) < 3.1e-5);
    }

    SUBCASE("random vectors: one quantization step") {
        Rng rng(123);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> x(2250);
            for (auto& v : x) v = rng.uniform(-1.0, 1.0);
            const auto path = dir + "/r" + std::to_string(trial) + ".wav";
            write_wav(Waveform(x, 4000), path);
            const Waveform r = read_wav(path);
            REQUIRE(r.samples.size() == x.size());
            double max_err = 0.0;
            for (size_t i = 0; i < x.size(); ++i)
                max_err = std::max(max_err, std::abs(r.samples[i] - x[i]));
            CHECK(max_err <= 2.0 / 65535.0);
        }
    }
}

TEST_CASE("resample: identity and errors") {
    const std::vector<double> x{0.1, 0.2, 0.3};
    CHECK(resample(x, 4000, 4000) == x);
    CHECK_THROWS_AS(resample(x, 4000, 0), DomainError);
    CHECK_THROWS_AS(resample(std::vector<double>{}, 4000, 1500), DomainError);
}

TEST_CASE("resample: output length rounding") {
    const std::vector<double> x(1000, 0.5);
    CHECK(resample(x, 4000, 1500).size() == 375);
    CHECK(resample(x, 44100, 4000).size() == 91); // round(1000 * 4000 / 44100) = 91
}

TEST_CASE("resample: 100 Hz sinusoid 4000 -> 1500, amplitude within 1%") {
    const int n = 4000;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = std::sin(2.0 * M_PI * 100.0 * i / 4000.0);
    const auto y = resample(x, 4000, 1500);
    REQUIRE(y.size() == 1500);

    // oracle: the same sinusoid synthesized directly at 1500 Hz
    std::vector<double> ref(1500);
    for (int i = 0; i < 1500; ++i) ref[static_cast<size_t>(i)] = std::sin(2.0 * M_PI * 100.0 * i / 1500.0);

    const double amp_y = dft_amplitude(y, 100);
    const double amp_ref = dft_amplitude(ref, 100);
    CHECK(amp_y == doctest::Approx(amp_ref).epsilon(0.01));

    // dominant bin is 100 Hz
    double best = 0.0;
    int best_bin = -1;
    for (int b = 1; b < 750; ++b) {
        const double a = dft_amplitude(y, b);
        if (a > best) {
            best = a;
            best_bin = b;
        }
    }
    CHECK(best_bin == 100);
}

TEST_CASE("resample: 1900 Hz at 44100 -> 4000 passes (RMS within 5%)") {
    const int n = 44100;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = std::sin(2.0 * M_PI * 1900.0 * i / 44100.0);
    const auto y = resample(x, 44100, 4000);
    CHECK(rms(y) == doctest::Approx(rms(x)).epsilon(0.05));
}

TEST_CASE("resample: content above the target Nyquist is attenuated >= 60 dB") {
    // Faded ends keep the tone's energy above Nyquist while avoiding the
    // boundary transient any finite-signal edge would inject.
    const int n = 5 * 44100;
    const int ramp = 4410; // 0.1 s raised-cosine fade
    std::vector<double> x(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double env = 1.0;
        if (i < ramp) env = 0.5 * (1.0 - std::cos(M_PI * i / ramp));
        if (i >= n - ramp) env = 0.5 * (1.0 - std::cos(M_PI * (n - 1 - i) / ramp));
        x[static_cast<size_t>(i)] = env * std::sin(2.0 * M_PI * 3000.0 * i / 44100.0);
    }
    const auto y = resample(x, 44100, 4000);
    CHECK(rms(y) <= 1e-3 * rms(x)); // -60 dB
}

TEST_CASE("resample: linearity") {
    Rng rng(9);
    const int n = 2000;
    std::vector<double> x(n), y(n), z(n);
    for (int i = 0; i < n; ++i) {
        x[static_cast<size_t>(i)] = rng.uniform(-1.0, 1.0);
        y[static_cast<size_t>(i)] = rng.uniform(-1.0, 1.0);
        z[static_cast<size_t>(i)] = 2.0 * x[static_cast<size_t>(i)] + 3.0 * y[static_cast<size_t>(i)];
    }
    const auto rx = resample(x, 4000, 1500);
    const auto ry = resample(y, 4000, 1500);
    const auto rz = resample(z, 4000, 1500);
    double max_rel = 0.0;
    for (size_t i = 0; i < rz.size(); ++i) {
        const double want = 2.0 * rx[i] + 3.0 * ry[i];
        max_rel = std::max(max_rel, std::abs(rz[i] - want) / std::max(1.0, std::abs(want)));
    }
    CHECK(max_rel < 1e-6);
}
