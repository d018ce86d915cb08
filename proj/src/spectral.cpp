#include "pcgdn/spectral.hpp"

#include <array>
#include <cmath>

#include "pcgdn/errors.hpp"

namespace pcgdn {

namespace {

// Padded frame geometry: 32 zeros on both ends (centered segments), then a
// 22-zero tail so (padded - 64) is a multiple of the 32-sample hop.
// (2250 + 64 + 22 - 64) / 32 + 1 = 72 time steps.
constexpr int kBoundaryPad = kSegmentLen / 2;
constexpr int kPaddedLen = 2336;
static_assert((kPaddedLen - kSegmentLen) % kHopLen == 0);
static_assert((kPaddedLen - kSegmentLen) / kHopLen + 1 == kSpecSteps);

// Periodic Hann, the COLA-compatible variant; coefficient sum is exactly 32.
std::array<double, kSegmentLen> hann_window() {
    std::array<double, kSegmentLen> w{};
    for (int n = 0; n < kSegmentLen; ++n)
        w[n] = 0.5 * (1.0 - std::cos(2.0 * M_PI * n / kSegmentLen));
    return w;
}

const std::array<double, kSegmentLen>& window() {
    static const auto w = hann_window();
    return w;
}

double window_sum() {
    static const double s = [] {
        double acc = 0.0;
        for (const double v : window()) acc += v;
        return acc;
    }();
    return s;
}

// Iterative radix-2 complex FFT, in place. n must be a power of two.
void fft_inplace(std::complex<double>* a, int n, bool inverse) {
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / len;
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (int j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / n;
        for (int i = 0; i < n; ++i) a[i] *= inv;
    }
}

// Corner-aligned bilinear resize of a row-major h_in x w_in grid.
void resize_bilinear(const double* src, int h_in, int w_in, double* dst, int h_out, int w_out) {
    const double ys = h_out > 1 ? static_cast<double>(h_in - 1) / (h_out - 1) : 0.0;
    const double xs = w_out > 1 ? static_cast<double>(w_in - 1) / (w_out - 1) : 0.0;
    for (int i = 0; i < h_out; ++i) {
        const double y = i * ys;
        int y0 = static_cast<int>(y);
        if (y0 > h_in - 2) y0 = h_in - 2;
        const double fy = y - y0;
        for (int j = 0; j < w_out; ++j) {
            const double x = j * xs;
            int x0 = static_cast<int>(x);
            if (x0 > w_in - 2) x0 = w_in - 2;
            const double fx = x - x0;
            const double a = src[y0 * w_in + x0];
            const double b = src[y0 * w_in + x0 + 1];
            const double c = src[(y0 + 1) * w_in + x0];
            const double d = src[(y0 + 1) * w_in + x0 + 1];
            dst[i * w_out + j] =
                a * (1 - fx) * (1 - fy) + b * fx * (1 - fy) + c * (1 - fx) * fy + d * fx * fy;
        }
    }
}

} // namespace

std::vector<Frame> frame_signal(const Waveform& w) {
    if (w.sample_rate_hz != kModelRateHz)
        throw DomainError("frame_signal: expected 1500 Hz input, got " +
                          std::to_string(w.sample_rate_hz));
    if (w.empty()) throw DomainError("frame_signal: empty input");

    const size_t n = w.samples.size();
    const size_t frames = (n + kFrameSamples - 1) / kFrameSamples;
    std::vector<Frame> out(frames);
    for (size_t f = 0; f < frames; ++f) {
        Frame& fr = out[f];
        fr.samples.assign(kFrameSamples, 0.0);
        const size_t begin = f * kFrameSamples;
        const size_t count = std::min<size_t>(kFrameSamples, n - begin);
        std::copy_n(w.samples.begin() + static_cast<ptrdiff_t>(begin), count, fr.samples.begin());
        fr.pad_len = static_cast<int>(kFrameSamples - count);
    }
    return out;
}

ComplexSpectrum stft(const Frame& f) {
    if (f.samples.size() != kFrameSamples)
        throw DomainError("stft: frame must hold exactly 2250 samples");

    std::vector<double> padded(kPaddedLen, 0.0);
    std::copy(f.samples.begin(), f.samples.end(), padded.begin() + kBoundaryPad);

    const auto& win = window();
    const double scale = 1.0 / window_sum();

    ComplexSpectrum spec;
    std::array<std::complex<double>, kFftLen> buf;
    for (int m = 0; m < kSpecSteps; ++m) {
        const int start = m * kHopLen;
        for (int n = 0; n < kSegmentLen; ++n) buf[n] = padded[start + n] * win[n];
        for (int n = kSegmentLen; n < kFftLen; ++n) buf[n] = 0.0;
        fft_inplace(buf.data(), kFftLen, false);
        for (int k = 0; k < kSpecBins; ++k) spec.at(k, m) = buf[k] * scale;
    }
    return spec;
}

Frame istft(const ComplexSpectrum& s, int pad_len) {
    if (s.v.size() != static_cast<size_t>(kSpecBins) * kSpecSteps)
        throw DomainError("istft: spectrum must be 65 x 72");
    if (pad_len < 0 || pad_len >= kFrameSamples) throw DomainError("istft: bad pad_len");

    const auto& win = window();
    const double descale = window_sum();

    std::vector<double> acc(kPaddedLen, 0.0);
    std::vector<double> norm(kPaddedLen, 0.0);
    std::array<std::complex<double>, kFftLen> buf;
    for (int m = 0; m < kSpecSteps; ++m) {
        buf[0] = s.at(0, m) * descale;
        for (int k = 1; k < kSpecBins; ++k) {
            const std::complex<double> v = s.at(k, m) * descale;
            buf[k] = v;
            if (k < kFftLen / 2) buf[kFftLen - k] = std::conj(v);
        }
        buf[kFftLen / 2] = std::complex<double>(buf[kFftLen / 2].real(), 0.0); // Nyquist bin is real
        fft_inplace(buf.data(), kFftLen, true);
        const int start = m * kHopLen;
        for (int n = 0; n < kSegmentLen; ++n) {
            acc[start + n] += buf[n].real() * win[n];
            norm[start + n] += win[n] * win[n];
        }
    }

    Frame out;
    out.samples.resize(kFrameSamples);
    out.pad_len = pad_len;
    for (int i = 0; i < kFrameSamples; ++i) {
        const int j = i + kBoundaryPad;
        out.samples[i] = norm[j] > 1e-12 ? acc[j] / norm[j] : 0.0;
    }
    return out;
}

PackedSpectrum pack(const ComplexSpectrum& s) {
    if (s.v.size() != static_cast<size_t>(kSpecBins) * kSpecSteps)
        throw DomainError("pack: spectrum must be 65 x 72");

    std::vector<double> re(s.v.size()), im(s.v.size());
    for (size_t i = 0; i < s.v.size(); ++i) {
        re[i] = s.v[i].real();
        im[i] = s.v[i].imag();
    }
    std::vector<double> re_rs(static_cast<size_t>(kPackedHw) * kPackedHw);
    std::vector<double> im_rs(re_rs.size());
    resize_bilinear(re.data(), kSpecBins, kSpecSteps, re_rs.data(), kPackedHw, kPackedHw);
    resize_bilinear(im.data(), kSpecBins, kSpecSteps, im_rs.data(), kPackedHw, kPackedHw);

    PackedSpectrum out({kPackedHw, kPackedHw, 2});
    for (int i = 0; i < kPackedHw; ++i)
        for (int j = 0; j < kPackedHw; ++j) {
            out.data[(static_cast<size_t>(i) * kPackedHw + j) * 2 + 0] =
                static_cast<float>(re_rs[static_cast<size_t>(i) * kPackedHw + j]);
            out.data[(static_cast<size_t>(i) * kPackedHw + j) * 2 + 1] =
                static_cast<float>(im_rs[static_cast<size_t>(i) * kPackedHw + j]);
        }
    return out;
}

ComplexSpectrum unpack(const PackedSpectrum& t) {
    if (t.shape != std::vector<int>{kPackedHw, kPackedHw, 2})
        throw DomainError("unpack: tensor must be 64 x 64 x 2, got " + nn::shape_str(t.shape));

    std::vector<double> re(static_cast<size_t>(kPackedHw) * kPackedHw), im(re.size());
    for (size_t i = 0; i < re.size(); ++i) {
        re[i] = t.data[i * 2 + 0];
        im[i] = t.data[i * 2 + 1];
    }
    std::vector<double> re_rs(static_cast<size_t>(kSpecBins) * kSpecSteps), im_rs(re_rs.size());
    resize_bilinear(re.data(), kPackedHw, kPackedHw, re_rs.data(), kSpecBins, kSpecSteps);
    resize_bilinear(im.data(), kPackedHw, kPackedHw, im_rs.data(), kSpecBins, kSpecSteps);

    ComplexSpectrum out;
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = std::complex<double>(re_rs[i], im_rs[i]);
    return out;
}

Waveform reconstruct(const std::vector<Frame>& frames) {
    if (frames.empty()) throw DomainError("reconstruct: no frames");
    for (size_t i = 0; i + 1 < frames.size(); ++i)
        if (frames[i].pad_len != 0)
            throw DomainError("reconstruct: pad_len > 0 on non-final frame " + std::to_string(i));
    for (const Frame& f : frames)
        if (f.samples.size() != kFrameSamples || f.pad_len < 0 || f.pad_len >= kFrameSamples)
            throw DomainError("reconstruct: malformed frame");

    Waveform out;
    out.sample_rate_hz = kModelRateHz;
    const size_t total =
        frames.size() * kFrameSamples - static_cast<size_t>(frames.back().pad_len);
    out.samples.reserve(total);
    for (size_t i = 0; i < frames.size(); ++i) {
        const size_t count =
            i + 1 == frames.size() ? kFrameSamples - frames.back().pad_len : kFrameSamples;
        out.samples.insert(out.samples.end(), frames[i].samples.begin(),
                           frames[i].samples.begin() + static_cast<ptrdiff_t>(count));
    }
    return out;
}

} // namespace pcgdn
