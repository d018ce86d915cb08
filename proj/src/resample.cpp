#include "pcgdn/resample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "pcgdn/errors.hpp"

namespace pcgdn {

namespace {

// Filter design targets. The transition band is placed just below the
// smaller Nyquist: passband edge ~0.952, stopband edge ~0.998 (relative),
// so content at 0.95 * Nyquist passes essentially unattenuated while
// everything above Nyquist is in the stopband.
constexpr double kStopbandDb = 66.0;
constexpr double kTransitionFrac = 0.046; // of the smaller Nyquist
constexpr double kCutoffFrac = 0.975;

double bessel_i0(double x) {
    const double h = 0.5 * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= (h / k) * (h / k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

struct KernelSpec {
    double cutoff;    // fraction of the source Nyquist
    double beta;      // Kaiser shape
    int half_width;   // taps per side, in source samples
    double inv_i0_beta;

    double eval(double u) const {
        const double a = std::abs(u);
        if (a >= half_width) return 0.0;
        double s;
        const double px = M_PI * cutoff * u;
        if (std::abs(px) < 1e-12) {
            s = cutoff;
        } else {
            s = cutoff * std::sin(px) / px;
        }
        const double t = u / half_width;
        const double w = bessel_i0(beta * std::sqrt(1.0 - t * t)) * inv_i0_beta;
        return s * w;
    }
};

KernelSpec design_kernel(double ratio) {
    const double band = std::min(1.0, ratio);
    KernelSpec k;
    k.cutoff = kCutoffFrac * band;
    k.beta = 0.1102 * (kStopbandDb - 8.7);
    const double delta_w = M_PI * kTransitionFrac * band;
    const int taps = static_cast<int>(std::ceil((kStopbandDb - 7.95) / (2.285 * delta_w)));
    k.half_width = std::max(8, (taps + 1) / 2);
    k.inv_i0_beta = 1.0 / bessel_i0(k.beta);
    return k;
}

} // namespace

namespace {

// Half-point symmetric reflection, valid for any index. Reflection keeps the
// local spectral character at the edges, so the full kernel (and its
// stopband) applies to every output sample.
double reflect_at(const std::vector<double>& x, int64_t i) {
    const int64_t n = static_cast<int64_t>(x.size());
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return x[static_cast<size_t>(i)];
}

} // namespace

std::vector<double> resample(const std::vector<double>& x, int source_hz, int target_hz) {
    if (target_hz <= 0) throw DomainError("resample: target rate must be positive");
    if (source_hz <= 0) throw DomainError("resample: source rate must be positive");
    if (x.empty()) throw DomainError("resample: empty input");
    if (target_hz == source_hz) return x;

    const int64_t g = std::gcd(source_hz, target_hz);
    const int64_t up = target_hz / g;   // L
    const int64_t down = source_hz / g; // M

    const double ratio = static_cast<double>(target_hz) / source_hz;
    const KernelSpec kern = design_kernel(ratio);
    const int P = kern.half_width;
    const int64_t n_in = static_cast<int64_t>(x.size());
    const int64_t n_out = (n_in * up + down / 2) / down;

    // Polyphase tap table: output n looks at source position t = n*down/up,
    // whose fractional part cycles with period `up`. Each phase is
    // normalized by its coefficient sum so constants map to constants.
    const int tap_count = 2 * P + 1;
    const bool use_table = up * tap_count <= (int64_t{1} << 21);
    std::vector<double> table;
    if (use_table) {
        table.resize(static_cast<size_t>(up) * tap_count);
        for (int64_t p = 0; p < up; ++p) {
            const double frac = static_cast<double>(p) / up;
            double sum = 0.0;
            for (int j = -P; j <= P; ++j) sum += kern.eval(frac - j);
            for (int j = -P; j <= P; ++j)
                table[static_cast<size_t>(p) * tap_count + (j + P)] = kern.eval(frac - j) / sum;
        }
    }

    std::vector<double> out(static_cast<size_t>(n_out));
    for (int64_t n = 0; n < n_out; ++n) {
        const int64_t num = n * down;
        const int64_t idx0 = num / up;
        const int64_t rem = num % up;

        double acc = 0.0;
        if (use_table) {
            const double* taps = table.data() + static_cast<size_t>(rem) * tap_count;
            if (idx0 - P >= 0 && idx0 + P < n_in) {
                const double* xp = x.data() + (idx0 - P);
                for (int j = 0; j < tap_count; ++j) acc += xp[j] * taps[j];
            } else {
                for (int j = 0; j < tap_count; ++j)
                    acc += reflect_at(x, idx0 - P + j) * taps[j];
            }
        } else {
            const double frac = static_cast<double>(rem) / up;
            double sum = 0.0;
            for (int j = -P; j <= P; ++j) sum += kern.eval(frac - j);
            for (int j = -P; j <= P; ++j)
                acc += reflect_at(x, idx0 + j) * kern.eval(frac - j) / sum;
        }
        out[static_cast<size_t>(n)] = acc;
    }
    return out;
}

Waveform resample(const Waveform& w, int target_hz) {
    if (w.sample_rate_hz == target_hz) return w;
    return Waveform(resample(w.samples, w.sample_rate_hz, target_hz), target_hz);
}

} // namespace pcgdn
