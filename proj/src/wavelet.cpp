#include "pcgdn/wavelet.hpp"

#include <algorithm>
#include <cmath>

#include "pcgdn/errors.hpp"

namespace pcgdn {

namespace {

// Orthonormal Daubechies / least-asymmetric scaling filters (spectral
// factorization of the binomial half-band polynomial, full double
// precision). Each sums to sqrt 2 and has unit energy.
const std::vector<double> kDb4{
    2.30377813308896451e-01, 7.14846570552915672e-01, 6.30880767929859032e-01,
    -2.79837694168594761e-02, -1.87034811719093058e-01, 3.08413818355606356e-02,
    3.28830116668851619e-02, -1.05974017850690196e-02};

const std::vector<double> kDb8{
    5.44158422431039526e-02, 3.12871590914299724e-01, 6.75630736297289536e-01,
    5.85354683654206731e-01, -1.58291052563490353e-02, -2.84015542961546352e-01,
    4.72484573913397341e-04, 1.28747426620478111e-01, -1.73693010018073912e-02,
    -4.40882539307947477e-02, 1.39810279173982564e-02, 8.74609404740577488e-03,
    -4.87035299345157068e-03, -3.91740373376946020e-04, 6.75449406450568356e-04,
    -1.17476784124769331e-04};

const std::vector<double> kSym8{
    1.88995033276768390e-03, -3.02920514724138563e-04, -1.49522583370621798e-02,
    3.80875201389454295e-03, 4.91371796737302691e-02, -2.72190299171036452e-02,
    -5.19458381078809345e-02, 3.64441894836178060e-01, 7.77185751699628780e-01,
    4.81359651259052390e-01, -6.12733590678110479e-02, -1.43294238351272196e-01,
    7.60748732497655480e-03, 3.16950878115259821e-02, -5.42132331800026981e-04,
    -3.38241595100500060e-03};

struct FilterBank {
    std::vector<double> dec_lo, dec_hi, rec_lo, rec_hi;
};

FilterBank make_bank(const std::vector<double>& h) {
    const size_t F = h.size();
    FilterBank b;
    b.rec_lo = h;
    b.dec_lo.resize(F);
    b.rec_hi.resize(F);
    b.dec_hi.resize(F);
    for (size_t k = 0; k < F; ++k) b.dec_lo[k] = h[F - 1 - k];
    for (size_t k = 0; k < F; ++k)
        b.rec_hi[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[F - 1 - k];
    for (size_t k = 0; k < F; ++k) b.dec_hi[k] = b.rec_hi[F - 1 - k];
    return b;
}

const FilterBank& bank(WaveletKind kind) {
    static const FilterBank db4 = make_bank(kDb4);
    static const FilterBank db8 = make_bank(kDb8);
    static const FilterBank sym8 = make_bank(kSym8);
    switch (kind) {
        case WaveletKind::Db4: return db4;
        case WaveletKind::Db8: return db8;
        case WaveletKind::Sym8: return sym8;
    }
    return db4;
}

// Sample of x extended by half-point symmetric reflection, valid for any
// index (repeated reflection for very short signals).
double sym_at(const std::vector<double>& x, int64_t i) {
    const int64_t n = static_cast<int64_t>(x.size());
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return x[static_cast<size_t>(i)];
}

double per_at(const std::vector<double>& x, int64_t i) {
    const int64_t n = static_cast<int64_t>(x.size());
    i %= n;
    if (i < 0) i += n;
    return x[static_cast<size_t>(i)];
}

// One analysis level: convolve with the decimation filters and keep odd
// phases. Symmetric mode yields floor((n + F - 1) / 2) coefficients per
// band; periodic mode yields n / 2 (n must be even).
void dwt_level(const std::vector<double>& x, const FilterBank& b, WaveletBoundary mode,
               std::vector<double>& ca, std::vector<double>& cd) {
    const int64_t n = static_cast<int64_t>(x.size());
    const int64_t F = static_cast<int64_t>(b.dec_lo.size());
    int64_t out_len;
    if (mode == WaveletBoundary::Symmetric) {
        out_len = (n + F - 1) / 2;
    } else {
        if (n % 2 != 0) throw DomainError("dwt: periodized boundary requires even length");
        out_len = n / 2;
    }
    ca.assign(static_cast<size_t>(out_len), 0.0);
    cd.assign(static_cast<size_t>(out_len), 0.0);
    for (int64_t i = 0; i < out_len; ++i) {
        double lo = 0.0, hi = 0.0;
        for (int64_t t = 0; t < F; ++t) {
            const int64_t k = 2 * i + 1 - t;
            const double v = mode == WaveletBoundary::Symmetric ? sym_at(x, k) : per_at(x, k);
            lo += b.dec_lo[static_cast<size_t>(t)] * v;
            hi += b.dec_hi[static_cast<size_t>(t)] * v;
        }
        ca[static_cast<size_t>(i)] = lo;
        cd[static_cast<size_t>(i)] = hi;
    }
}

// One synthesis level, inverse of dwt_level; out_len is the length of the
// signal that entered the matching analysis step.
std::vector<double> idwt_level(const std::vector<double>& ca, const std::vector<double>& cd,
                               const FilterBank& b, WaveletBoundary mode, int64_t out_len) {
    const int64_t m = static_cast<int64_t>(ca.size());
    const int64_t F = static_cast<int64_t>(b.rec_lo.size());

    if (mode == WaveletBoundary::Periodic) {
        std::vector<double> out(static_cast<size_t>(out_len), 0.0);
        for (int64_t i = 0; i < m; ++i) {
            for (int64_t t = 0; t < F; ++t) {
                int64_t k = (2 * i + 1 - t) % out_len;
                if (k < 0) k += out_len;
                out[static_cast<size_t>(k)] += b.rec_lo[static_cast<size_t>(F - 1 - t)] *
                                                   ca[static_cast<size_t>(i)] +
                                               b.rec_hi[static_cast<size_t>(F - 1 - t)] *
                                                   cd[static_cast<size_t>(i)];
            }
        }
        return out;
    }

    // Symmetric mode: full upsampled convolution, then crop F - 2 from the
    // left edge (the transpose of the analysis alignment).
    const int64_t full = 2 * m + F - 2;
    std::vector<double> acc(static_cast<size_t>(full), 0.0);
    for (int64_t i = 0; i < m; ++i) {
        const int64_t base = 2 * i + 1;
        for (int64_t t = 0; t < F; ++t) {
            const int64_t k = base - t + F - 2;
            if (k >= 0 && k < full)
                acc[static_cast<size_t>(k)] += b.rec_lo[static_cast<size_t>(F - 1 - t)] *
                                                   ca[static_cast<size_t>(i)] +
                                               b.rec_hi[static_cast<size_t>(F - 1 - t)] *
                                                   cd[static_cast<size_t>(i)];
        }
    }
    std::vector<double> out(static_cast<size_t>(out_len));
    for (int64_t i = 0; i < out_len; ++i) out[static_cast<size_t>(i)] = acc[static_cast<size_t>(i + F - 2)];
    return out;
}

double median_abs(const std::vector<double>& v) {
    std::vector<double> a;
    a.reserve(v.size());
    for (const double x : v) a.push_back(std::abs(x));
    const size_t n = a.size();
    std::nth_element(a.begin(), a.begin() + n / 2, a.end());
    double med = a[n / 2];
    if (n % 2 == 0) {
        std::nth_element(a.begin(), a.begin() + n / 2 - 1, a.end());
        med = 0.5 * (med + a[n / 2 - 1]);
    }
    return med;
}

} // namespace

const std::vector<double>& wavelet_filter(WaveletKind kind) {
    switch (kind) {
        case WaveletKind::Db4: return kDb4;
        case WaveletKind::Db8: return kDb8;
        case WaveletKind::Sym8: return kSym8;
    }
    return kDb4;
}

WaveletPyramid dwt(const std::vector<double>& x, const WaveletConfig& cfg,
                   WaveletBoundary boundary) {
    const auto& b = bank(cfg.wavelet);
    const int64_t F = static_cast<int64_t>(b.dec_lo.size());
    if (static_cast<int64_t>(x.size()) < F)
        throw DomainError("dwt: signal shorter than the wavelet filter");
    if (cfg.levels < 1) throw DomainError("dwt: levels must be >= 1");
    const double max_levels = std::log2(static_cast<double>(x.size()) / static_cast<double>(F));
    if (static_cast<double>(cfg.levels) > max_levels)
        throw DomainError("dwt: too many levels for signal length");

    WaveletPyramid pyr;
    pyr.kind = cfg.wavelet;
    pyr.boundary = boundary;
    std::vector<double> cur = x;
    std::vector<std::vector<double>> details_fine_first;
    for (int l = 0; l < cfg.levels; ++l) {
        pyr.level_lengths.push_back(static_cast<int>(cur.size()));
        std::vector<double> ca, cd;
        dwt_level(cur, b, boundary, ca, cd);
        details_fine_first.push_back(std::move(cd));
        cur = std::move(ca);
    }
    pyr.approx = std::move(cur);
    // store coarsest first
    pyr.details.assign(details_fine_first.rbegin(), details_fine_first.rend());
    return pyr;
}

std::vector<double> idwt(const WaveletPyramid& pyr) {
    const auto& b = bank(pyr.kind);
    std::vector<double> cur = pyr.approx;
    const int levels = static_cast<int>(pyr.details.size());
    for (int l = 0; l < levels; ++l) {
        const int64_t out_len = pyr.level_lengths[static_cast<size_t>(levels - 1 - l)];
        cur = idwt_level(cur, pyr.details[static_cast<size_t>(l)], b, pyr.boundary, out_len);
    }
    return cur;
}

Waveform wt_denoise(const Waveform& w, const WaveletConfig& cfg) {
    if (w.empty()) throw DomainError("wt_denoise: empty input");
    WaveletPyramid pyr = dwt(w.samples, cfg, WaveletBoundary::Symmetric);

    const double n = static_cast<double>(w.samples.size());
    for (auto& detail : pyr.details) {
        double threshold = cfg.fixed_threshold;
        if (cfg.rule == ThresholdRule::Universal) {
            const double sigma = median_abs(detail) / 0.6745;
            threshold = sigma * std::sqrt(2.0 * std::log(n));
        }
        for (double& c : detail) {
            if (cfg.mode == ThresholdMode::Soft) {
                const double mag = std::abs(c) - threshold;
                c = mag > 0.0 ? (c > 0.0 ? mag : -mag) : 0.0;
            } else {
                c = std::abs(c) > threshold ? c : 0.0;
            }
        }
    }

    Waveform out;
    out.sample_rate_hz = w.sample_rate_hz;
    out.samples = idwt(pyr);
    return out;
}

} // namespace pcgdn
