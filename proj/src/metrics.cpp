#include "pcgdn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "pcgdn/errors.hpp"
#include "pcgdn/resample.hpp"
#include "pcgdn/wav_io.hpp"

namespace fs = std::filesystem;

namespace pcgdn {

EvalPair make_eval_pair(std::vector<double> reference, std::vector<double> estimate,
                        std::string id) {
    const auto nr = reference.size(), ne = estimate.size();
    if (nr != ne) {
        const size_t diff = nr > ne ? nr - ne : ne - nr;
        if (diff > 2)
            throw DomainError("eval pair '" + id + "': length mismatch " + std::to_string(nr) +
                              " vs " + std::to_string(ne));
        const size_t n = std::min(nr, ne);
        std::cerr << "eval pair '" << id << "': trimming " << diff << " sample(s) to match\n";
        reference.resize(n);
        estimate.resize(n);
    }
    if (reference.empty()) throw DomainError("eval pair '" + id + "': empty signals");
    return {std::move(reference), std::move(estimate), std::move(id)};
}

double rmse_paper(const EvalPair& p) {
    if (p.reference.size() != p.estimate.size()) throw DomainError("rmse_paper: length mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < p.reference.size(); ++i)
        acc += std::abs(p.reference[i] - p.estimate[i]);
    return acc;
}

double rmse_standard(const EvalPair& p) {
    if (p.reference.size() != p.estimate.size())
        throw DomainError("rmse_standard: length mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < p.reference.size(); ++i) {
        const double d = p.reference[i] - p.estimate[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(p.reference.size()));
}

double med_abs_err(const EvalPair& p) {
    if (p.reference.size() != p.estimate.size()) throw DomainError("med_abs_err: length mismatch");
    std::vector<double> d(p.reference.size());
    for (size_t i = 0; i < d.size(); ++i) d[i] = std::abs(p.reference[i] - p.estimate[i]);
    const size_t n = d.size();
    std::nth_element(d.begin(), d.begin() + n / 2, d.end());
    double med = d[n / 2];
    if (n % 2 == 0) {
        std::nth_element(d.begin(), d.begin() + n / 2 - 1, d.end());
        med = 0.5 * (med + d[n / 2 - 1]);
    }
    return med;
}

double snr_db(const EvalPair& p) {
    if (p.reference.size() != p.estimate.size()) throw DomainError("snr_db: length mismatch");
    double mean = 0.0;
    for (const double v : p.reference) mean += v;
    mean /= static_cast<double>(p.reference.size());

    double signal = 0.0, error = 0.0;
    for (size_t i = 0; i < p.reference.size(); ++i) {
        const double s = p.reference[i] - mean;
        const double e = p.reference[i] - p.estimate[i];
        signal += s * s;
        error += e * e;
    }
    if (signal == 0.0) throw DomainError("snr_db: constant reference signal");
    if (error == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(signal / error);
}

namespace {

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << v;
    return os.str();
}

} // namespace

std::string EvalReport::to_csv() const {
    std::ostringstream os;
    os << "method,recording_id,rmse_paper,rmse_standard,med_abs_err,snr_db\n";
    for (const auto& r : rows)
        os << r.method << "," << r.recording_id << "," << fmt(r.rmse_paper) << ","
           << fmt(r.rmse_standard) << "," << fmt(r.med_abs_err) << "," << fmt(r.snr_db) << "\n";
    for (const auto& r : mean_rows)
        os << r.method << ",MEAN," << fmt(r.rmse_paper) << "," << fmt(r.rmse_standard) << ","
           << fmt(r.med_abs_err) << "," << fmt(r.snr_db) << "\n";
    return os.str();
}

std::string EvalReport::to_table() const {
    std::ostringstream os;
    os << "method        mean RMSE(sum)  mean RMSE     mean MedAE    mean SNR(dB)\n";
    for (const auto& r : mean_rows) {
        std::string name = r.method;
        name.resize(14, ' ');
        std::string c1 = fmt(r.rmse_paper), c2 = fmt(r.rmse_standard), c3 = fmt(r.med_abs_err);
        c1.resize(16, ' ');
        c2.resize(14, ' ');
        c3.resize(14, ' ');
        os << name << c1 << c2 << c3 << fmt(r.snr_db) << "\n";
    }
    return os.str();
}

EvalReport evaluate(const DatasetManifest& manifest, const std::string& root_dir,
                    const std::vector<EvalMethod>& methods, const std::string& partition) {
    const auto entries = partition_entries(manifest, partition);
    if (entries.empty())
        throw DomainError("evaluate: no entries in partition '" + partition + "'");

    std::vector<EvalMethod> all = methods;
    all.push_back({"noop", [](const Waveform& noisy) { return resample(noisy, kModelRateHz); }});

    EvalReport report;
    std::vector<double> sum_rp(all.size(), 0.0), sum_rs(all.size(), 0.0), sum_me(all.size(), 0.0),
        sum_snr(all.size(), 0.0);

    for (const auto& e : entries) {
        const fs::path noisy_path = fs::path(root_dir) / e.noisy_path;
        if (!fs::exists(noisy_path))
            throw IoError("evaluate: missing noisy file for entry '" + e.noisy_path + "'");
        if (!fs::exists(e.clean_path))
            throw IoError("evaluate: missing clean file for entry '" + e.clean_path + "'");
        Waveform noisy = read_wav(noisy_path.string());
        if (noisy.sample_rate_hz != kMixRateHz) noisy = resample(noisy, kMixRateHz);
        Waveform clean = normalize(read_wav(e.clean_path));
        if (clean.sample_rate_hz != kMixRateHz) clean = resample(clean, kMixRateHz);
        const Waveform reference = resample(clean, kModelRateHz);

        const std::string rec_id = e.recipe.clean_id + "_v" + std::to_string(e.recipe.variant_index);
        for (size_t m = 0; m < all.size(); ++m) {
            const Waveform estimate = all[m].denoise(noisy);
            const EvalPair pair =
                make_eval_pair(reference.samples, estimate.samples, rec_id + "/" + all[m].name);
            MetricRow row;
            row.method = all[m].name;
            row.recording_id = rec_id;
            row.rmse_paper = rmse_paper(pair);
            row.rmse_standard = rmse_standard(pair);
            row.med_abs_err = med_abs_err(pair);
            row.snr_db = snr_db(pair);
            sum_rp[m] += row.rmse_paper;
            sum_rs[m] += row.rmse_standard;
            sum_me[m] += row.med_abs_err;
            sum_snr[m] += row.snr_db;
            report.rows.push_back(std::move(row));
        }
    }

    const double n = static_cast<double>(entries.size());
    for (size_t m = 0; m < all.size(); ++m) {
        MetricRow row;
        row.method = all[m].name;
        row.recording_id = "MEAN";
        row.rmse_paper = sum_rp[m] / n;
        row.rmse_standard = sum_rs[m] / n;
        row.med_abs_err = sum_me[m] / n;
        row.snr_db = sum_snr[m] / n;
        report.mean_rows.push_back(std::move(row));
    }
    return report;
}

} // namespace pcgdn
