#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pcgdn/dataset.hpp"
#include "pcgdn/waveform.hpp"

namespace pcgdn {

// A (clean reference, estimate) pair at the comparison rate. Lengths off by
// at most 2 samples are trimmed to match (with a stderr warning); anything
// larger is an error.
struct EvalPair {
    std::vector<double> reference;
    std::vector<double> estimate;
    std::string id;
};

EvalPair make_eval_pair(std::vector<double> reference, std::vector<double> estimate,
                        std::string id = "");

// Summed absolute error: sum_n |ref[n] - est[n]|. This is the literal
// per-sample sqrt-of-square sum the corpus reports as "RMSE"; the
// conventional root-mean-square is reported separately below.
double rmse_paper(const EvalPair& p);

// Conventional sqrt(mean((ref - est)^2)).
double rmse_standard(const EvalPair& p);

// Median of per-sample absolute differences (even count: mean of the two
// middle order statistics).
double med_abs_err(const EvalPair& p);

// 10 log10( sum (ref - mean(ref))^2 / sum (ref - est)^2 ). Exact match
// returns +infinity; a constant reference is a DomainError.
double snr_db(const EvalPair& p);

struct MetricRow {
    std::string method;
    std::string recording_id; // "MEAN" for the summary row
    double rmse_paper = 0.0;
    double rmse_standard = 0.0;
    double med_abs_err = 0.0;
    double snr_db = 0.0;
};

struct EvalReport {
    std::vector<MetricRow> rows;       // per recording, grouped by method
    std::vector<MetricRow> mean_rows;  // one per method, in method order

    std::string to_csv() const;
    std::string to_table() const; // pretty text table of the means
};

// A denoising method under evaluation: maps a noisy 4 kHz recording to an
// estimate at the 1500 Hz comparison rate.
struct EvalMethod {
    std::string name;
    std::function<Waveform(const Waveform&)> denoise;
};

// Runs every method over the test partition of the manifest (clean
// references resampled to 1500 Hz) and appends a "noop" row for the raw
// noisy signal. `root_dir` resolves the manifest-relative noisy paths.
EvalReport evaluate(const DatasetManifest& manifest, const std::string& root_dir,
                    const std::vector<EvalMethod>& methods,
                    const std::string& partition = "test");

} // namespace pcgdn
