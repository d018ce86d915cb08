#pragma once

#include <string>
#include <vector>

#include "pcgdn/spectral.hpp"

namespace pcgdn {

struct TraceSeries {
    std::string label;
    std::vector<double> samples;
};

// CSV with one column per series (header row of labels); short series are
// padded with empty cells.
void write_traces_csv(const std::string& path, const std::vector<TraceSeries>& series);

// Stacked line plots (one panel per series) as a standalone SVG file.
void write_traces_svg(const std::string& path, const std::vector<TraceSeries>& series,
                      const std::string& title);

// 65 x 72 magnitude matrix of one frame's spectrum, one CSV row per bin.
void write_heatmap_csv(const std::string& path, const ComplexSpectrum& spectrum);

} // namespace pcgdn
