#include "pcgdn/plotting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pcgdn/errors.hpp"

namespace pcgdn {

void write_traces_csv(const std::string& path, const std::vector<TraceSeries>& series) {
    if (series.empty()) throw DomainError("write_traces_csv: no series");
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write " + path);
    size_t rows = 0;
    for (size_t i = 0; i < series.size(); ++i) {
        f << (i ? "," : "") << series[i].label;
        rows = std::max(rows, series[i].samples.size());
    }
    f << "\n";
    for (size_t r = 0; r < rows; ++r) {
        for (size_t i = 0; i < series.size(); ++i) {
            if (i) f << ",";
            if (r < series[i].samples.size()) f << series[i].samples[r];
        }
        f << "\n";
    }
}

void write_traces_svg(const std::string& path, const std::vector<TraceSeries>& series,
                      const std::string& title) {
    if (series.empty()) throw DomainError("write_traces_svg: no series");
    const int width = 900;
    const int panel_h = 160;
    const int margin = 40;
    const int height = margin + static_cast<int>(series.size()) * panel_h + 10;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
        << title << "</text>\n";

    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (size_t s = 0; s < series.size(); ++s) {
        const auto& v = series[s].samples;
        const int top = margin + static_cast<int>(s) * panel_h;
        const int plot_h = panel_h - 30;
        double lo = 0.0, hi = 0.0;
        for (const double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        if (hi - lo < 1e-12) hi = lo + 1.0;

        svg << "<text x=\"" << margin << "\" y=\"" << top + 12
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << colors[s % 5] << "\">"
            << series[s].label << "</text>\n";
        svg << "<rect x=\"" << margin << "\" y=\"" << top + 18 << "\" width=\"" << width - 2 * margin
            << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
        if (v.empty()) continue;

        svg << "<polyline fill=\"none\" stroke=\"" << colors[s % 5]
            << "\" stroke-width=\"0.8\" points=\"";
        // Downsample to at most ~4 points per pixel to keep files small.
        const size_t max_pts = static_cast<size_t>(4 * (width - 2 * margin));
        const size_t step = std::max<size_t>(1, v.size() / max_pts);
        for (size_t i = 0; i < v.size(); i += step) {
            const double x = margin + (width - 2.0 * margin) * static_cast<double>(i) /
                                          static_cast<double>(std::max<size_t>(1, v.size() - 1));
            const double y = top + 18 + plot_h * (1.0 - (v[i] - lo) / (hi - lo));
            svg << x << "," << y << " ";
        }
        svg << "\"/>\n";
    }
    svg << "</svg>\n";

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write " + path);
    f << svg.str();
}

void write_heatmap_csv(const std::string& path, const ComplexSpectrum& spectrum) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write " + path);
    for (int k = 0; k < kSpecBins; ++k) {
        for (int m = 0; m < kSpecSteps; ++m) {
            if (m) f << ",";
            f << std::abs(spectrum.at(k, m));
        }
        f << "\n";
    }
}

} // namespace pcgdn
