#pragma once

#include <string>
#include <vector>

namespace varidual {

// Deterministic SVG emitters: fixed viewport, no timestamps, %.17g-free
// rounded coordinates. Byte-identical output for identical inputs.

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Polyline chart with axes; empty series produce valid empty axes.
std::string svg_line_chart(const std::vector<SvgSeries>& series, const std::string& title);

// Bar histogram of the given values with the requested bin count.
std::string svg_histogram(const std::vector<double>& values, int bins, const std::string& title);

// Grayscale cell map of a row-major matrix.
std::string svg_heatmap(const std::vector<double>& values, int rows, int cols, const std::string& title);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace varidual
