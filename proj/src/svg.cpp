#include "varidual/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "varidual/errors.hpp"

namespace varidual {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kPad = 48;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

const char* kPalette[] = {"#1f6fb4", "#d1495b", "#3a7d44", "#8a5bb4", "#c88a2a", "#3b3b3b"};

struct Range {
    double lo = 0.0, hi = 1.0;
    void widen(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    static Range of(const std::vector<const std::vector<double>*>& cols) {
        bool any = false;
        Range r;
        for (const auto* c : cols)
            for (double v : *c) {
                if (!any) {
                    r.lo = r.hi = v;
                    any = true;
                } else {
                    r.widen(v);
                }
            }
        if (!any) {
            r.lo = 0.0;
            r.hi = 1.0;
        }
        if (r.hi == r.lo) r.hi = r.lo + 1.0;
        return r;
    }
};

std::string header(const std::string& title) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"14\">"
       << title << "</text>\n";
    return os.str();
}

std::string axes() {
    std::ostringstream os;
    os << "<line x1=\"" << kPad << "\" y1=\"" << kHeight - kPad << "\" x2=\"" << kWidth - kPad << "\" y2=\""
       << kHeight - kPad << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\"" << kHeight - kPad
       << "\" stroke=\"black\"/>\n";
    return os.str();
}

}  // namespace

std::string svg_line_chart(const std::vector<SvgSeries>& series, const std::string& title) {
    std::vector<const std::vector<double>*> xs, ys;
    for (const auto& s : series) {
        xs.push_back(&s.x);
        ys.push_back(&s.y);
    }
    Range rx = Range::of(xs), ry = Range::of(ys);

    auto px = [&](double x) { return kPad + (x - rx.lo) / (rx.hi - rx.lo) * (kWidth - 2 * kPad); };
    auto py = [&](double y) { return kHeight - kPad - (y - ry.lo) / (ry.hi - ry.lo) * (kHeight - 2 * kPad); };

    std::ostringstream os;
    os << header(title) << axes();
    os << "<text x=\"" << kPad << "\" y=\"" << kHeight - kPad + 16 << "\" font-family=\"monospace\" font-size=\"10\">"
       << num(rx.lo) << "</text>\n";
    os << "<text x=\"" << kWidth - kPad << "\" y=\"" << kHeight - kPad + 16
       << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"10\">" << num(rx.hi) << "</text>\n";
    os << "<text x=\"" << kPad - 4 << "\" y=\"" << kHeight - kPad
       << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"10\">" << num(ry.lo) << "</text>\n";
    os << "<text x=\"" << kPad - 4 << "\" y=\"" << kPad + 4
       << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"10\">" << num(ry.hi) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const SvgSeries& sr = series[s];
        const char* color = kPalette[s % 6];
        if (!sr.x.empty()) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < sr.x.size() && i < sr.y.size(); ++i)
                os << num(px(sr.x[i])) << "," << num(py(sr.y[i])) << " ";
            os << "\"/>\n";
        }
        os << "<text x=\"" << kWidth - kPad << "\" y=\"" << kPad + 14 * (s + 1)
           << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\" fill=\"" << color << "\">" << sr.label
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_histogram(const std::vector<double>& values, int bins, const std::string& title) {
    if (bins < 1) bins = 1;
    Range r = Range::of({&values});
    std::vector<int> count(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        int b = static_cast<int>((v - r.lo) / (r.hi - r.lo) * bins);
        b = std::clamp(b, 0, bins - 1);
        ++count[static_cast<std::size_t>(b)];
    }
    int peak = 1;
    for (int c : count) peak = std::max(peak, c);

    std::ostringstream os;
    os << header(title) << axes();
    double bw = static_cast<double>(kWidth - 2 * kPad) / bins;
    for (int b = 0; b < bins; ++b) {
        double hgt = static_cast<double>(count[static_cast<std::size_t>(b)]) / peak * (kHeight - 2 * kPad);
        os << "<rect x=\"" << num(kPad + b * bw) << "\" y=\"" << num(kHeight - kPad - hgt) << "\" width=\""
           << num(bw * 0.92) << "\" height=\"" << num(hgt) << "\" fill=\"#1f6fb4\"/>\n";
    }
    os << "<text x=\"" << kPad << "\" y=\"" << kHeight - kPad + 16 << "\" font-family=\"monospace\" font-size=\"10\">"
       << num(r.lo) << "</text>\n";
    os << "<text x=\"" << kWidth - kPad << "\" y=\"" << kHeight - kPad + 16
       << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"10\">" << num(r.hi) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::string svg_heatmap(const std::vector<double>& values, int rows, int cols, const std::string& title) {
    if (rows < 1 || cols < 1 || values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw UsageError("svg_heatmap: shape mismatch");
    Range r = Range::of({&values});
    std::ostringstream os;
    os << header(title);
    double cw = static_cast<double>(kWidth - 2 * kPad) / cols;
    double ch = static_cast<double>(kHeight - 2 * kPad) / rows;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            double v = values[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)];
            int level = static_cast<int>(std::lround((v - r.lo) / (r.hi - r.lo) * 255.0));
            level = std::clamp(level, 0, 255);
            char color[8];
            std::snprintf(color, sizeof color, "#%02x%02x%02x", level, level, level);
            os << "<rect x=\"" << num(kPad + j * cw) << "\" y=\"" << num(kPad + i * ch) << "\" width=\"" << num(cw)
               << "\" height=\"" << num(ch) << "\" fill=\"" << color << "\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot open for write: " + path);
    os << content;
}

}  // namespace varidual
