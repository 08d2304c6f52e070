#include "varidual/sampled_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace varidual {

int AxisGrid::nearest(double x) const {
    int i = static_cast<int>(std::lround((x - lo) / step));
    return std::clamp(i, 0, count - 1);
}

GridLayout::GridLayout(std::vector<AxisGrid> axes) : axes_(std::move(axes)) {
    if (axes_.empty() || axes_.size() > 3) throw UsageError("GridLayout: dimension must be 1..3");
    total_ = 1;
    for (const auto& a : axes_) {
        if (a.count < 1 || a.step <= 0.0) throw UsageError("GridLayout: bad axis");
        total_ *= a.count;
    }
}

GridLayout GridLayout::centered(int m, double radius, double spacing) {
    return centered(std::vector<double>(static_cast<std::size_t>(m), radius),
                    std::vector<double>(static_cast<std::size_t>(m), spacing));
}

GridLayout GridLayout::centered(const std::vector<double>& radius, const std::vector<double>& spacing) {
    if (radius.size() != spacing.size()) throw UsageError("GridLayout::centered: size mismatch");
    std::vector<AxisGrid> axes;
    for (std::size_t a = 0; a < radius.size(); ++a) {
        if (radius[a] <= 0.0 || spacing[a] <= 0.0) throw UsageError("GridLayout::centered: nonpositive extent");
        int half = static_cast<int>(std::ceil(radius[a] / spacing[a] - 1e-12));
        AxisGrid g;
        g.step = spacing[a];
        g.count = 2 * half + 1;
        g.lo = -spacing[a] * half;
        axes.push_back(g);
    }
    return GridLayout(std::move(axes));
}

std::int64_t GridLayout::linear_index(const int* multi) const {
    std::int64_t lin = 0;
    for (int a = 0; a < dim(); ++a) lin = lin * axes_[static_cast<std::size_t>(a)].count + multi[a];
    return lin;
}

void GridLayout::multi_index(std::int64_t lin, int* multi) const {
    for (int a = dim() - 1; a >= 0; --a) {
        int c = axes_[static_cast<std::size_t>(a)].count;
        multi[a] = static_cast<int>(lin % c);
        lin /= c;
    }
}

TensorPoint GridLayout::coords(const int* multi) const {
    TensorPoint p = TensorPoint::zeros(dim());
    for (int a = 0; a < dim(); ++a) p[a] = axes_[static_cast<std::size_t>(a)].coord(multi[a]);
    return p;
}

TensorPoint GridLayout::coords_linear(std::int64_t lin) const {
    int multi[3] = {0, 0, 0};
    multi_index(lin, multi);
    return coords(multi);
}

bool GridLayout::contains(const TensorPoint& p) const {
    if (p.dim() != dim()) return false;
    for (int a = 0; a < dim(); ++a) {
        const auto& g = axes_[static_cast<std::size_t>(a)];
        if (p[a] < g.lo - 1e-12 * g.step || p[a] > g.hi() + 1e-12 * g.step) return false;
    }
    return true;
}

bool operator==(const GridLayout& a, const GridLayout& b) {
    if (a.dim() != b.dim()) return false;
    for (int i = 0; i < a.dim(); ++i) {
        const AxisGrid &x = a.axis(i), &y = b.axis(i);
        if (x.lo != y.lo || x.step != y.step || x.count != y.count) return false;
    }
    return true;
}

SampledConvexFunction::SampledConvexFunction(GridLayout layout)
    : layout_(std::move(layout)),
      values_(static_cast<std::size_t>(layout_.node_count()), 0.0),
      finite_(static_cast<std::size_t>(layout_.node_count()), 0) {}

void SampledConvexFunction::set(std::int64_t lin, ExtendedValue v) {
    if (v.is_finite())
        set_finite(lin, v.value());
    else
        set_infinite(lin);
}

void SampledConvexFunction::set_finite(std::int64_t lin, double v) {
    if (!std::isfinite(v)) throw UsageError("SampledConvexFunction: non-finite value");
    values_[static_cast<std::size_t>(lin)] = v;
    finite_[static_cast<std::size_t>(lin)] = 1;
}

void SampledConvexFunction::set_infinite(std::int64_t lin) {
    values_[static_cast<std::size_t>(lin)] = 0.0;
    finite_[static_cast<std::size_t>(lin)] = 0;
}

std::int64_t SampledConvexFunction::finite_count() const {
    std::int64_t n = 0;
    for (auto f : finite_) n += f;
    return n;
}

ExtendedValue SampledConvexFunction::interpolate(const TensorPoint& p) const {
    const int m = dim();
    if (p.dim() != m) throw UsageError("interpolate: dimension mismatch");
    if (!layout_.contains(p)) return ExtendedValue::infinity();

    int base[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < m; ++a) {
        const AxisGrid& g = layout_.axis(a);
        double t = (p[a] - g.lo) / g.step;
        int i = static_cast<int>(std::floor(t));
        i = std::clamp(i, 0, g.count - 2 >= 0 ? g.count - 2 : 0);
        base[a] = i;
        frac[a] = std::clamp(t - i, 0.0, 1.0);
    }

    double acc = 0.0;
    const int corners = 1 << m;
    for (int c = 0; c < corners; ++c) {
        int multi[3];
        double w = 1.0;
        for (int a = 0; a < m; ++a) {
            const int bit = (c >> a) & 1;
            const AxisGrid& g = layout_.axis(a);
            multi[a] = std::min(base[a] + bit, g.count - 1);
            w *= bit ? frac[a] : 1.0 - frac[a];
        }
        std::int64_t lin = layout_.linear_index(multi);
        if (!is_finite(lin)) {
            if (w > 0.0) return ExtendedValue::infinity();
            continue;
        }
        acc += w * raw(lin);
    }
    return ExtendedValue::finite(acc);
}

namespace {

// Direction set for line scans: axis units plus +/- diagonals, first
// nonzero component positive.
std::vector<std::array<int, 3>> line_directions(int m) {
    std::vector<std::array<int, 3>> dirs;
    const int lo = -1, hi = 1;
    std::array<int, 3> d{0, 0, 0};
    for (int x = lo; x <= hi; ++x)
        for (int y = (m >= 2 ? lo : 0); y <= (m >= 2 ? hi : 0); ++y)
            for (int z = (m >= 3 ? lo : 0); z <= (m >= 3 ? hi : 0); ++z) {
                d = {x, y, z};
                int first = 0;
                for (int a = 0; a < m; ++a)
                    if (d[static_cast<std::size_t>(a)] != 0) {
                        first = d[static_cast<std::size_t>(a)];
                        break;
                    }
                if (first > 0) dirs.push_back(d);
            }
    return dirs;
}

}  // namespace

ConvexityReport SampledConvexFunction::check_convexity() const {
    ConvexityReport rep;
    const int m = dim();
    const auto dirs = line_directions(m);
    int counts[3] = {1, 1, 1};
    for (int a = 0; a < m; ++a) counts[a] = layout_.axis(a).count;

    auto in_range = [&](const int* multi) {
        for (int a = 0; a < m; ++a)
            if (multi[a] < 0 || multi[a] >= counts[a]) return false;
        return true;
    };

    for (const auto& d : dirs) {
        // Enumerate line starts: nodes with no predecessor along d.
        int multi[3];
        for (std::int64_t lin = 0; lin < node_count(); ++lin) {
            layout_.multi_index(lin, multi);
            int prev[3];
            for (int a = 0; a < m; ++a) prev[a] = multi[a] - d[static_cast<std::size_t>(a)];
            if (in_range(prev)) continue;  // not a line start

            // Walk the line; check midpoint convexity and finite contiguity.
            int cur[3] = {multi[0], multi[1], multi[2]};
            int runs = 0;
            bool in_run = false;
            double vm2 = 0.0, vm1 = 0.0;
            int seen = 0;
            std::int64_t prev_lin = -1;
            while (in_range(cur)) {
                std::int64_t cl = layout_.linear_index(cur);
                bool fin = is_finite(cl);
                if (fin && !in_run) {
                    ++runs;
                    in_run = true;
                } else if (!fin) {
                    in_run = false;
                }
                if (fin) {
                    double v = raw(cl);
                    if (seen >= 2) {
                        double scale = std::max({1.0, std::fabs(vm2), std::fabs(vm1), std::fabs(v)});
                        double margin = vm2 + v - 2.0 * vm1;  // >= 0 for convex samples
                        if (margin < -1e-12 * scale) {
                            rep.midpoint_convex = false;
                            if (margin / scale < rep.worst_violation) {
                                rep.worst_violation = margin / scale;
                                rep.worst_node = prev_lin;
                            }
                        }
                    }
                    vm2 = vm1;
                    vm1 = v;
                    seen = std::min(seen + 1, 2);
                } else {
                    seen = 0;
                }
                prev_lin = cl;
                for (int a = 0; a < m; ++a) cur[a] += d[static_cast<std::size_t>(a)];
            }
            if (runs > 1) rep.finite_set_line_convex = false;
        }
    }
    return rep;
}

namespace {
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

void SampledConvexFunction::write_csv(std::ostream& os) const {
    const int m = dim();
    for (int a = 0; a < m; ++a) os << "x" << a << ",";
    os << "value,finite\n";
    for (std::int64_t lin = 0; lin < node_count(); ++lin) {
        TensorPoint p = layout_.coords_linear(lin);
        for (int a = 0; a < m; ++a) os << fmt17(p[a]) << ",";
        if (is_finite(lin))
            os << fmt17(raw(lin)) << ",1\n";
        else
            os << "inf,0\n";
    }
}

void SampledConvexFunction::write_csv_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot open for write: " + path);
    write_csv(os);
}

SampledConvexFunction SampledConvexFunction::read_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw UsageError("read_csv: empty input");
    int m = 0;
    {
        std::stringstream ss(header);
        std::string col;
        while (std::getline(ss, col, ',')) {
            if (!col.empty() && col[0] == 'x') ++m;
        }
    }
    if (m < 1 || m > 3) throw UsageError("read_csv: bad header");

    std::vector<std::vector<double>> coords(static_cast<std::size_t>(m));
    std::vector<double> vals;
    std::vector<std::uint8_t> fins;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        for (int a = 0; a < m; ++a) {
            if (!std::getline(ss, cell, ',')) throw UsageError("read_csv: short row");
            coords[static_cast<std::size_t>(a)].push_back(std::stod(cell));
        }
        if (!std::getline(ss, cell, ',')) throw UsageError("read_csv: short row");
        std::string vcell = cell;
        if (!std::getline(ss, cell, ',')) throw UsageError("read_csv: short row");
        int flag = std::stoi(cell);
        if (flag) {
            vals.push_back(std::stod(vcell));
            fins.push_back(1);
        } else {
            vals.push_back(0.0);
            fins.push_back(0);
        }
    }

    // Recover the axis grids from the lexicographic node stream.
    std::vector<AxisGrid> axes(static_cast<std::size_t>(m));
    std::int64_t rows = static_cast<std::int64_t>(vals.size());
    std::int64_t stride = 1;
    for (int a = m - 1; a >= 0; --a) {
        const auto& c = coords[static_cast<std::size_t>(a)];
        AxisGrid g;
        g.lo = c[0];
        int count = 1;
        if (a == m - 1) {
            while (count < rows && c[static_cast<std::size_t>(count)] > c[static_cast<std::size_t>(count - 1)]) ++count;
        } else {
            std::int64_t below = stride;
            while (count * below < rows &&
                   c[static_cast<std::size_t>(count * below)] > c[static_cast<std::size_t>((count - 1) * below)])
                ++count;
        }
        g.count = count;
        g.step = count > 1 ? (c[static_cast<std::size_t>((count - 1) * stride)] - g.lo) / (count - 1) : 1.0;
        axes[static_cast<std::size_t>(a)] = g;
        stride *= count;
    }
    GridLayout layout(axes);
    if (layout.node_count() != rows) throw UsageError("read_csv: row count does not match grid");

    SampledConvexFunction f(layout);
    for (std::int64_t lin = 0; lin < rows; ++lin) {
        if (fins[static_cast<std::size_t>(lin)])
            f.set_finite(lin, vals[static_cast<std::size_t>(lin)]);
        else
            f.set_infinite(lin);
    }
    return f;
}

SampledConvexFunction SampledConvexFunction::read_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open for read: " + path);
    return read_csv(is);
}

}  // namespace varidual
