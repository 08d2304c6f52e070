#include "varidual/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "varidual/errors.hpp"

namespace varidual {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_field_csv(const Field& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot open for write: " + path);
    const GridDomain& d = *f.dom;
    if (d.n == 1)
        os << "i,x,value\n";
    else
        os << "i,j,x,y,value\n";
    for (int i = 0; i < d.total(0); ++i) {
        for (int j = 0; j < (d.n == 2 ? d.total(1) : 1); ++j) {
            if (d.n == 1)
                os << i << "," << format_double(d.coord(0, i)) << "," << format_double(f.at(i)) << "\n";
            else
                os << i << "," << j << "," << format_double(d.coord(0, i)) << "," << format_double(d.coord(1, j))
                   << "," << format_double(f.at(i, j)) << "\n";
        }
    }
}

Field read_field_csv(std::shared_ptr<const GridDomain> dom, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open for read: " + path);
    std::string line;
    if (!std::getline(is, line)) throw UsageError("empty field csv: " + path);
    Field f(std::move(dom));
    const GridDomain& d = *f.dom;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        std::size_t expect = d.n == 1 ? 3 : 5;
        if (cells.size() != expect) throw UsageError("bad field csv row in " + path);
        if (row >= f.values.size()) throw UsageError("too many rows in " + path);
        f.values[row++] = std::stod(cells.back());
    }
    if (row != f.values.size()) throw UsageError("row count mismatch in " + path);
    return f;
}

void write_gradient_csv(const GradientField& g, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot open for write: " + path);
    const GridDomain& d = *g.dom;
    const int m = d.m();
    if (d.n == 1)
        os << "i,x";
    else
        os << "i,j,x,y";
    for (int c = 0; c < m; ++c) os << ",c" << c;
    os << "\n";
    const int lo = d.stencil_lo();
    for (int i = lo; i < lo + d.stencil_count(0); ++i) {
        for (int j = (d.n == 2 ? lo : 0); j < (d.n == 2 ? lo + d.stencil_count(1) : 1); ++j) {
            TensorPoint t = g.at(d.stencil_index(i, d.n == 2 ? j : 0));
            if (d.n == 1)
                os << i << "," << format_double(d.coord(0, i));
            else
                os << i << "," << j << "," << format_double(d.coord(0, i)) << "," << format_double(d.coord(1, j));
            for (int c = 0; c < m; ++c) os << "," << format_double(t[c]);
            os << "\n";
        }
    }
}

GradientField read_gradient_csv(std::shared_ptr<const GridDomain> dom, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open for read: " + path);
    std::string line;
    if (!std::getline(is, line)) throw UsageError("empty gradient csv: " + path);
    GradientField g(std::move(dom));
    const GridDomain& d = *g.dom;
    const int m = d.m();
    std::int64_t row = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        std::size_t coords = d.n == 1 ? 2 : 4;
        if (cells.size() != coords + static_cast<std::size_t>(m)) throw UsageError("bad gradient csv row in " + path);
        if (row >= d.stencil_node_count()) throw UsageError("too many rows in " + path);
        TensorPoint t = TensorPoint::zeros(m);
        for (int c = 0; c < m; ++c) t[c] = std::stod(cells[coords + static_cast<std::size_t>(c)]);
        g.set(row++, t);
    }
    if (row != d.stencil_node_count()) throw UsageError("row count mismatch in " + path);
    return g;
}

void write_schedule_csv(const std::vector<SolveReport>& reports, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot open for write: " + path);
    os << "j,f_j,iters,residual,ekeland_distance\n";
    for (const SolveReport& r : reports) {
        os << r.j << "," << format_double(r.f) << "," << r.iters << "," << format_double(r.residual) << ","
           << format_double(r.has_reference ? r.ekeland_distance : 0.0) << "\n";
    }
}

}  // namespace varidual
