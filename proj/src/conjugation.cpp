#include "varidual/conjugation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace varidual {

namespace {

// Finite nodes of a sampled function, ascending linear index, with
// weight-premultiplied coordinates so both conjugation paths evaluate the
// identical floating-point expression.
struct Candidates {
    int m = 1;
    std::vector<double> wc;       // m weighted coordinates per node
    std::vector<double> value;    // F at node
    std::vector<double> norm2;    // weighted squared norm of the node
    std::vector<std::int64_t> idx;

    std::size_t size() const { return value.size(); }
};

Candidates pack_finite(const SampledConvexFunction& f) {
    Candidates c;
    c.m = f.dim();
    for (std::int64_t lin = 0; lin < f.node_count(); ++lin) {
        if (!f.is_finite(lin)) continue;
        TensorPoint p = f.layout().coords_linear(lin);
        for (int a = 0; a < c.m; ++a) c.wc.push_back(p.weight(a) * p[a]);
        c.value.push_back(f.raw(lin));
        c.norm2.push_back(p.norm2());
        c.idx.push_back(lin);
    }
    return c;
}

// The one candidate-value expression: <xi, z> - F(xi) with the weighted dot
// accumulated in ascending axis order.
inline double cand_value(const double* wc, const double* z, int m, double f) {
    double s = wc[0] * z[0];
    for (int a = 1; a < m; ++a) s += wc[a] * z[a];
    return s - f;
}

struct Best {
    double v = 0.0;
    double n2 = 0.0;
    std::int64_t idx = -1;
    bool valid = false;
};

// Total order: larger value, then smaller weighted norm, then smaller index.
inline void consider(Best& b, double v, double n2, std::int64_t idx) {
    if (!b.valid || v > b.v || (v == b.v && (n2 < b.n2 || (n2 == b.n2 && idx < b.idx)))) {
        b.v = v;
        b.n2 = n2;
        b.idx = idx;
        b.valid = true;
    }
}

void require_nonempty(const Candidates& c) {
    if (c.size() == 0) throw UsageError("conjugate: primal has no finite node");
}

ConjugatePair assemble(const SampledConvexFunction& f, const GridLayout& dual_grid,
                       std::vector<double>&& dual_values, std::vector<std::int64_t>&& argmax) {
    ConjugatePair pair;
    pair.primal = f;
    pair.dual = SampledConvexFunction(dual_grid);
    for (std::int64_t i = 0; i < dual_grid.node_count(); ++i)
        pair.dual.set_finite(i, dual_values[static_cast<std::size_t>(i)]);
    pair.argmax = std::move(argmax);
    return pair;
}

}  // namespace

ConjugatePair conjugate_brute(const SampledConvexFunction& f, const GridLayout& dual_grid) {
    if (dual_grid.dim() != f.dim()) throw UsageError("conjugate: dual grid dimension mismatch");
    Candidates c = pack_finite(f);
    require_nonempty(c);
    const int m = c.m;

    std::vector<double> out(static_cast<std::size_t>(dual_grid.node_count()));
    std::vector<std::int64_t> arg(static_cast<std::size_t>(dual_grid.node_count()));
    for (std::int64_t dz = 0; dz < dual_grid.node_count(); ++dz) {
        TensorPoint zp = dual_grid.coords_linear(dz);
        double z[3] = {0, 0, 0};
        for (int a = 0; a < m; ++a) z[a] = zp[a];
        Best b;
        for (std::size_t i = 0; i < c.size(); ++i)
            consider(b, cand_value(&c.wc[i * static_cast<std::size_t>(m)], z, m, c.value[i]), c.norm2[i], c.idx[i]);
        out[static_cast<std::size_t>(dz)] = b.v;
        arg[static_cast<std::size_t>(dz)] = b.idx;
    }
    return assemble(f, dual_grid, std::move(out), std::move(arg));
}

namespace {

// One-dimensional monotone-argmax transform over a contiguous band of
// candidates. `zs` are the dual coordinates of one grid line (ascending),
// and the candidate value at (cand i, dual j) must be computed through the
// shared expression. The scan window is widened at both edges while
// candidate values stay within a small margin of the window maximum, so
// every candidate that can win a floating-point tie is examined; outside the
// margin, midpoint convexity of the samples keeps values strictly below the
// computed maximum.
struct Line1D {
    const Candidates* cand;
    std::size_t cand_begin, cand_end;  // [begin, end) band within cand arrays
    const double* zs;                  // dual coordinate per output slot (varying axis)
    double z_fixed[3];                 // remaining dual coordinates
    int vary_axis;                     // which dual axis varies along the line
    Best* out;                         // one Best per output slot

    double z_buf[3];

    double value_at(std::size_t ci, double zv) {
        z_buf[0] = z_fixed[0];
        z_buf[1] = z_fixed[1];
        z_buf[2] = z_fixed[2];
        z_buf[vary_axis] = zv;
        const int m = cand->m;
        return cand_value(&cand->wc[ci * static_cast<std::size_t>(m)], z_buf, m, cand->value[ci]);
    }

    // Scans [lo, hi] (positions into the candidate band), expands both edges
    // by the margin rule, and reports the tie range of the computed maximum.
    void scan_row(std::size_t j, std::size_t lo, std::size_t hi, std::size_t* tie_lo, std::size_t* tie_hi) {
        const double zv = zs[j];
        Best b;
        std::size_t scan_lo = lo, scan_hi = hi;
        for (std::size_t i = lo; i <= hi; ++i) consider(b, value_at(i, zv), cand->norm2[i], cand->idx[i]);

        auto margin = [&]() { return 1e-11 * std::max(1.0, std::fabs(b.v)); };
        while (scan_lo > cand_begin) {
            double v = value_at(scan_lo - 1, zv);
            if (v < b.v - margin()) break;
            --scan_lo;
            consider(b, v, cand->norm2[scan_lo], cand->idx[scan_lo]);
        }
        while (scan_hi + 1 < cand_end) {
            ++scan_hi;
            double v = value_at(scan_hi, zv);
            consider(b, v, cand->norm2[scan_hi], cand->idx[scan_hi]);
            if (v < b.v - margin()) {
                break;
            }
        }

        // Tie range of the bit-equal maximum within the scanned stretch.
        std::size_t tl = scan_lo, th = scan_hi;
        while (tl <= scan_hi && value_at(tl, zv) != b.v) ++tl;
        while (th > tl && value_at(th, zv) != b.v) --th;
        *tie_lo = tl;
        *tie_hi = th;
        out[j] = b;
    }

    void solve(std::size_t jlo, std::size_t jhi, std::size_t clo, std::size_t chi) {
        if (jlo > jhi) return;
        std::size_t mid = jlo + (jhi - jlo) / 2;
        std::size_t tl = 0, th = 0;
        scan_row(mid, clo, chi, &tl, &th);
        if (mid > jlo) solve(jlo, mid - 1, clo, th);
        if (mid < jhi) solve(mid + 1, jhi, tl, chi);
    }
};

void transform_line(const Candidates& cand, std::size_t cb, std::size_t ce, const double* zs, std::size_t nz,
                    const double* z_fixed, int vary_axis, Best* out) {
    Line1D line;
    line.cand = &cand;
    line.cand_begin = cb;
    line.cand_end = ce;
    line.zs = zs;
    line.z_fixed[0] = z_fixed[0];
    line.z_fixed[1] = z_fixed[1];
    line.z_fixed[2] = z_fixed[2];
    line.vary_axis = vary_axis;
    line.out = out;
    line.solve(0, nz - 1, cb, ce - 1);
}

}  // namespace

ConjugatePair conjugate_fast(const SampledConvexFunction& f, const GridLayout& dual_grid) {
    if (dual_grid.dim() != f.dim()) throw UsageError("conjugate: dual grid dimension mismatch");
    const int m = f.dim();
    if (m == 3) return conjugate_brute(f, dual_grid);  // small grids only at m=3

    Candidates c = pack_finite(f);
    require_nonempty(c);

    std::vector<double> out(static_cast<std::size_t>(dual_grid.node_count()));
    std::vector<std::int64_t> arg(static_cast<std::size_t>(dual_grid.node_count()));

    const AxisGrid& last = dual_grid.axis(m - 1);
    std::vector<double> zs(static_cast<std::size_t>(last.count));
    for (int j = 0; j < last.count; ++j) zs[static_cast<std::size_t>(j)] = last.coord(j);

    if (m == 1) {
        std::vector<Best> best(zs.size());
        double zfix[3] = {0, 0, 0};
        transform_line(c, 0, c.size(), zs.data(), zs.size(), zfix, 0, best.data());
        for (std::size_t j = 0; j < zs.size(); ++j) {
            out[j] = best[j].v;
            arg[j] = best[j].idx;
        }
        return assemble(f, dual_grid, std::move(out), std::move(arg));
    }

    // m == 2: candidates grouped by primal rows (fixed axis-0 coordinate,
    // contiguous in the packed array), transformed against each dual row.
    std::vector<std::pair<std::size_t, std::size_t>> rows;  // [begin, end) bands
    {
        std::size_t i = 0;
        const std::int64_t cols = f.layout().axis(1).count;
        while (i < c.size()) {
            std::size_t jx = i + 1;
            std::int64_t row0 = c.idx[i] / cols;
            while (jx < c.size() && c.idx[jx] / cols == row0) ++jx;
            rows.emplace_back(i, jx);
            i = jx;
        }
    }

    const AxisGrid& dual0 = dual_grid.axis(0);
    std::vector<Best> total(zs.size());
    std::vector<Best> rowbest(zs.size());
    for (int j0 = 0; j0 < dual0.count; ++j0) {
        double zfix[3] = {dual0.coord(j0), 0.0, 0.0};
        for (auto& b : total) b = Best{};
        for (const auto& band : rows) {
            transform_line(c, band.first, band.second, zs.data(), zs.size(), zfix, 1, rowbest.data());
            for (std::size_t j1 = 0; j1 < zs.size(); ++j1) {
                const Best& rb = rowbest[j1];
                consider(total[j1], rb.v, rb.n2, rb.idx);
            }
        }
        for (std::size_t j1 = 0; j1 < zs.size(); ++j1) {
            std::size_t lin = static_cast<std::size_t>(j0) * zs.size() + j1;
            out[lin] = total[j1].v;
            arg[lin] = total[j1].idx;
        }
    }
    return assemble(f, dual_grid, std::move(out), std::move(arg));
}

SampledConvexFunction biconjugate(const ConjugatePair& pair, const GridLayout& primal_query_grid) {
    ConjugatePair back = conjugate_fast(pair.dual, primal_query_grid);
    return back.dual;
}

SampledConvexFunction trim_dual_to_witnessed_slopes(const SampledConvexFunction& primal,
                                                    const SampledConvexFunction& dual) {
    const int m = primal.dim();
    if (dual.dim() != m) throw UsageError("trim: dimension mismatch");

    double slope_hi[3], slope_lo[3];
    bool hi_bounded[3] = {false, false, false}, lo_bounded[3] = {false, false, false};
    for (int a = 0; a < m; ++a) {
        slope_hi[a] = -1e308;
        slope_lo[a] = 1e308;
    }

    const GridLayout& g = primal.layout();
    int counts[3] = {1, 1, 1};
    for (int a = 0; a < m; ++a) counts[a] = g.axis(a).count;

    // Scan every axis-parallel line of the primal.
    for (int a = 0; a < m; ++a) {
        const double w = TensorPoint::component_weight(m, a);
        const double step = g.axis(a).step;
        int multi[3] = {0, 0, 0};
        for (std::int64_t lin = 0; lin < g.node_count(); ++lin) {
            g.multi_index(lin, multi);
            if (multi[a] != 0) continue;  // enumerate each line once
            int first = -1, last = -1;
            int probe[3] = {multi[0], multi[1], multi[2]};
            for (int i = 0; i < counts[a]; ++i) {
                probe[a] = i;
                if (primal.is_finite(g.linear_index(probe))) {
                    if (first < 0) first = i;
                    last = i;
                }
            }
            if (first < 0 || last == first) continue;
            if (last == counts[a] - 1) {
                // finite region reaches the high box face: witnessed slope
                probe[a] = last;
                double v1 = primal.raw(g.linear_index(probe));
                probe[a] = last - 1;
                double v0 = primal.raw(g.linear_index(probe));
                hi_bounded[a] = true;
                slope_hi[a] = std::max(slope_hi[a], (v1 - v0) / step / w);
            }
            if (first == 0) {
                probe[a] = 0;
                double v0 = primal.raw(g.linear_index(probe));
                probe[a] = 1;
                double v1 = primal.raw(g.linear_index(probe));
                lo_bounded[a] = true;
                slope_lo[a] = std::min(slope_lo[a], (v1 - v0) / step / w);
            }
        }
    }

    SampledConvexFunction trimmed = dual;
    for (std::int64_t lin = 0; lin < dual.node_count(); ++lin) {
        if (!dual.is_finite(lin)) continue;
        TensorPoint z = dual.layout().coords_linear(lin);
        for (int a = 0; a < m; ++a) {
            double tol_hi = 1e-9 * (1.0 + std::fabs(slope_hi[a]));
            double tol_lo = 1e-9 * (1.0 + std::fabs(slope_lo[a]));
            if ((hi_bounded[a] && z[a] > slope_hi[a] + tol_hi) || (lo_bounded[a] && z[a] < slope_lo[a] - tol_lo)) {
                trimmed.set_infinite(lin);
                break;
            }
        }
    }
    return trimmed;
}

DemiCoercivityResult check_demi_coercivity(const SampledConvexFunction& dual, const TensorPoint& x0, double r) {
    if (!(r > 0.0)) throw UsageError("check_demi_coercivity: need r > 0");
    if (x0.dim() != dual.dim()) throw UsageError("check_demi_coercivity: dimension mismatch");
    if (dual.finite_count() == 0) throw UsageError("check_demi_coercivity: empty finite region");

    DemiCoercivityResult res;
    const int m = dual.dim();
    const GridLayout& g = dual.layout();

    // Extrapolation check: where the finite region reaches the grid box, the
    // outward slope of G = F* - <x0,.> must support growth >= r per unit of
    // |xi| (at most sqrt(weight) per coordinate step).
    int counts[3] = {1, 1, 1};
    for (int a = 0; a < m; ++a) counts[a] = g.axis(a).count;
    auto G = [&](std::int64_t lin) {
        TensorPoint xi = g.coords_linear(lin);
        return dual.raw(lin) - x0.dot(xi);
    };

    for (int a = 0; a < m; ++a) {
        const double step = g.axis(a).step;
        const double need = r * std::sqrt(TensorPoint::component_weight(m, a));
        const double tol = 1e-9 * (1.0 + need);
        int multi[3] = {0, 0, 0};
        for (std::int64_t lin = 0; lin < g.node_count(); ++lin) {
            g.multi_index(lin, multi);
            if (multi[a] != 0) continue;
            int first = -1, last = -1;
            int probe[3] = {multi[0], multi[1], multi[2]};
            for (int i = 0; i < counts[a]; ++i) {
                probe[a] = i;
                if (dual.is_finite(g.linear_index(probe))) {
                    if (first < 0) first = i;
                    last = i;
                }
            }
            if (first < 0) continue;
            if (last == counts[a] - 1 && last > first) {
                probe[a] = last;
                std::int64_t l1 = g.linear_index(probe);
                probe[a] = last - 1;
                std::int64_t l0 = g.linear_index(probe);
                double slope = (G(l1) - G(l0)) / step;
                if (slope < need - tol) {
                    res.witness_axis = a;
                    res.witnessed_slope = slope;
                    res.witness_node = l1;
                    return res;
                }
            }
            if (first == 0 && last > first) {
                probe[a] = 0;
                std::int64_t l0 = g.linear_index(probe);
                probe[a] = 1;
                std::int64_t l1 = g.linear_index(probe);
                double slope = (G(l0) - G(l1)) / step;  // outward, toward -axis
                if (slope < need - tol) {
                    res.witness_axis = a;
                    res.witnessed_slope = slope;
                    res.witness_node = l0;
                    return res;
                }
            }
        }
    }

    double c = 1e308;
    for (std::int64_t lin = 0; lin < dual.node_count(); ++lin) {
        if (!dual.is_finite(lin)) continue;
        TensorPoint xi = g.coords_linear(lin);
        c = std::min(c, dual.raw(lin) - x0.dot(xi) - r * xi.norm());
    }

    res.success = true;
    res.certificate.x0 = x0;
    res.certificate.r = r;
    res.certificate.c = c;
    return res;
}

}  // namespace varidual
