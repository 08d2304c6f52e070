#include "varidual/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>

#include "json.hpp"

namespace varidual {

double ScheduleRule::eval(int j) const {
    if (name == "inv_cube") return scale / (static_cast<double>(j) * j * j);
    if (name == "inv_jminus1") return scale / (j - 1.0);
    throw UsageError("ScheduleRule: unknown rule '" + name + "'");
}

void ApproximationSchedule::validate() const {
    if (j_start < 2) throw UsageError("schedule: j_start must be >= 2 (mu_j has a pole at j = 1)");
    if (j_end < j_start) throw UsageError("schedule: j_end must be >= j_start");
    if (quadrature_order < 3) throw UsageError("schedule: quadrature_order must be >= 3");
    for (int j = j_start; j <= j_end; ++j) {
        if (!(delta(j) > 0.0) || !(mu(j) > 0.0)) throw UsageError("schedule: delta_j and mu_j must be positive");
        if (j > j_start) {
            if (!(delta(j) < delta(j - 1)) || !(mu(j) < mu(j - 1)))
                throw UsageError("schedule: delta_j and mu_j must be decreasing");
        }
        if (j < j_end) {
            double chain = mu(j + 1) + j * delta(j) - mu(j);
            if (chain > 0.0) throw UsageError("schedule: chain inequality mu_{j+1} + j*delta_j <= mu_j violated");
        }
    }
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
// Legendre recurrence.
void gauss_legendre(int n, std::vector<double>* nodes, std::vector<double>* weights) {
    nodes->assign(static_cast<std::size_t>(n), 0.0);
    weights->assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        (*nodes)[static_cast<std::size_t>(n - 1 - i)] = x;
        (*weights)[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

double bump_kernel(const double* s, int m) {
    double n2 = 0.0;
    for (int a = 0; a < m; ++a) n2 += TensorPoint::component_weight(m, a) * s[a] * s[a];
    if (n2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - n2));
}

}  // namespace

const MollifierRule& mollifier_rule(int m, int order) {
    static std::map<std::pair<int, int>, MollifierRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(m, order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<double> nodes, weights;
    gauss_legendre(order, &nodes, &weights);

    MollifierRule rule;
    rule.m = m;
    rule.order = order;
    const std::size_t total = static_cast<std::size_t>(std::pow(order, m));
    double mass = 0.0;
    for (std::size_t lin = 0; lin < total; ++lin) {
        std::size_t rest = lin;
        double s[3] = {0, 0, 0};
        double w = 1.0;
        for (int a = m - 1; a >= 0; --a) {
            std::size_t i = rest % static_cast<std::size_t>(order);
            rest /= static_cast<std::size_t>(order);
            s[a] = nodes[i];
            w *= weights[i];
        }
        double k = bump_kernel(s, m);
        for (int a = 0; a < m; ++a) rule.offsets.push_back(s[a]);
        rule.weights.push_back(w * k);
        mass += w * k;
    }
    for (auto& w : rule.weights) w /= mass;
    return cache.emplace(key, std::move(rule)).first->second;
}

namespace {

void require_ball_coverage(const GridLayout& dual_grid, double j) {
    for (int a = 0; a < dual_grid.dim(); ++a) {
        double reach = j / std::sqrt(TensorPoint::component_weight(dual_grid.dim(), a));
        double tol = 1e-9 * (1.0 + reach);
        if (dual_grid.axis(a).lo > -reach + tol || dual_grid.axis(a).hi() < reach - tol)
            throw GridTooSmallError("dual grid does not cover the truncation ball");
    }
}

bool in_ball(const TensorPoint& z, double j) { return z.norm() <= j * (1.0 + 1e-12); }

}  // namespace

double truncated_biconjugate(const ConjugatePair& pair, double j, const TensorPoint& xi) {
    if (!(j >= 1.0)) throw UsageError("truncated_biconjugate: need j >= 1");
    require_ball_coverage(pair.dual.layout(), j);
    if (xi.dim() != pair.dual.dim()) throw UsageError("truncated_biconjugate: dimension mismatch");

    const SampledConvexFunction& dual = pair.dual;
    const int m = dual.dim();
    double wxi[3] = {0, 0, 0};
    for (int a = 0; a < m; ++a) wxi[a] = xi.weight(a) * xi[a];

    bool found = false;
    double best = 0.0;
    for (std::int64_t lin = 0; lin < dual.node_count(); ++lin) {
        if (!dual.is_finite(lin)) continue;
        TensorPoint z = dual.layout().coords_linear(lin);
        if (!in_ball(z, j)) continue;
        double v = wxi[0] * z[0];
        for (int a = 1; a < m; ++a) v += wxi[a] * z[a];
        v -= dual.raw(lin);
        if (!found || v > best) {
            best = v;
            found = true;
        }
    }
    if (!found) throw UsageError("truncated_biconjugate: no finite dual node inside the ball");
    return best;
}

double TruncatedEnvelope::Hull::eval(double u) const {
    std::size_t lo = 0, hi = breakpoint.size();  // breakpoint[i] valid for i >= 1
    // last line whose breakpoint is <= u
    std::size_t idx = 0;
    lo = 1;
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (breakpoint[mid] <= u)
            lo = mid + 1;
        else
            hi = mid;
    }
    idx = lo - 1;
    return slope[idx] * u + intercept[idx];
}

TruncatedEnvelope::TruncatedEnvelope(const SampledConvexFunction& dual, double j) : m_(dual.dim()), j_(j) {
    require_ball_coverage(dual.layout(), j);

    auto build_hull = [](std::vector<double>& s, std::vector<double>& c) {
        // input sorted by slope ascending; keep the upper envelope
        std::vector<double> hs, hc;
        for (std::size_t i = 0; i < s.size(); ++i) {
            double si = s[i], ci = c[i];
            while (!hs.empty()) {
                if (hs.back() == si) {
                    if (hc.back() >= ci) goto skip_line;
                    hs.pop_back();
                    hc.pop_back();
                    continue;
                }
                if (hs.size() >= 2) {
                    double s1 = hs[hs.size() - 2], c1 = hc[hc.size() - 2];
                    double s2 = hs.back(), c2 = hc.back();
                    // middle line needed iff it rises above the outer pair
                    if ((s2 - s1) * (c1 - ci) <= (c1 - c2) * (si - s1)) {
                        hs.pop_back();
                        hc.pop_back();
                        continue;
                    }
                }
                break;
            }
            hs.push_back(si);
            hc.push_back(ci);
        skip_line:;
        }
        Hull h;
        h.slope = std::move(hs);
        h.intercept = std::move(hc);
        h.breakpoint.assign(h.slope.size(), 0.0);
        for (std::size_t i = 1; i < h.slope.size(); ++i)
            h.breakpoint[i] = (h.intercept[i - 1] - h.intercept[i]) / (h.slope[i] - h.slope[i - 1]);
        return h;
    };

    if (m_ == 3) {
        for (std::int64_t lin = 0; lin < dual.node_count(); ++lin) {
            if (!dual.is_finite(lin)) continue;
            TensorPoint z = dual.layout().coords_linear(lin);
            if (!in_ball(z, j)) continue;
            for (int a = 0; a < 3; ++a) wc_.push_back(z[a]);
            val_.push_back(dual.raw(lin));
        }
        if (val_.empty()) throw UsageError("TruncatedEnvelope: empty truncation ball");
        return;
    }

    if (m_ == 1) {
        std::vector<double> s, c;
        for (std::int64_t lin = 0; lin < dual.node_count(); ++lin) {
            if (!dual.is_finite(lin)) continue;
            TensorPoint z = dual.layout().coords_linear(lin);
            if (!in_ball(z, j)) continue;
            s.push_back(z[0]);
            c.push_back(-dual.raw(lin));
        }
        if (s.empty()) throw UsageError("TruncatedEnvelope: empty truncation ball");
        hulls_.push_back(build_hull(s, c));
        return;
    }

    // m == 2: one hull per dual row (fixed axis-0 coordinate)
    const GridLayout& g = dual.layout();
    for (int i0 = 0; i0 < g.axis(0).count; ++i0) {
        std::vector<double> s, c;
        for (int i1 = 0; i1 < g.axis(1).count; ++i1) {
            int multi[3] = {i0, i1, 0};
            std::int64_t lin = g.linear_index(multi);
            if (!dual.is_finite(lin)) continue;
            TensorPoint z = g.coords(multi);
            if (!in_ball(z, j)) continue;
            s.push_back(z[1]);
            c.push_back(-dual.raw(lin));
        }
        if (s.empty()) continue;
        Hull h = build_hull(s, c);
        h.offset_slope = g.axis(0).coord(i0);
        hulls_.push_back(std::move(h));
    }
    if (hulls_.empty()) throw UsageError("TruncatedEnvelope: empty truncation ball");
}

namespace {

const std::pair<std::vector<double>, std::vector<double>>& gl_rule(int order) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    std::pair<std::vector<double>, std::vector<double>> rule;
    gauss_legendre(order, &rule.first, &rule.second);
    return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace

double TruncatedEnvelope::mollified_eval_1d(double xi, double delta, int order) const {
    if (m_ != 1) throw UsageError("mollified_eval_1d: 1D only");
    if (order < 3) throw UsageError("mollified_eval_1d: quadrature order must be >= 3");
    const Hull& h = hulls_[0];
    const auto& [nodes, weights] = gl_rule(order);

    const double lo = xi - delta, hi = xi + delta;
    // panel boundaries: window ends plus every breakpoint inside
    // (breakpoint[0] is a placeholder; the array is ascending from index 1)
    std::vector<double> cuts{lo};
    if (h.breakpoint.size() > 1) {
        auto first = std::upper_bound(h.breakpoint.begin() + 1, h.breakpoint.end(), lo);
        for (auto it = first; it != h.breakpoint.end() && *it < hi; ++it) cuts.push_back(*it);
    }
    cuts.push_back(hi);

    double integral = 0.0, mass = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        double a = cuts[p], b = cuts[p + 1];
        if (!(b > a)) continue;
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            double t = mid + half * nodes[q];
            double s = (xi - t) / delta;
            double d2 = 1.0 - s * s;
            if (d2 <= 0.0) continue;
            double k = std::exp(-1.0 / d2) * half * weights[q];
            integral += k * h.eval(t);
            mass += k;
        }
    }
    return integral / mass;
}

double TruncatedEnvelope::eval(const TensorPoint& xi) const {
    if (xi.dim() != m_) throw UsageError("TruncatedEnvelope: dimension mismatch");
    if (m_ == 3) {
        double wxi[3];
        for (int a = 0; a < 3; ++a) wxi[a] = xi.weight(a) * xi[a];
        double best = -1e308;
        for (std::size_t i = 0; i < val_.size(); ++i) {
            double v = wxi[0] * wc_[3 * i] + wxi[1] * wc_[3 * i + 1] + wxi[2] * wc_[3 * i + 2] - val_[i];
            best = std::max(best, v);
        }
        return best;
    }
    if (m_ == 1) return hulls_[0].eval(xi[0]);
    double best = -1e308;
    for (const Hull& h : hulls_) best = std::max(best, h.offset_slope * xi[0] + h.eval(xi[1]));
    return best;
}

namespace {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t hash_sampled(const SampledConvexFunction& f, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (std::int64_t lin = 0; lin < f.node_count(); ++lin) {
        double v = f.is_finite(lin) ? f.raw(lin) : std::numeric_limits<double>::quiet_NaN();
        h = fnv1a(&v, sizeof v, h);
    }
    return h;
}

// Multilinear interpolation over a dense value array on a grid.
double lerp_grid(const GridLayout& g, const std::vector<double>& values, int stride, int component,
                 const TensorPoint& p) {
    const int m = g.dim();
    int base[3] = {0, 0, 0};
    double frac[3] = {0, 0, 0};
    for (int a = 0; a < m; ++a) {
        const AxisGrid& ax = g.axis(a);
        double t = (p[a] - ax.lo) / ax.step;
        int i = static_cast<int>(std::floor(t));
        i = std::clamp(i, 0, std::max(0, ax.count - 2));
        base[a] = i;
        frac[a] = std::clamp(t - i, 0.0, 1.0);
    }
    double acc = 0.0;
    for (int corner = 0; corner < (1 << m); ++corner) {
        int multi[3];
        double w = 1.0;
        for (int a = 0; a < m; ++a) {
            int bit = (corner >> a) & 1;
            multi[a] = std::min(base[a] + bit, g.axis(a).count - 1);
            w *= bit ? frac[a] : 1.0 - frac[a];
        }
        acc += w * values[static_cast<std::size_t>(g.linear_index(multi)) * static_cast<std::size_t>(stride) +
                          static_cast<std::size_t>(component)];
    }
    return acc;
}

}  // namespace

Approximant build_approximant(const ConjugatePair& pair, int j, const ApproximationSchedule& schedule,
                              const GridLayout& cache_grid) {
    schedule.validate();
    if (j < schedule.j_start || j > schedule.j_end) throw UsageError("build_approximant: j outside schedule range");
    const double delta = schedule.delta(j);
    const double mu = schedule.mu(j);
    for (int a = 0; a < cache_grid.dim(); ++a)
        if (cache_grid.axis(a).step > delta / 4.0 * (1.0 + 1e-12))
            throw CacheTooCoarseError("build_approximant: cache spacing must be <= delta_j / 4");

    Approximant ap;
    ap.j_ = j;
    ap.delta_ = delta;
    ap.mu_ = mu;
    ap.order_ = schedule.quadrature_order;
    ap.grid_ = cache_grid;
    ap.envelope_ = std::make_shared<TruncatedEnvelope>(pair.dual, static_cast<double>(j));
    ap.source_hash_ = hash_sampled(pair.dual, hash_sampled(pair.primal, 1469598103934665603ULL));

    const std::int64_t n = cache_grid.node_count();
    const int m = cache_grid.dim();
    ap.values_.resize(static_cast<std::size_t>(n));
    const TruncatedEnvelope& env = *ap.envelope_;
    for (std::int64_t lin = 0; lin < n; ++lin) {
        TensorPoint p = cache_grid.coords_linear(lin);
        double v = m == 1 ? env.mollified_eval_1d(p[0], delta, schedule.quadrature_order)
                          : mollify_point([&](const TensorPoint& q) { return env.eval(q); }, delta, p,
                                          schedule.quadrature_order);
        ap.values_[static_cast<std::size_t>(lin)] = v - mu;
    }

    // Central differences on the cache; one-sided at the box edge. The
    // result is clamped to the Lipschitz ball |d| <= j, which the true
    // derivative of F_j satisfies.
    ap.derivs_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(m), 0.0);
    int multi[3];
    for (std::int64_t lin = 0; lin < n; ++lin) {
        cache_grid.multi_index(lin, multi);
        TensorPoint d = TensorPoint::zeros(m);
        for (int a = 0; a < m; ++a) {
            const AxisGrid& ax = cache_grid.axis(a);
            int ip = std::min(multi[a] + 1, ax.count - 1);
            int im = std::max(multi[a] - 1, 0);
            int save = multi[a];
            multi[a] = ip;
            double vp = ap.values_[static_cast<std::size_t>(cache_grid.linear_index(multi))];
            multi[a] = im;
            double vm = ap.values_[static_cast<std::size_t>(cache_grid.linear_index(multi))];
            multi[a] = save;
            double span = (ip - im) * ax.step;
            d[a] = span > 0.0 ? (vp - vm) / span / TensorPoint::component_weight(m, a) : 0.0;
        }
        double nrm = d.norm();
        if (nrm > j) d = (j / nrm) * d;
        for (int a = 0; a < m; ++a)
            ap.derivs_[static_cast<std::size_t>(lin) * static_cast<std::size_t>(m) + static_cast<std::size_t>(a)] = d[a];
    }
    return ap;
}

double Approximant::value_slow(const TensorPoint& xi) const {
    const TruncatedEnvelope& env = *envelope_;
    if (grid_.dim() == 1) return env.mollified_eval_1d(xi[0], delta_, order_) - mu_;
    return mollify_point([&](const TensorPoint& q) { return env.eval(q); }, delta_, xi, order_) - mu_;
}

namespace {

// Cubic Hermite patch on one 1D cell; value and derivative come from the
// same coefficients, so the interpolated energy has an exact gradient.
struct HermiteCell {
    double v0, v1, d0, d1, step, t;

    double value() const {
        double t2 = t * t, t3 = t2 * t;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + t) * step * d0 + (-2.0 * t3 + 3.0 * t2) * v1 +
               (t3 - t2) * step * d1;
    }
    double slope() const {
        double t2 = t * t;
        return (6.0 * t2 - 6.0 * t) * (v0 - v1) / step + (3.0 * t2 - 4.0 * t + 1.0) * d0 + (3.0 * t2 - 2.0 * t) * d1;
    }
};

}  // namespace

bool Approximant::hermite_cell(const TensorPoint& xi, void* cell_out) const {
    if (grid_.dim() != 1 || !grid_.contains(xi)) return false;
    const AxisGrid& ax = grid_.axis(0);
    double t = (xi[0] - ax.lo) / ax.step;
    int i = std::clamp(static_cast<int>(std::floor(t)), 0, std::max(0, ax.count - 2));
    HermiteCell& c = *static_cast<HermiteCell*>(cell_out);
    c.v0 = values_[static_cast<std::size_t>(i)];
    c.v1 = values_[static_cast<std::size_t>(i + 1)];
    c.d0 = derivs_[static_cast<std::size_t>(i)];
    c.d1 = derivs_[static_cast<std::size_t>(i + 1)];
    c.step = ax.step;
    c.t = std::clamp(t - i, 0.0, 1.0);
    return true;
}

Approximant::Eval Approximant::value_checked(const TensorPoint& xi) const {
    HermiteCell cell;
    if (hermite_cell(xi, &cell)) return {cell.value(), false};
    if (grid_.contains(xi)) return {lerp_grid(grid_, values_, 1, 0, xi), false};
    return {value_slow(xi), true};
}

TensorPoint Approximant::derivative(const TensorPoint& xi) const {
    const int m = grid_.dim();
    HermiteCell cell;
    if (hermite_cell(xi, &cell)) {
        TensorPoint d(cell.slope());
        if (std::fabs(d[0]) > j_ * (1.0 + 1e-6)) d[0] = std::copysign(j_ * (1.0 + 1e-6), d[0]);
        return d;
    }
    if (grid_.contains(xi)) {
        TensorPoint d = TensorPoint::zeros(m);
        for (int a = 0; a < m; ++a) d[a] = lerp_grid(grid_, derivs_, m, a, xi);
        return d;
    }
    TensorPoint d = TensorPoint::zeros(m);
    for (int a = 0; a < m; ++a) {
        double h = grid_.axis(a).step;
        TensorPoint plus = xi, minus = xi;
        plus[a] += h;
        minus[a] -= h;
        d[a] = (value_slow(plus) - value_slow(minus)) / (2.0 * h) / TensorPoint::component_weight(m, a);
    }
    double nrm = d.norm();
    if (nrm > j_) d = (j_ / nrm) * d;
    return d;
}

SampledConvexFunction Approximant::cache_as_sampled() const {
    SampledConvexFunction f(grid_);
    for (std::int64_t lin = 0; lin < grid_.node_count(); ++lin) f.set_finite(lin, values_[static_cast<std::size_t>(lin)]);
    return f;
}

void Approximant::write_sidecar_json(const std::string& path) const {
    nlohmann::ordered_json js;
    js["j"] = j_;
    js["delta"] = delta_;
    js["mu"] = mu_;
    js["quadrature_order"] = order_;
    js["source_hash"] = source_hash_;
    std::ofstream os(path);
    if (!os) throw UsageError("cannot open for write: " + path);
    os << js.dump(2) << "\n";
}

ExtendedValue approximant_recession(const Approximant& a, const TensorPoint& xi) {
    bool have_prev = false;
    double prev = 0.0;
    for (int p = 0; p <= 40; ++p) {
        double t = std::ldexp(1.0, p);
        double v = a.value_slow(t * xi) / t;
        if (v > 1e12) return ExtendedValue::infinity();
        if (have_prev && std::fabs(v - prev) < 1e-10 * (1.0 + std::fabs(v))) return ExtendedValue::finite(v);
        prev = v;
        have_prev = true;
    }
    return ExtendedValue::infinity();
}

std::vector<ConvergenceRow> convergence_report(const IntegrandSpec& spec, const ConjugatePair& pair,
                                               const ApproximationSchedule& schedule,
                                               const std::vector<TensorPoint>& compact_set,
                                               const std::vector<TensorPoint>& probe_rays,
                                               const GridLayout& cache_grid) {
    schedule.validate();
    for (const TensorPoint& p : compact_set) {
        if (!evaluate(spec, p).is_finite() || !(boundary_distance(spec, p) > 0.0))
            throw UsageError("convergence_report: compact_set point outside dom(F)");
    }

    std::vector<ConvergenceRow> rows;
    for (int j = schedule.j_start; j <= schedule.j_end; ++j) {
        // Per-j cache at the spacing the smoothing radius requires.
        std::vector<double> radius, spacing;
        for (int a = 0; a < cache_grid.dim(); ++a) {
            radius.push_back(std::max(std::fabs(cache_grid.axis(a).lo), cache_grid.axis(a).hi()));
            spacing.push_back(std::min(cache_grid.axis(a).step, schedule.delta(j) / 4.0));
        }
        Approximant a = build_approximant(pair, j, schedule, GridLayout::centered(radius, spacing));

        ConvergenceRow row;
        row.j = j;
        for (const TensorPoint& p : compact_set) {
            double fj = a.value(p);
            double f = evaluate(spec, p).value();
            row.sup_value_gap = std::max(row.sup_value_gap, std::fabs(fj - f));
            TensorPoint dj = a.derivative(p);
            TensorPoint d = derivative(spec, p);
            row.sup_deriv_gap = std::max(row.sup_deriv_gap, (dj - d).norm());
        }
        for (const TensorPoint& ray : probe_rays) {
            ExtendedValue r = approximant_recession(a, ray);
            row.recession_at_rays.push_back(r.is_finite() ? r.value() : 1e300);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

PairGrids default_pair_grids(const IntegrandSpec& spec, int j_max, double dual_spacing_hint) {
    PairGrids g;
    g.dual_radius = j_max + 1.0;
    g.dual_spacing = dual_spacing_hint > 0.0 ? dual_spacing_hint : 0.005;
    switch (spec.kind()) {
        case IntegrandKind::quadratic:
            g.primal_radius = g.dual_radius + 3.0;
            g.primal_spacing = 0.005;
            break;
        case IntegrandKind::p_power: {
            double p = spec.params()[0];
            g.primal_radius = std::pow(g.dual_radius + 3.0, 1.0 / (p - 1.0)) + 1.0;
            g.primal_spacing = 0.005;
            break;
        }
        case IntegrandKind::minimal_surface:
            g.primal_radius = 80.0;  // witnesses slopes up to 1 - 1/(2*80^2)
            g.primal_spacing = 0.01;
            break;
        case IntegrandKind::log_barrier: {
            double r = spec.params()[0];
            g.primal_radius = 0.96 * r;  // slope ~ 24.5/r at the box edge
            g.primal_spacing = 0.0005 * r;
            break;
        }
        case IntegrandKind::abs_value:
            g.primal_radius = 4.0;
            g.primal_spacing = 0.001;
            break;
        case IntegrandKind::custom_sampled:
            break;  // primal grid comes from the samples themselves
    }
    return g;
}

ConjugatePair build_trimmed_pair(const IntegrandSpec& spec, const PairGrids& grids) {
    SampledConvexFunction primal =
        spec.kind() == IntegrandKind::custom_sampled
            ? *spec.samples()
            : sample(spec, GridLayout::centered(spec.dim(), grids.primal_radius, grids.primal_spacing));
    GridLayout dual_grid = GridLayout::centered(spec.dim(), grids.dual_radius, grids.dual_spacing);

    if (spec.has_closed_form_conjugate()) {
        // Catalog kinds: sample the analytic conjugate. A discretely
        // conjugated grid sample is piecewise linear with kinks at the
        // primal spacing, far too coarse for the smoothing sequence's
        // derivative; the analytic dual moves the kink period down to the
        // dual spacing, which the kernel attenuates.
        ConjugatePair pair;
        pair.primal = std::move(primal);
        pair.dual = SampledConvexFunction(dual_grid);
        for (std::int64_t lin = 0; lin < dual_grid.node_count(); ++lin)
            pair.dual.set(lin, conjugate_closed_form(spec, dual_grid.coords_linear(lin)));
        pair.argmax.assign(static_cast<std::size_t>(dual_grid.node_count()), -1);
        return pair;
    }

    ConjugatePair pair = conjugate_fast(primal, dual_grid);
    SampledConvexFunction trimmed = trim_dual_to_witnessed_slopes(primal, pair.dual);
    for (std::int64_t lin = 0; lin < trimmed.node_count(); ++lin)
        if (!trimmed.is_finite(lin)) pair.argmax[static_cast<std::size_t>(lin)] = -1;
    pair.dual = std::move(trimmed);
    return pair;
}

}  // namespace varidual
