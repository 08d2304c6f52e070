#include "varidual/verification.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"

namespace varidual {

FenchelRoutes analytic_routes(const IntegrandSpec& spec) {
    FenchelRoutes r;
    r.F = [spec](const TensorPoint& xi) { return evaluate(spec, xi); };
    r.Fstar = [spec](const TensorPoint& z) { return conjugate_closed_form(spec, z); };
    return r;
}

FenchelRoutes pair_routes(const ConjugatePair& pair) {
    FenchelRoutes r;
    SampledConvexFunction primal = pair.primal, dual = pair.dual;
    r.F = [primal](const TensorPoint& xi) { return primal.interpolate(xi); };
    r.Fstar = [dual](const TensorPoint& z) { return dual.interpolate(z); };
    r.dual_box = pair.dual.layout();
    return r;
}

FenchelRoutes approximant_routes(const Approximant& a, double dual_spacing) {
    if (a.cache_grid().dim() != 1) throw UsageError("approximant_routes: 1D only");
    SampledConvexFunction cache = a.cache_as_sampled();
    GridLayout dual_grid = GridLayout::centered(1, a.j() * (1.0 + 1e-9) + dual_spacing, dual_spacing);
    ConjugatePair conj = conjugate_fast(cache, dual_grid);
    SampledConvexFunction dual = conj.dual;

    FenchelRoutes r;
    // F_j through the cache; F_j* through the discrete conjugate of the cache.
    auto shared = std::make_shared<Approximant>(a);
    r.F = [shared](const TensorPoint& xi) { return ExtendedValue::finite(shared->value(xi)); };
    r.Fstar = [dual](const TensorPoint& z) { return dual.interpolate(z); };
    r.dual_box = dual_grid;
    return r;
}

DualityGapReport duality_gap(const FenchelRoutes& routes, const Field& u, const GradientField& sigma) {
    const GridDomain& d = *u.dom;
    if (!(*sigma.dom == d)) throw UsageError("duality_gap: domain mismatch");
    const double cell = d.n == 1 ? d.h : d.h * d.h;

    GradientField g = grad_k(u);
    DualityGapReport rep;
    rep.min_gap = 1e308;
    for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) {
        TensorPoint xi = g.at(s), z = sigma.at(s);
        if (routes.dual_box && !routes.dual_box->contains(z))
            throw DualBoxExceededError("duality_gap: sigma leaves the sampled dual box");
        ExtendedValue fs = routes.Fstar(z), fv = routes.F(xi);
        if (!fs.is_finite() || !fv.is_finite()) {
            rep.node_gap.push_back(1e300);
            rep.any_infinite = true;
            continue;
        }
        double gap = fs.value() + fv.value() - z.dot(xi);
        rep.node_gap.push_back(gap);
        rep.l1 += std::fabs(gap) * cell;
        rep.max_gap = std::max(rep.max_gap, gap);
        rep.min_gap = std::min(rep.min_gap, gap);
    }
    return rep;
}

namespace {

// C^2 compactly supported bump profile on |s| <= 1 (quintic smoothstep).
double quintic_bump(double s) {
    s = std::fabs(s);
    if (s >= 1.0) return 0.0;
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double trapezoid_bump(double s) {
    s = std::fabs(s);
    if (s >= 1.0) return 0.0;
    return std::min(1.0, 2.0 * (1.0 - s));
}

// Random compactly supported field: tensor-product bump with seeded centre,
// width and amplitude; zero outside the free region.
Field random_bump(const GridDomain& d, std::mt19937_64& rng, double amp_scale, bool allow_negative,
                  bool plateau_mix) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const bool plateau = plateau_mix && uni(rng) < 0.3;
    double span0 = d.inner[0] * d.h;
    double lo0 = d.coord(0, d.collar);
    double c0 = lo0 + uni(rng) * span0;
    double w0 = (0.08 + 0.4 * uni(rng)) * span0;
    double c1 = 0.0, w1 = 1.0, lo1 = 0.0, span1 = 0.0;
    if (d.n == 2) {
        span1 = d.inner[1] * d.h;
        lo1 = d.coord(1, d.collar);
        c1 = lo1 + uni(rng) * span1;
        w1 = (0.08 + 0.4 * uni(rng)) * span1;
    }
    double amp = (0.1 + 0.9 * uni(rng)) * amp_scale;
    if (allow_negative && uni(rng) < 0.5) amp = -amp;

    Field f(std::make_shared<GridDomain>(d));
    for (int i = 0; i < d.total(0); ++i) {
        for (int j = 0; j < (d.n == 2 ? d.total(1) : 1); ++j) {
            if (!d.is_free(i, j)) continue;
            double s0 = (d.coord(0, i) - c0) / w0;
            double v = plateau ? trapezoid_bump(s0) : quintic_bump(s0);
            if (d.n == 2) {
                double s1 = (d.coord(1, j) - c1) / w1;
                v *= plateau ? trapezoid_bump(s1) : quintic_bump(s1);
            }
            f.at(i, j) = amp * v;
        }
    }
    return f;
}

double grad_l1(const GradientField& g) {
    const GridDomain& d = *g.dom;
    const double cell = d.n == 1 ? d.h : d.h * d.h;
    double acc = 0.0;
    for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) acc += g.at(s).norm() * cell;
    return acc;
}

double field_l1(const Field& f) {
    const GridDomain& d = *f.dom;
    const double cell = d.n == 1 ? d.h : d.h * d.h;
    double acc = 0.0;
    for (double v : f.values) acc += std::fabs(v) * cell;
    return acc;
}

double field_amp_scale(const Field& g, const ConstraintSpec& c) {
    double m = 0.0;
    for (double v : g.values) m = std::max(m, std::fabs(v));
    if (c.kind == ConstraintSpec::Kind::obstacle)
        for (double v : c.psi.values) m = std::max(m, std::fabs(v));
    return 1.0 + m;
}

}  // namespace

ElReport el_inequality_test(const GradientField& sigma, const Field& u, const ConstraintSpec& c, const Field& g,
                            int n_dirs, std::uint64_t seed) {
    const GridDomain& d = *u.dom;
    const double cell = d.n == 1 ? d.h : d.h * d.h;
    std::mt19937_64 rng(seed);
    const double amp = field_amp_scale(g, c);
    const bool obstacle = c.kind == ConstraintSpec::Kind::obstacle;

    ElReport rep;
    rep.el_min = 1e308;
    rep.el_min_normalized = 1e308;

    auto consider = [&](const Field& v) {
        Field diff = v;
        for (std::size_t p = 0; p < diff.values.size(); ++p) diff.values[p] -= u.values[p];
        GradientField gd = grad_k(diff);
        double denom = grad_l1(gd);
        if (denom < 1e-300) return;
        double p = 0.0;
        for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) p += sigma.at(s).dot(gd.at(s)) * cell;
        rep.el_min = std::min(rep.el_min, p);
        rep.el_min_normalized = std::min(rep.el_min_normalized, p / denom);
        if (!obstacle) rep.abs_max_normalized = std::max(rep.abs_max_normalized, std::fabs(p) / denom);
        ++rep.directions;
    };

    // (ii) the boundary datum itself, when feasible.
    {
        bool feasible = true;
        if (obstacle)
            for (int i = 0; i < d.total(0) && feasible; ++i)
                for (int j = 0; j < (d.n == 2 ? d.total(1) : 1); ++j)
                    if (d.is_free(i, j) && g.at(i, j) < c.psi.at(i, j)) {
                        feasible = false;
                        break;
                    }
        if (feasible) consider(g);
    }

    int attempts = 0;
    while (rep.directions < n_dirs && attempts++ < 50 * n_dirs + 100) {
        Field bump = random_bump(d, rng, amp, true, false);

        // (i) v = u + t (w - u) with w a projected feasible field.
        Field w = g;
        for (std::size_t p = 0; p < w.values.size(); ++p) w.values[p] += bump.values[p];
        w = project_constraint(apply_dirichlet(w, g), c);
        for (double t : {1.0, 0.5, 0.25}) {
            Field v = u;
            for (std::size_t p = 0; p < v.values.size(); ++p) v.values[p] += t * (w.values[p] - u.values[p]);
            consider(v);
        }

        // (iii) obstacle: v = max(u + phi, psi) with signed bumps;
        // unconstrained: v = u +/- phi.
        for (double sgn : {1.0, -1.0}) {
            Field v = u;
            for (std::size_t p = 0; p < v.values.size(); ++p) v.values[p] += sgn * bump.values[p];
            v = project_constraint(apply_dirichlet(v, g), c);
            consider(v);
        }
    }
    return rep;
}

DivergenceReport divergence_residual(const GradientField& sigma, int n_test, std::uint64_t seed) {
    const GridDomain& d = *sigma.dom;
    const double cell = d.n == 1 ? d.h : d.h * d.h;
    std::mt19937_64 rng(seed);

    DivergenceReport rep;
    rep.one_sided_min = 1e308;
    rep.tests = n_test;

    for (int t = 0; t < n_test; ++t) {
        Field phi = random_bump(d, rng, 1.0, false, true);
        GradientField gphi = grad_k(phi);
        double norm = field_l1(phi) + grad_l1(gphi);
        if (norm < 1e-300) continue;
        double p = 0.0;
        for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) p += sigma.at(s).dot(gphi.at(s)) * cell;
        p /= norm;
        rep.weak_residual = std::max(rep.weak_residual, std::fabs(p));
        rep.one_sided_min = std::min(rep.one_sided_min, p);
    }

    Field div = divergence_k(sigma);
    for (int i = 0; i < d.total(0); ++i)
        for (int j = 0; j < (d.n == 2 ? d.total(1) : 1); ++j)
            if (d.is_free(i, j)) rep.pointwise_sup = std::max(rep.pointwise_sup, std::fabs(div.at(i, j)));
    return rep;
}

IntegrabilityReport integrability_report(const FenchelRoutes& routes, const Field& u, const GradientField& sigma) {
    const GridDomain& d = *u.dom;
    const double cell = d.n == 1 ? d.h : d.h * d.h;
    GradientField g = grad_k(u);

    IntegrabilityReport rep;
    for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) {
        TensorPoint z = sigma.at(s), xi = g.at(s);
        if (routes.dual_box && !routes.dual_box->contains(z))
            throw DualBoxExceededError("integrability_report: sigma leaves the sampled dual box");
        ExtendedValue fs = routes.Fstar(z);
        if (!fs.is_finite())
            rep.fstar_finite = false;
        else
            rep.norm_fstar_sigma_l1 += std::fabs(fs.value()) * cell;
        rep.norm_pairing_l1 += std::fabs(z.dot(xi)) * cell;
    }
    return rep;
}

EquiProfile equiintegrability_profile(const std::vector<GradientField>& sigmas, const std::vector<double>& thresholds) {
    if (thresholds.empty()) throw UsageError("equiintegrability_profile: empty thresholds");
    for (std::size_t t = 1; t < thresholds.size(); ++t)
        if (!(thresholds[t] > thresholds[t - 1])) throw UsageError("equiintegrability_profile: thresholds must increase");

    EquiProfile prof;
    prof.thresholds = thresholds;
    for (const GradientField& sig : sigmas) {
        const GridDomain& d = *sig.dom;
        const double cell = d.n == 1 ? d.h : d.h * d.h;
        std::vector<double> row;
        for (double T : thresholds) {
            double e = 0.0;
            for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) {
                double nrm = sig.at(s).norm();
                if (nrm > T) e += nrm * cell;
            }
            row.push_back(e);
        }
        prof.sup_at_max_threshold = std::max(prof.sup_at_max_threshold, row.back());
        prof.e.push_back(std::move(row));
    }
    return prof;
}

BvCheckReport bv_representation_check(const JumpField& uj, const IntegrandSpec& spec,
                                      const std::vector<double>& eps_schedule,
                                      const std::vector<double>& h_schedule) {
    if (eps_schedule.empty() || eps_schedule.size() != h_schedule.size())
        throw UsageError("bv_representation_check: schedules must be nonempty and aligned");
    uj.validate();
    const GridDomain& d0 = *uj.ac.dom;

    BvCheckReport rep;
    ExtendedValue target = bv_energy(uj, spec);
    rep.target_finite = target.is_finite();
    rep.target = target.value_or(0.0);

    double span = d0.stencil_count(0) * d0.h;
    for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
        double eps = eps_schedule[i], h = h_schedule[i];
        int inner = std::max(1, static_cast<int>(std::lround(span / h)) - d0.k);
        int collar = std::max(d0.collar, static_cast<int>(std::ceil(2.0 * eps / h)) + d0.k + 1);
        auto dom = std::make_shared<GridDomain>(1, d0.k, h, std::array<int, 2>{inner, 1}, collar);

        // Resample the density on the new grid (piecewise linear read).
        JumpField uh;
        uh.ac = Field(dom);
        for (int n = 0; n < dom->total(0); ++n) {
            double x = dom->coord(0, n);
            double t = x / d0.h + (d0.collar - d0.k);
            int p = static_cast<int>(std::floor(t));
            p = std::clamp(p, 0, d0.total(0) - 2);
            double fr = std::clamp(t - p, 0.0, 1.0);
            uh.ac.at(n) = (1.0 - fr) * uj.ac.at(p) + fr * uj.ac.at(p + 1);
        }
        uh.jumps = uj.jumps;

        Field rec = mollified_recovery(uh, eps);
        ExtendedValue e = energy(spec, rec);
        rep.rows.push_back({eps, h, e.value_or(1e300)});
    }

    if (rep.target_finite) {
        double last = rep.rows.back().energy;
        rep.final_rel_err = std::fabs(last - rep.target) / std::max(1e-300, std::fabs(rep.target));
    } else if (rep.rows.size() >= 2) {
        rep.diverging = rep.rows.back().energy > 1.5 * rep.rows.front().energy;
    }
    return rep;
}

Certificate certify(const FenchelRoutes& routes, const Field& u, const GradientField& sigma,
                    const ConstraintSpec& c, const Field& g, const std::vector<GradientField>& schedule_sigmas,
                    const CertifyThresholds& thresholds, int n_dirs, int n_test, std::uint64_t seed) {
    Certificate cert;
    cert.thresholds = thresholds;
    cert.seed = seed;
    cert.obstacle = c.kind == ConstraintSpec::Kind::obstacle;

    DualityGapReport gap = duality_gap(routes, u, sigma);
    cert.duality_gap_l1 = gap.l1;
    cert.duality_gap_max = gap.max_gap;
    cert.duality_pass = !gap.any_infinite && gap.l1 <= thresholds.tau_duality_l1;

    ElReport el = el_inequality_test(sigma, u, c, g, n_dirs, seed);
    cert.el_min = el.el_min;
    cert.el_min_normalized = el.el_min_normalized;
    cert.el_directions = el.directions;
    cert.el_pass = el.el_min_normalized >= -thresholds.tau_el;

    DivergenceReport div = divergence_residual(sigma, n_test, seed + 1);
    double dual_scale = 1e-300;
    {
        const GridDomain& d = *sigma.dom;
        for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) dual_scale = std::max(dual_scale, sigma.at(s).norm());
        dual_scale = std::max(dual_scale, 1.0);
    }
    if (cert.obstacle) {
        cert.div_residual = div.one_sided_min;
        cert.div_pass = div.one_sided_min >= -thresholds.tau_div * dual_scale;
    } else {
        cert.div_residual = div.weak_residual;
        cert.div_pass = div.weak_residual <= thresholds.tau_div * dual_scale;
    }

    IntegrabilityReport integ = integrability_report(routes, u, sigma);
    cert.norm_fstar_sigma_l1 = integ.norm_fstar_sigma_l1;
    cert.norm_pairing_l1 = integ.norm_pairing_l1;
    cert.integrable_pass = integ.fstar_finite;

    if (!schedule_sigmas.empty()) {
        cert.equi_profile = equiintegrability_profile(schedule_sigmas, {1.0, 2.0, 5.0, thresholds.equi_threshold_max});
        cert.equi_pass = cert.equi_profile.sup_at_max_threshold <= thresholds.tol_equi;
    } else {
        cert.equi_pass = true;
    }

    cert.overall_pass = cert.duality_pass && cert.el_pass && cert.div_pass && cert.integrable_pass && cert.equi_pass;
    return cert;
}

std::string Certificate::to_json() const {
    nlohmann::ordered_json js;
    js["duality_gap_l1"] = duality_gap_l1;
    js["duality_gap_max"] = duality_gap_max;
    js["el_min"] = el_min;
    js["el_min_normalized"] = el_min_normalized;
    js["el_directions"] = el_directions;
    js["div_residual"] = div_residual;
    js["norm_fstar_sigma_l1"] = norm_fstar_sigma_l1;
    js["norm_pairing_l1"] = norm_pairing_l1;
    js["obstacle"] = obstacle;
    js["seed"] = seed;
    nlohmann::ordered_json th;
    th["tau_duality_l1"] = thresholds.tau_duality_l1;
    th["tau_el"] = thresholds.tau_el;
    th["tau_div"] = thresholds.tau_div;
    th["tol_equi"] = thresholds.tol_equi;
    th["equi_threshold_max"] = thresholds.equi_threshold_max;
    js["thresholds"] = th;
    nlohmann::ordered_json eq;
    eq["thresholds"] = equi_profile.thresholds;
    eq["e"] = equi_profile.e;
    eq["sup_at_max_threshold"] = equi_profile.sup_at_max_threshold;
    js["equi_profile"] = eq;
    nlohmann::ordered_json flags;
    flags["duality_pass"] = duality_pass;
    flags["el_pass"] = el_pass;
    flags["div_pass"] = div_pass;
    flags["integrable_pass"] = integrable_pass;
    flags["equi_pass"] = equi_pass;
    flags["overall_pass"] = overall_pass;
    js["flags"] = flags;
    return js.dump(2);
}

}  // namespace varidual
