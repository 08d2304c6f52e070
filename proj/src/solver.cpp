#include "varidual/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace varidual {

void SolveConfig::validate() const {
    if (max_inner_iters < 1) throw UsageError("solver: max_inner_iters must be positive");
    if (!(grad_tol > 0.0)) throw UsageError("solver: grad_tol must be positive");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw UsageError("solver: armijo_c must lie in (0,1)");
    if (!(armijo_backtrack > 0.0 && armijo_backtrack < 1.0)) throw UsageError("solver: backtrack must lie in (0,1)");
    if (!(init_step > 0.0)) throw UsageError("solver: init_step must be positive");
}

namespace {

// Pointwise energy-gradient density: dE/du_p = gamma_p * h^n.
Field gradient_density(const EnergyIntegrand& w, const Field& u, GradientField* sigma_out) {
    const GridDomain& d = *u.dom;
    GradientField g = grad_k(u);
    GradientField sig(u.dom);
    for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) sig.set(s, w.grad(g.at(s)));
    Field div = divergence_k(sig);
    const double sign = d.k == 1 ? -1.0 : 1.0;  // (-1)^k
    for (auto& v : div.values) v *= sign;
    if (sigma_out) *sigma_out = std::move(sig);
    return div;
}

}  // namespace

SolveReport minimize_integrand(const EnergyIntegrand& w, const Field& g, const ConstraintSpec& c,
                               const SolveConfig& cfg, const Field* warm_start) {
    cfg.validate();
    const GridDomain& d = *g.dom;
    const double cell = d.n == 1 ? d.h : d.h * d.h;

    Field u = apply_dirichlet(warm_start ? *warm_start : g, g);
    u = project_constraint(u, c);

    ExtendedValue e0 = energy(w, u);
    if (!e0.is_finite()) throw InfeasibleStartError("minimize: start point has infinite energy");
    double e_val = e0.value();

    SolveReport rep;
    double step = cfg.init_step;
    int it = 0;
    // Once the per-step energy decrease falls below what doubles resolve,
    // Armijo can no longer certify descent; the loop then switches to
    // residual-guarded fixed steps (the gradient is analytic, so the
    // residual stays meaningful far below the energy resolution).
    bool polish = false;
    double best_res = 1e308;
    int since_improve = 0;
    double damp = 1.0;
    bool have_prev = false;
    Field u_prev, gamma_prev;
    for (; it < cfg.max_inner_iters; ++it) {
        GradientField sig(g.dom);
        Field gamma = gradient_density(w, u, &sig);
        for (int i = 0; i < d.total(0); ++i)
            for (int jn = 0; jn < (d.n == 2 ? d.total(1) : 1); ++jn)
                if (!d.is_free(i, jn)) gamma.at(i, jn) = 0.0;

        // Natural residual with unit step.
        Field trial = u;
        for (std::size_t p = 0; p < trial.values.size(); ++p) trial.values[p] -= gamma.values[p];
        trial = project_constraint(trial, c);
        double res2 = 0.0;
        for (std::size_t p = 0; p < trial.values.size(); ++p) {
            double dlt = u.values[p] - trial.values[p];
            res2 += dlt * dlt * cell;
        }
        rep.residual = std::sqrt(res2);
        if (rep.residual <= cfg.grad_tol) {
            rep.converged = true;
            break;
        }
        static const bool trace = std::getenv("VARIDUAL_SOLVER_TRACE") != nullptr;
        if (trace && it % 500 == 0)
            std::fprintf(stderr, "it=%6d polish=%d step=%.3e res=%.6e E=%.17g\n", it, (int)polish, step,
                         rep.residual, e_val);

        if (!polish) {
            // Armijo backtracking along the projected arc.
            bool accepted = false;
            while (step > 1e-18) {
                Field v = u;
                for (std::size_t p = 0; p < v.values.size(); ++p) v.values[p] -= step * gamma.values[p];
                v = project_constraint(v, c);
                ExtendedValue ev = energy(w, v);
                if (ev.is_finite()) {
                    double decrease = 0.0;
                    for (std::size_t p = 0; p < v.values.size(); ++p)
                        decrease += gamma.values[p] * (v.values[p] - u.values[p]) * cell;
                    // strict predicted decrease, or the step was a no-op at
                    // floating-point resolution and the search has stalled
                    if (decrease < 0.0 && ev.value() <= e_val + cfg.armijo_c * decrease) {
                        u = std::move(v);
                        e_val = ev.value();
                        accepted = true;
                        break;
                    }
                }
                step *= cfg.armijo_backtrack;
            }
            if (accepted) {
                step = std::min(step / cfg.armijo_backtrack, 1e6);  // gentle growth
            } else {
                polish = true;  // energy differences saturated
                best_res = rep.residual;
            }
        }
        if (polish) {
            // Energy values cannot guide the step any more; size it from the
            // gradient map itself (Barzilai-Borwein secant), with a damping
            // backstop halved whenever a 400-iteration window brings no
            // relative residual improvement.
            double s = 0.0;
            if (have_prev) {
                double num = 0.0, den = 0.0;
                for (std::size_t p = 0; p < u.values.size(); ++p) {
                    double du = u.values[p] - u_prev.values[p];
                    double dg = gamma.values[p] - gamma_prev.values[p];
                    num += du * dg * cell;
                    den += dg * dg * cell;
                }
                if (den > 0.0 && num > 0.0) s = num / den;
            }
            if (s <= 0.0) {
                // secant unavailable: probe the curvature once along gamma
                double g2 = 0.0;
                for (double gv : gamma.values) g2 += gv * gv * cell;
                double probe = 1e-7 / std::sqrt(std::max(g2, 1e-300));
                Field v = u;
                for (std::size_t p = 0; p < v.values.size(); ++p) v.values[p] -= probe * gamma.values[p];
                GradientField sig2(g.dom);
                Field gamma2 = gradient_density(w, v, &sig2);
                double dg2 = 0.0;
                for (int i = 0; i < d.total(0); ++i)
                    for (int jn = 0; jn < (d.n == 2 ? d.total(1) : 1); ++jn) {
                        if (!d.is_free(i, jn)) continue;
                        double dgv = gamma2.at(i, jn) - gamma.at(i, jn);
                        dg2 += dgv * dgv * cell;
                    }
                double lips = std::sqrt(dg2) / std::max(probe * std::sqrt(g2), 1e-300);
                s = 1.0 / std::max(lips, 1e-6);
            }
            s = std::clamp(s * damp, 1e-16, 1e6);

            if (rep.residual < best_res * (1.0 - 1e-3)) {
                best_res = rep.residual;
                since_improve = 0;
            } else if (++since_improve >= 400) {
                damp *= 0.5;
                since_improve = 0;
                if (damp <= 1e-9) break;
            }

            u_prev = u;
            gamma_prev = gamma;
            have_prev = true;
            Field v = u;
            for (std::size_t p = 0; p < v.values.size(); ++p) v.values[p] -= s * gamma.values[p];
            u = project_constraint(v, c);
            step = s;
        }
    }

    rep.u = u;
    ExtendedValue e_final = energy(w, u);
    rep.f = e_final.is_finite() ? e_final.value() : e_val;
    rep.iters = it;
    GradientField gu = grad_k(u);
    GradientField sig(g.dom);
    for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) sig.set(s, w.grad(gu.at(s)));
    rep.sigma = std::move(sig);
    return rep;
}

SolveReport minimize_approximant(const Approximant& a, const Field& g, const ConstraintSpec& c,
                                 const SolveConfig& cfg, const Field* warm_start) {
    ApproximantIntegrand w(&a);
    SolveReport rep = minimize_integrand(w, g, c, cfg, warm_start);
    rep.j = a.j();
    rep.sigma = extract_dual(a, rep.u);
    return rep;
}

GradientField extract_dual(const Approximant& a, const Field& u) {
    const GridDomain& d = *u.dom;
    GradientField g = grad_k(u);
    GradientField sig(u.dom);
    for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) sig.set(s, a.derivative(g.at(s)));
    return sig;
}

ScheduleResult ekeland_schedule(const IntegrandSpec& spec, const ConjugatePair& pair,
                                const ApproximationSchedule& schedule, const Field& g, const ConstraintSpec& c,
                                const SolveConfig& cfg, double cache_radius) {
    schedule.validate();
    cfg.validate();
    const GridDomain& d = *g.dom;
    const int m = d.m();

    ScheduleResult out;

    if (spec.coercivity().kind == CoercivityDescriptor::Kind::superlinear) {
        SpecIntegrand raw(spec);
        SolveReport ref = minimize_integrand(raw, g, c, cfg);
        out.has_reference = true;
        out.reference_f = ref.f;
        out.reference_u = ref.u;
    }

    const Field* warm = nullptr;
    for (int j = schedule.j_start; j <= schedule.j_end; ++j) {
        GridLayout cache =
            GridLayout::centered(std::vector<double>(static_cast<std::size_t>(m), cache_radius),
                                 std::vector<double>(static_cast<std::size_t>(m), schedule.delta(j) / 4.0));
        Approximant a = build_approximant(pair, j, schedule, cache);
        SolveReport rep = minimize_approximant(a, g, c, cfg, cfg.warm_start ? warm : nullptr);
        rep.j = j;

        if (!out.reports.empty()) {
            double prev = out.reports.back().f;
            if (rep.f < prev - 10.0 * cfg.grad_tol) {
                out.monotone_ok = false;
                out.worst_monotone_violation = std::max(out.worst_monotone_violation, prev - rep.f);
            }
        }
        if (out.has_reference) {
            rep.has_reference = true;
            rep.gap_to_reference = out.reference_f - rep.f;
            rep.epsilon_j = std::sqrt(std::max(out.reference_f - rep.f, 0.0) + 10.0 * cfg.grad_tol);
            GradientField gr = grad_k(out.reference_u), gj = grad_k(rep.u);
            const double cell = d.n == 1 ? d.h : d.h * d.h;
            double dist = 0.0;
            for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) dist += (gr.at(s) - gj.at(s)).norm() * cell;
            rep.ekeland_distance = dist;
        }

        out.reports.push_back(std::move(rep));
        out.approximants.push_back(std::move(a));
        warm = &out.reports.back().u;
    }
    return out;
}

}  // namespace varidual
