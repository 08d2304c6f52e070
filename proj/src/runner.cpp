#include "varidual/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "varidual/csvio.hpp"
#include "varidual/svg.hpp"

namespace varidual {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void field_series(const Field& f, SvgSeries* s) {
    const GridDomain& d = *f.dom;
    for (int i = 0; i < d.total(0); ++i) {
        s->x.push_back(d.coord(0, i));
        s->y.push_back(f.at(i));
    }
}

}  // namespace

int run_solve(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& err) {
    fs::create_directories(out_dir);
    auto dom = cfg.make_domain();
    Field g = cfg.boundary_field(dom);

    ConstraintSpec constraint;
    try {
        constraint = cfg.constraint(dom, g);
    } catch (const InfeasibleConstraintError& e) {
        err << "solve: " << e.what() << "\n";
        return exit_code::infeasible;
    }

    IntegrandSpec spec = cfg.integrand();
    ConjugatePair pair =
        build_trimmed_pair(spec, default_pair_grids(spec, cfg.schedule.j_end, cfg.effective_dual_spacing()));

    ScheduleResult sched;
    try {
        sched = ekeland_schedule(spec, pair, cfg.schedule, g, constraint, cfg.solver, cfg.cache_radius);
    } catch (const InfeasibleStartError& e) {
        err << "solve: " << e.what() << "\n";
        return exit_code::infeasible;
    }

    write_schedule_csv(sched.reports, join(out_dir, "schedule.csv"));
    const SolveReport& last = sched.reports.back();
    write_field_csv(last.u, join(out_dir, "u_final.csv"));
    write_gradient_csv(last.sigma, join(out_dir, "sigma_final.csv"));
    for (const SolveReport& r : sched.reports) {
        std::ostringstream name;
        name << "sigma_j_" << r.j << ".csv";
        write_gradient_csv(r.sigma, join(out_dir, name.str()));
        if (cfg.dump_fields) {
            std::ostringstream fname;
            fname << "u_j_" << r.j << ".csv";
            write_field_csv(r.u, join(out_dir, fname.str()));
        }
    }

    if (cfg.svg && dom->n == 1) {
        std::vector<SvgSeries> series;
        SvgSeries su{"u", {}, {}};
        field_series(last.u, &su);
        series.push_back(su);
        SvgSeries sg{"g", {}, {}};
        field_series(g, &sg);
        series.push_back(sg);
        if (constraint.kind == ConstraintSpec::Kind::obstacle) {
            SvgSeries sp{"psi", {}, {}};
            field_series(constraint.psi, &sp);
            series.push_back(sp);
        }
        write_text_file(join(out_dir, "fields.svg"), svg_line_chart(series, "solution"));

        SvgSeries fj{"f_j", {}, {}};
        for (const SolveReport& r : sched.reports) {
            fj.x.push_back(r.j);
            fj.y.push_back(r.f);
        }
        write_text_file(join(out_dir, "f_curve.svg"), svg_line_chart({fj}, "schedule values"));

        SvgSeries ss{"sigma", {}, {}};
        const GridDomain& d = *dom;
        for (int i = d.stencil_lo(); i < d.stencil_lo() + d.stencil_count(0); ++i) {
            ss.x.push_back(d.coord(0, i));
            ss.y.push_back(last.sigma.at(d.stencil_index(i))[0]);
        }
        write_text_file(join(out_dir, "sigma.svg"), svg_line_chart({ss}, "dual field"));
    }

    for (const SolveReport& r : sched.reports)
        if (!r.converged) {
            err << "solve: iteration cap reached at j = " << r.j << "\n";
            return exit_code::non_converged;
        }
    return exit_code::ok;
}

int run_verify(const ExperimentConfig& cfg, const std::string& artifacts_dir, std::ostream& out, std::ostream& err) {
    auto dom = cfg.make_domain();
    Field g = cfg.boundary_field(dom);
    ConstraintSpec constraint;
    try {
        constraint = cfg.constraint(dom, g);
    } catch (const InfeasibleConstraintError& e) {
        err << "verify: " << e.what() << "\n";
        return exit_code::infeasible;
    }

    Field u;
    std::vector<GradientField> sigmas;
    try {
        u = read_field_csv(dom, join(artifacts_dir, "u_final.csv"));
        for (int j = cfg.schedule.j_start; j <= cfg.schedule.j_end; ++j) {
            std::ostringstream name;
            name << "sigma_j_" << j << ".csv";
            sigmas.push_back(read_gradient_csv(dom, join(artifacts_dir, name.str())));
        }
    } catch (const std::exception& e) {
        err << "verify: missing or unreadable artifacts: " << e.what() << "\n";
        return exit_code::infeasible;
    }

    IntegrandSpec spec = cfg.integrand();
    // The certificate tests the catalog dual field of the artifact.
    GradientField grad_u = grad_k(u);
    GradientField sigma(dom);
    for (std::int64_t s = 0; s < dom->stencil_node_count(); ++s) sigma.set(s, derivative(spec, grad_u.at(s)));

    Certificate cert = certify(analytic_routes(spec), u, sigma, constraint, g, sigmas, cfg.thresholds, cfg.n_dirs,
                               cfg.n_test, cfg.verify_seed);

    fs::create_directories(artifacts_dir);
    write_text_file(join(artifacts_dir, "certificate.json"), cert.to_json() + "\n");
    {
        std::ostringstream eq;
        eq << "j";
        for (double t : cert.equi_profile.thresholds) eq << ",e_T" << format_double(t);
        eq << "\n";
        for (std::size_t r = 0; r < cert.equi_profile.e.size(); ++r) {
            eq << cfg.schedule.j_start + static_cast<int>(r);
            for (double v : cert.equi_profile.e[r]) eq << "," << format_double(v);
            eq << "\n";
        }
        write_text_file(join(artifacts_dir, "equi_profile.csv"), eq.str());
    }

    if (cfg.svg) {
        DualityGapReport gaps = duality_gap(analytic_routes(spec), u, sigma);
        write_text_file(join(artifacts_dir, "gap_hist.svg"), svg_histogram(gaps.node_gap, 32, "duality gap"));
    }

    out << "certificate: duality_gap_l1=" << format_double(cert.duality_gap_l1)
        << " el_min_norm=" << format_double(cert.el_min_normalized)
        << " div_residual=" << format_double(cert.div_residual)
        << " fstar_l1=" << format_double(cert.norm_fstar_sigma_l1)
        << " pairing_l1=" << format_double(cert.norm_pairing_l1) << "\n";
    out << "flags: duality=" << (cert.duality_pass ? "pass" : "FAIL") << " el=" << (cert.el_pass ? "pass" : "FAIL")
        << " div=" << (cert.div_pass ? "pass" : "FAIL")
        << " integrable=" << (cert.integrable_pass ? "pass" : "FAIL")
        << " equi=" << (cert.equi_pass ? "pass" : "FAIL") << " overall=" << (cert.overall_pass ? "PASS" : "FAIL")
        << "\n";

    return cert.overall_pass ? exit_code::ok : exit_code::verify_fail;
}

int run_conjugate_table(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& err) {
    if (cfg.n != 1 || cfg.k != 1) {
        err << "conjugate-table: 1D configurations only\n";
        return exit_code::usage;
    }
    fs::create_directories(out_dir);
    IntegrandSpec spec = cfg.integrand();
    int j_max = cfg.schedule.j_end;
    for (int j : cfg.table_js) j_max = std::max(j_max, j);
    ConjugatePair pair = build_trimmed_pair(spec, default_pair_grids(spec, j_max, cfg.effective_dual_spacing()));

    ApproximationSchedule sched = cfg.schedule;
    sched.j_end = j_max;
    std::vector<Approximant> as;
    for (int j : cfg.table_js) {
        GridLayout cache = GridLayout::centered(1, cfg.table_radius + 1.0, sched.delta(j) / 4.0);
        as.push_back(build_approximant(pair, j, sched, cache));
    }

    GridLayout table_grid = GridLayout::centered(1, cfg.table_radius, cfg.table_spacing);
    SampledConvexFunction fss = biconjugate(pair, table_grid);

    std::ofstream os(join(out_dir, "conjugate_table.csv"));
    os << "xi,F,Fstar,Fstarstar,Frecession";
    for (int j : cfg.table_js) os << ",F_" << j;
    os << "\n";
    for (std::int64_t i = 0; i < table_grid.node_count(); ++i) {
        TensorPoint xi = table_grid.coords_linear(i);
        os << format_double(xi[0]);
        ExtendedValue f = evaluate(spec, xi);
        os << "," << (f.is_finite() ? format_double(f.value()) : "inf");
        ExtendedValue fstar = pair.dual.interpolate(xi);
        os << "," << (fstar.is_finite() ? format_double(fstar.value()) : "inf");
        os << "," << (fss.is_finite(i) ? format_double(fss.raw(i)) : "inf");
        ExtendedValue rec = recession(spec, xi);
        os << "," << (rec.is_finite() ? format_double(rec.value()) : "inf");
        for (const Approximant& a : as) os << "," << format_double(a.value(xi));
        os << "\n";
    }
    return exit_code::ok;
}

int run_bv_demo(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& err) {
    if (cfg.n != 1 || cfg.k != 1) {
        err << "bv-demo: 1D first-order configurations only\n";
        return exit_code::usage;
    }
    if (cfg.bv_eps.empty()) {
        err << "bv-demo: bv.eps_schedule is empty\n";
        return exit_code::usage;
    }
    fs::create_directories(out_dir);
    auto dom = cfg.make_domain();
    JumpField uj;
    uj.ac = Field(dom);
    for (int i = 0; i < dom->total(0); ++i) {
        double x = dom->coord(0, i);
        double acc = 0.0;
        for (std::size_t c = cfg.bv_ac_poly.size(); c-- > 0;) acc = acc * x + cfg.bv_ac_poly[c];
        uj.ac.at(i) = acc;
    }
    uj.jumps = cfg.bv_jumps;

    IntegrandSpec spec = cfg.integrand();
    BvCheckReport rep = bv_representation_check(uj, spec, cfg.bv_eps, cfg.bv_h);

    std::ofstream os(join(out_dir, "bv_table.csv"));
    os << "eps,h,energy,target\n";
    for (const BvCheckRow& r : rep.rows)
        os << format_double(r.eps) << "," << format_double(r.h) << "," << format_double(r.energy) << ","
           << (rep.target_finite ? format_double(rep.target) : "inf") << "\n";

    if (cfg.svg) {
        SvgSeries e{"energy", {}, {}}, t{"target", {}, {}};
        for (const BvCheckRow& r : rep.rows) {
            e.x.push_back(r.eps);
            e.y.push_back(r.energy);
            if (rep.target_finite) {
                t.x.push_back(r.eps);
                t.y.push_back(rep.target);
            }
        }
        std::vector<SvgSeries> series{e};
        if (rep.target_finite) series.push_back(t);
        write_text_file(join(out_dir, "bv_convergence.svg"),
                        svg_line_chart(series, rep.target_finite ? "recovery energies" : "recovery energies (+inf target)"));
    }
    return exit_code::ok;
}

int list_catalog(std::ostream& out) {
    out << "quadratic        0.5|xi|^2            superlinear, self-dual\n";
    out << "p_power          |xi|^p/p, p>1        superlinear, dual exponent q=p/(p-1)\n";
    out << "minimal_surface  sqrt(1+|xi|^2)       linear growth, dual -sqrt(1-|z|^2) on |z|<=1\n";
    out << "log_barrier      -log(1-|xi/R|^2)     +inf outside the ball |xi|<R, gradient blowup\n";
    out << "abs_value        |xi|                 linear growth, dual = indicator of the unit ball\n";
    out << "custom_sampled   grid samples         multilinear between nodes, +inf off the finite region\n";
    return exit_code::ok;
}

}  // namespace varidual
