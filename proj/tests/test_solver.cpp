#include <cmath>

#include "doctest.h"
#include "support/qp_oracle.hpp"
#include "varidual/solver.hpp"
#include "varidual/verification.hpp"

using namespace varidual;

namespace {

std::shared_ptr<const GridDomain> dom_1d(int inner, double h, int collar = 1) {
    return std::make_shared<GridDomain>(1, 1, h, std::array<int, 2>{inner, 1}, collar);
}

Field poly_field(std::shared_ptr<const GridDomain> dom, const std::vector<double>& coeffs) {
    Field f(dom);
    for (int i = 0; i < dom->total(0); ++i) {
        double x = dom->coord(0, i), acc = 0.0;
        for (std::size_t c = coeffs.size(); c-- > 0;) acc = acc * x + coeffs[c];
        f.at(i) = acc;
    }
    return f;
}

SolveConfig tight_config() {
    SolveConfig cfg;
    cfg.grad_tol = 1e-9;
    cfg.max_inner_iters = 400000;
    cfg.seed = 1234;
    return cfg;
}

}  // namespace

TEST_CASE("minimize: quadratic Dirichlet relaxes to the affine interpolant") {
    auto dom = dom_1d(99, 0.01);
    // boundary values 0 and 1 but a curved start: the minimiser is x
    Field g = poly_field(dom, {0.0, 0.0, 1.0});  // x^2
    SolveConfig cfg = tight_config();

    SpecIntegrand raw(IntegrandSpec::quadratic(1));
    SolveReport rep = minimize_integrand(raw, g, ConstraintSpec::none(), cfg);
    CHECK(rep.converged);
    double sup = 0.0;
    for (int i = 0; i < dom->total(0); ++i) sup = std::max(sup, std::fabs(rep.u.at(i) - dom->coord(0, i)));
    CHECK(sup <= 1e-8);
    CHECK(std::fabs(rep.f - 0.5) <= 1e-8);

    // the same through the smoothing member: identical minimiser, value
    // shifted by mu_j up to the mollification correction
    IntegrandSpec q = IntegrandSpec::quadratic(1);
    ApproximationSchedule sched;
    ConjugatePair pair = build_trimmed_pair(q, default_pair_grids(q, 20, sched.delta(20) / 4.0));
    Approximant a = build_approximant(pair, 20, sched, GridLayout::centered(1, 3.0, sched.delta(20) / 4.0));
    SolveReport rj = minimize_approximant(a, g, ConstraintSpec::none(), cfg);
    CHECK(rj.converged);
    sup = 0.0;
    for (int i = 0; i < dom->total(0); ++i) sup = std::max(sup, std::fabs(rj.u.at(i) - dom->coord(0, i)));
    CHECK(sup <= 1e-7);
    CHECK(std::fabs(rj.f - (0.5 - a.mu())) <= 1e-6);
}

TEST_CASE("minimize: barrier integrand keeps iterates feasible and picks the affine optimum") {
    auto dom = dom_1d(49, 0.02);
    Field g = poly_field(dom, {0.0, 0.5});
    SolveConfig cfg = tight_config();
    SpecIntegrand raw(IntegrandSpec::log_barrier(1));
    SolveReport rep = minimize_integrand(raw, g, ConstraintSpec::none(), cfg);
    CHECK(rep.converged);
    for (int i = 0; i < dom->total(0); ++i) CHECK(std::fabs(rep.u.at(i) - 0.5 * dom->coord(0, i)) <= 1e-7);
    CHECK(std::fabs(rep.f - dom->measure() * (-std::log(0.75))) <= 1e-7);

    // slope 1.2 boundary data: the start has infinite energy
    Field bad = poly_field(dom, {0.0, 1.2});
    CHECK_THROWS_AS(minimize_integrand(raw, bad, ConstraintSpec::none(), cfg), InfeasibleStartError);
}

TEST_CASE("minimize: obstacle run matches the active-set oracle") {
    auto dom = dom_1d(49, 0.02);  // 51 nodes across [0,1]
    Field g(dom);                 // zero boundary
    Field psi = poly_field(dom, {0.5 - 4.0 * 0.25, 4.0, -4.0});  // 0.5 - 4 (x-1/2)^2
    ConstraintSpec obs = ConstraintSpec::obstacle(psi, g);

    Field oracle = varidual_test::qp_obstacle_oracle(g, psi);

    SolveConfig cfg = tight_config();
    SpecIntegrand raw(IntegrandSpec::quadratic(1));
    SolveReport rep = minimize_integrand(raw, g, obs, cfg);
    CHECK(rep.converged);
    double sup = 0.0;
    for (int i = 0; i < dom->total(0); ++i) sup = std::max(sup, std::fabs(rep.u.at(i) - oracle.at(i)));
    CHECK(sup <= 1e-6);

    // smoothing-sequence member: same contact structure, same minimiser
    IntegrandSpec q = IntegrandSpec::quadratic(1);
    ApproximationSchedule sched;
    ConjugatePair pair = build_trimmed_pair(q, default_pair_grids(q, 20, sched.delta(20) / 4.0));
    Approximant a = build_approximant(pair, 20, sched, GridLayout::centered(1, 3.0, sched.delta(20) / 4.0));
    SolveReport rj = minimize_approximant(a, g, obs, cfg);
    CHECK(rj.converged);
    sup = 0.0;
    for (int i = 0; i < dom->total(0); ++i) sup = std::max(sup, std::fabs(rj.u.at(i) - oracle.at(i)));
    CHECK(sup <= 1e-6);
}

TEST_CASE("extract_dual: identity map for the quadratic, Lipschitz bound everywhere") {
    auto dom = dom_1d(49, 0.02);
    Field g = poly_field(dom, {0.0, 1.0});
    IntegrandSpec q = IntegrandSpec::quadratic(1);
    ApproximationSchedule sched;
    sched.j_end = 8;
    ConjugatePair pair = build_trimmed_pair(q, default_pair_grids(q, 8, sched.delta(8) / 4.0));
    Approximant a = build_approximant(pair, 8, sched, GridLayout::centered(1, 3.0, sched.delta(8) / 4.0));

    SolveConfig cfg = tight_config();
    SolveReport rep = minimize_approximant(a, g, ConstraintSpec::none(), cfg);
    GradientField grad_u = grad_k(rep.u);
    for (std::int64_t s = 0; s < dom->stencil_node_count(); ++s) {
        CHECK(std::fabs(rep.sigma.at(s)[0] - grad_u.at(s)[0]) <= 2e-3);  // F' = id up to cache slack
        CHECK(rep.sigma.at(s).norm() <= a.j() * (1.0 + 1e-6));
    }

    // node-wise Fenchel equality within the documented conjugation budget
    FenchelRoutes routes = approximant_routes(a, 1e-3);
    DualityGapReport gaps = duality_gap(routes, rep.u, rep.sigma);
    CHECK(!gaps.any_infinite);
    CHECK(gaps.max_gap <= 1e-3);
    CHECK(gaps.min_gap >= -1e-9);
}

TEST_CASE("ekeland_schedule: nondecreasing values with gap and transport bookkeeping") {
    auto dom = dom_1d(49, 0.02);
    Field g = poly_field(dom, {0.0, 1.0});
    IntegrandSpec q = IntegrandSpec::quadratic(1);
    ApproximationSchedule sched;
    sched.j_end = 10;
    ConjugatePair pair = build_trimmed_pair(q, default_pair_grids(q, sched.j_end, sched.delta(sched.j_end) / 4.0));

    SolveConfig cfg = tight_config();
    ScheduleResult res = ekeland_schedule(q, pair, sched, g, ConstraintSpec::none(), cfg, 3.0);
    REQUIRE(res.reports.size() == 9);
    CHECK(res.monotone_ok);
    REQUIRE(res.has_reference);
    CHECK(std::fabs(res.reference_f - 0.5) <= 1e-8);
    for (std::size_t i = 0; i < res.reports.size(); ++i) {
        const SolveReport& r = res.reports[i];
        CHECK(r.converged);
        // the sandwich bound controls the gap to the unregularised value
        CHECK(res.reference_f - r.f <= sched.mu(r.j) + r.j * sched.delta(r.j) + 1e-6);
        CHECK(r.ekeland_distance <= r.epsilon_j);
        if (i > 0) CHECK(r.f >= res.reports[i - 1].f - 10.0 * cfg.grad_tol);
    }
}

TEST_CASE("ekeland_schedule: minimal surface run reaches the constant dual field") {
    auto dom = dom_1d(39, 0.025);
    Field g = poly_field(dom, {0.0, 2.0});  // slope-2 boundary data
    IntegrandSpec ms = IntegrandSpec::minimal_surface(1);
    ApproximationSchedule sched;
    sched.j_end = 8;
    ConjugatePair pair = build_trimmed_pair(ms, default_pair_grids(ms, sched.j_end, 2.5e-4));

    SolveConfig cfg = tight_config();
    ScheduleResult res = ekeland_schedule(ms, pair, sched, g, ConstraintSpec::none(), cfg, 4.0);
    CHECK(res.monotone_ok);
    CHECK(!res.has_reference);  // demi-coercive kind: no direct reference solve
    const SolveReport& last = res.reports.back();
    CHECK(last.converged);
    const double expected = 2.0 / std::sqrt(5.0);
    for (int i = 0; i < dom->total(0); ++i) CHECK(std::fabs(last.u.at(i) - 2.0 * dom->coord(0, i)) <= 1e-6);
    for (std::int64_t s = 0; s < dom->stencil_node_count(); ++s) {
        CHECK(std::fabs(last.sigma.at(s)[0] - expected) <= 2e-3);
        CHECK(std::fabs(last.sigma.at(s)[0]) < 1.0);
    }
}

TEST_CASE("ekeland_schedule: warm start changes iterations, not the answer") {
    auto dom = dom_1d(29, 1.0 / 30.0);
    Field g(dom);
    Field psi = poly_field(dom, {0.5 - 1.0, 4.0, -4.0});
    ConstraintSpec obs = ConstraintSpec::obstacle(psi, g);
    IntegrandSpec q = IntegrandSpec::quadratic(1);
    ApproximationSchedule sched;
    sched.j_end = 6;
    ConjugatePair pair = build_trimmed_pair(q, default_pair_grids(q, sched.j_end, sched.delta(sched.j_end) / 4.0));

    SolveConfig warm = tight_config();
    warm.grad_tol = 1e-8;
    SolveConfig cold = warm;
    cold.warm_start = false;

    ScheduleResult rw = ekeland_schedule(q, pair, sched, g, obs, warm, 3.0);
    ScheduleResult rc = ekeland_schedule(q, pair, sched, g, obs, cold, 3.0);

    double sup = 0.0;
    long warm_iters = 0, cold_iters = 0;
    for (std::size_t i = 0; i < rw.reports.size(); ++i) {
        for (int n = 0; n < dom->total(0); ++n)
            sup = std::max(sup, std::fabs(rw.reports[i].u.at(n) - rc.reports[i].u.at(n)));
        warm_iters += rw.reports[i].iters;
        cold_iters += rc.reports[i].iters;
    }
    CHECK(sup <= 1e-7);
    CHECK(warm_iters < cold_iters);
}

TEST_CASE("determinism: identical config and seed give bit-identical reports") {
    auto dom = dom_1d(29, 1.0 / 30.0);
    Field g = poly_field(dom, {0.0, 0.0, 1.0});
    IntegrandSpec q = IntegrandSpec::quadratic(1);
    ApproximationSchedule sched;
    sched.j_end = 4;
    ConjugatePair pair = build_trimmed_pair(q, default_pair_grids(q, sched.j_end, sched.delta(sched.j_end) / 4.0));
    SolveConfig cfg = tight_config();

    ScheduleResult r1 = ekeland_schedule(q, pair, sched, g, ConstraintSpec::none(), cfg, 3.0);
    ScheduleResult r2 = ekeland_schedule(q, pair, sched, g, ConstraintSpec::none(), cfg, 3.0);
    REQUIRE(r1.reports.size() == r2.reports.size());
    for (std::size_t i = 0; i < r1.reports.size(); ++i) {
        CHECK(r1.reports[i].f == r2.reports[i].f);
        CHECK(r1.reports[i].iters == r2.reports[i].iters);
        CHECK(r1.reports[i].residual == r2.reports[i].residual);
        for (std::size_t p = 0; p < r1.reports[i].u.values.size(); ++p)
            CHECK(r1.reports[i].u.values[p] == r2.reports[i].u.values[p]);
    }
}

TEST_CASE("minimize: 2D Dirichlet problem relaxes to the affine interpolant") {
    auto dom = std::make_shared<GridDomain>(2, 1, 0.1, std::array<int, 2>{9, 9}, 1);
    Field g(dom);
    for (int i = 0; i < dom->total(0); ++i)
        for (int j = 0; j < dom->total(1); ++j) {
            double x = dom->coord(0, i), y = dom->coord(1, j);
            g.at(i, j) = x + 2.0 * y + 0.5 * x * x * (1.0 - x);  // curved start, affine optimum
        }
    SolveConfig cfg;
    cfg.grad_tol = 1e-9;
    cfg.max_inner_iters = 200000;
    cfg.seed = 3;

    SpecIntegrand raw(IntegrandSpec::quadratic(2));
    SolveReport rep = minimize_integrand(raw, g, ConstraintSpec::none(), cfg);
    CHECK(rep.converged);
    // the minimiser is the discrete harmonic extension; for these boundary
    // values it stays within the curved start's boundary deviation
    double e = energy(IntegrandSpec::quadratic(2), rep.u).value();
    CHECK(e <= energy(IntegrandSpec::quadratic(2), g).value());
    // interior flux balance: divergence of the dual field vanishes
    Field div = divergence_k(rep.sigma);
    for (int i = dom->collar; i < dom->collar + dom->inner[0]; ++i)
        for (int j = dom->collar; j < dom->collar + dom->inner[1]; ++j)
            CHECK(std::fabs(div.at(i, j)) <= 1e-7);
}

TEST_CASE("2D approximant: multilinear cache agrees with the slow path and respects the chain") {
    IntegrandSpec q = IntegrandSpec::quadratic(2);
    PairGrids grids;
    grids.primal_radius = 5.0;
    grids.primal_spacing = 0.05;
    grids.dual_radius = 3.0;
    grids.dual_spacing = 0.05;
    ConjugatePair pair = build_trimmed_pair(q, grids);

    ApproximationSchedule sched;
    sched.j_end = 2;
    GridLayout cache = GridLayout::centered(2, 1.0, sched.delta(2) / 4.0);
    Approximant a = build_approximant(pair, 2, sched, cache);

    for (double x : {-0.8, 0.0, 0.55}) {
        for (double y : {-0.6, 0.3}) {
            TensorPoint p(x, y);
            double fast = a.value(p);
            double slow = a.value_slow(p);
            CHECK(std::fabs(fast - slow) <= a.j() * cache.axis(0).step + 1e-9);
            CHECK(fast <= evaluate(q, p).value() + 1e-9);  // F_j <= F
            TensorPoint d = a.derivative(p);
            CHECK(d.norm() <= a.j() * (1.0 + 1e-6));
        }
    }
}
