#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "varidual/operators.hpp"

using namespace varidual;

namespace {

std::shared_ptr<const GridDomain> make_dom(int n, int k, double h, int inner, int collar) {
    return std::make_shared<GridDomain>(n, k, h, std::array<int, 2>{inner, inner}, collar);
}

Field from_poly(std::shared_ptr<const GridDomain> dom, const std::function<double(double, double)>& fn) {
    Field f(dom);
    const GridDomain& d = *dom;
    for (int i = 0; i < d.total(0); ++i)
        for (int j = 0; j < (d.n == 2 ? d.total(1) : 1); ++j)
            f.at(i, j) = fn(d.coord(0, i), d.n == 2 ? d.coord(1, j) : 0.0);
    return f;
}

Field random_field(std::shared_ptr<const GridDomain> dom, std::mt19937_64& rng, bool free_only) {
    Field f(dom);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const GridDomain& d = *dom;
    for (int i = 0; i < d.total(0); ++i)
        for (int j = 0; j < (d.n == 2 ? d.total(1) : 1); ++j)
            if (!free_only || d.is_free(i, j)) f.at(i, j) = uni(rng);
    return f;
}

GradientField random_gradient(std::shared_ptr<const GridDomain> dom, std::mt19937_64& rng) {
    GradientField g(dom);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const int m = dom->m();
    for (std::int64_t s = 0; s < dom->stencil_node_count(); ++s) {
        TensorPoint t = TensorPoint::zeros(m);
        for (int c = 0; c < m; ++c) t[c] = uni(rng);
        g.set(s, t);
    }
    return g;
}

}  // namespace

TEST_CASE("grad_k: exact on polynomials of degree <= k") {
    auto d11 = make_dom(1, 1, 0.05, 17, 1);
    Field u = from_poly(d11, [](double x, double) { return 3.0 * x; });
    GradientField g = grad_k(u);
    for (std::int64_t s = 0; s < d11->stencil_node_count(); ++s) CHECK(g.at(s)[0] == doctest::Approx(3.0).epsilon(1e-13));

    auto d12 = make_dom(1, 2, 0.05, 17, 2);
    Field u2 = from_poly(d12, [](double x, double) { return x * x; });
    GradientField g2 = grad_k(u2);
    for (std::int64_t s = 0; s < d12->stencil_node_count(); ++s) CHECK(g2.at(s)[0] == doctest::Approx(2.0).epsilon(1e-10));

    auto d22 = make_dom(2, 2, 0.1, 9, 2);
    Field u3 = from_poly(d22, [](double x, double y) { return x * y; });
    GradientField g3 = grad_k(u3);
    for (std::int64_t s = 0; s < d22->stencil_node_count(); ++s) {
        TensorPoint t = g3.at(s);
        CHECK(std::fabs(t[0]) <= 1e-10);
        CHECK(std::fabs(t[1]) <= 1e-10);
        CHECK(t[2] == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("divergence_k: defining adjoint identity to 1e-12") {
    std::mt19937_64 rng(31);
    struct Cfg {
        int n, k;
    };
    for (Cfg c : {Cfg{1, 1}, Cfg{1, 2}, Cfg{2, 1}, Cfg{2, 2}}) {
        auto dom = make_dom(c.n, c.k, 0.07, c.n == 1 ? 23 : 9, c.k + 1);
        const double cell = dom->n == 1 ? dom->h : dom->h * dom->h;
        for (int trial = 0; trial < 100; ++trial) {
            GradientField sigma = random_gradient(dom, rng);
            Field phi = random_field(dom, rng, true);  // vanishes on the collar
            GradientField gphi = grad_k(phi);

            double lhs = pairing(sigma, gphi);
            Field div = divergence_k(sigma);
            double rhs = 0.0;
            for (int i = 0; i < dom->total(0); ++i)
                for (int j = 0; j < (dom->n == 2 ? dom->total(1) : 1); ++j)
                    rhs += div.at(i, j) * phi.at(i, j) * cell;
            rhs *= (c.k == 1 ? -1.0 : 1.0);
            double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
            CHECK(std::fabs(lhs - rhs) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("divergence_k: constant and linear dual fields") {
    auto dom = make_dom(1, 1, 0.02, 49, 1);
    GradientField sigma(dom);
    for (std::int64_t s = 0; s < dom->stencil_node_count(); ++s) sigma.set(s, TensorPoint(2.5));
    Field div = divergence_k(sigma);
    for (int i = dom->collar; i < dom->collar + dom->inner[0]; ++i) CHECK(std::fabs(div.at(i)) <= 1e-12);

    // sigma(x) = x: backward difference gives 1 in the interior
    GradientField lin(dom);
    for (int i = dom->stencil_lo(); i < dom->stencil_lo() + dom->stencil_count(0); ++i)
        lin.set(dom->stencil_index(i), TensorPoint(dom->coord(0, i)));
    Field dl = divergence_k(lin);
    for (int i = dom->collar; i < dom->collar + dom->inner[0]; ++i) CHECK(dl.at(i) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("energy: Riemann sums, infinities, affine exactness") {
    auto dom = make_dom(1, 1, 0.01, 99, 1);  // 100 cells over (0,1)
    Field u = from_poly(dom, [](double x, double) { return 3.0 * x; });
    ExtendedValue e = energy(IntegrandSpec::quadratic(1), u);
    CHECK(e.value() == doctest::Approx(4.5).epsilon(1e-12));

    Field steep = from_poly(dom, [](double x, double) { return 1.2 * x; });
    CHECK(energy(IntegrandSpec::log_barrier(1), steep).is_infinite());

    for (double m : {0.3, -1.7}) {
        Field um = from_poly(dom, [m](double x, double) { return m * x; });
        double expect = std::sqrt(1.0 + m * m) * dom->measure();
        CHECK(energy(IntegrandSpec::minimal_surface(1), um).value() == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("energy: refinement gap shrinks at first order") {
    auto at_h = [](double h) {
        int inner = static_cast<int>(std::lround(1.0 / h)) - 1;
        auto dom = make_dom(1, 1, h, inner, 1);
        Field u = from_poly(dom, [](double x, double) { return x * x * x - 0.4 * x; });
        return energy(IntegrandSpec::quadratic(1), u).value();
    };
    double e1 = at_h(0.02), e2 = at_h(0.01), e3 = at_h(0.005);
    double d1 = std::fabs(e1 - e2), d2 = std::fabs(e2 - e3);
    CHECK(d1 / d2 >= 1.8);
}

TEST_CASE("project_constraint: identity, clamping, idempotence, nonexpansiveness") {
    auto dom = make_dom(1, 1, 0.02, 49, 1);
    std::mt19937_64 rng(8);
    Field u = random_field(dom, rng, false);

    ConstraintSpec none = ConstraintSpec::none();
    Field pu = project_constraint(u, none);
    for (std::size_t i = 0; i < u.values.size(); ++i) CHECK(pu.values[i] == u.values[i]);

    Field g(dom);  // zero boundary
    Field psi = from_poly(dom, [](double x, double) { return 0.25 - (x - 0.5) * (x - 0.5); });
    ConstraintSpec obs = ConstraintSpec::obstacle(psi, g);

    Field below = from_poly(dom, [&](double x, double) { return psi.at(0) - 1.0 + 0.0 * x; });
    below = apply_dirichlet(below, g);
    Field pb = project_constraint(below, obs);
    for (int i = dom->collar; i < dom->collar + dom->inner[0]; ++i) CHECK(pb.at(i) == psi.at(i));

    // idempotent, nonexpansive in sup and weighted l2, verified against a
    // second straightforward loop
    Field v = random_field(dom, rng, false);
    Field pv = project_constraint(v, obs), pv2 = project_constraint(pv, obs);
    double sup_uv = 0.0, sup_p = 0.0, l2_uv = 0.0, l2_p = 0.0;
    for (int i = 0; i < dom->total(0); ++i) {
        CHECK(pv2.at(i) == pv.at(i));
        double expect = dom->is_free(i) ? std::max(v.at(i), psi.at(i)) : v.at(i);
        CHECK(pv.at(i) == expect);
        Field pu_ = project_constraint(u, obs);
        sup_uv = std::max(sup_uv, std::fabs(u.at(i) - v.at(i)));
        sup_p = std::max(sup_p, std::fabs(pu_.at(i) - pv.at(i)));
        l2_uv += (u.at(i) - v.at(i)) * (u.at(i) - v.at(i));
        l2_p += (pu_.at(i) - pv.at(i)) * (pu_.at(i) - pv.at(i));
    }
    CHECK(sup_p <= sup_uv + 1e-15);
    CHECK(l2_p <= l2_uv + 1e-12);

    // infeasible obstacle is rejected at construction
    Field tall = from_poly(dom, [](double, double) { return 1.0; });
    CHECK_THROWS_AS(ConstraintSpec::obstacle(tall, g), InfeasibleConstraintError);
}

TEST_CASE("apply_dirichlet: collar overwrite, interior untouched, idempotent") {
    auto dom = make_dom(1, 2, 0.05, 19, 2);
    std::mt19937_64 rng(4);
    Field u = random_field(dom, rng, false);
    Field g = from_poly(dom, [](double x, double) { return 1.0 + 2.0 * x; });

    Field once = apply_dirichlet(u, g), twice = apply_dirichlet(once, g);
    for (int i = 0; i < dom->total(0); ++i) {
        if (dom->is_free(i))
            CHECK(once.at(i) == u.at(i));
        else
            CHECK(once.at(i) == g.at(i));
        CHECK(twice.at(i) == once.at(i));
    }
}

TEST_CASE("bv_energy: split into density and jump parts") {
    auto dom = make_dom(1, 1, 0.0025, 399, 2);  // (0,1) with 400 cells
    JumpField flat;
    flat.ac = Field(dom);  // zero density
    flat.jumps = {{0.5, 1.0}};

    // no jumps: equals the plain energy of a field with that density
    JumpField none;
    none.ac = from_poly(dom, [](double x, double) { return 0.3 + 0.1 * x; });
    ExtendedValue direct = bv_energy(none, IntegrandSpec::minimal_surface(1));
    double manual = 0.0;
    for (int i = dom->stencil_lo(); i < dom->stencil_lo() + dom->stencil_count(0); ++i) {
        double v = none.ac.at(i);
        manual += std::sqrt(1.0 + v * v) * dom->h;
    }
    CHECK(direct.value() == doctest::Approx(manual).epsilon(1e-13));

    ExtendedValue e = bv_energy(flat, IntegrandSpec::minimal_surface(1));
    CHECK(e.value() == doctest::Approx(dom->measure() + 1.0).epsilon(1e-9));

    CHECK(bv_energy(flat, IntegrandSpec::quadratic(1)).is_infinite());

    JumpField bad = flat;
    bad.jumps = {{2.0, 1.0}};
    CHECK_THROWS_AS(bv_energy(bad, IntegrandSpec::minimal_surface(1)), UsageError);
}

TEST_CASE("mollified_recovery: affine density matches the split energy") {
    auto dom = make_dom(1, 1, 0.005, 199, 30);
    JumpField uj;
    uj.ac = from_poly(dom, [](double, double) { return 0.7; });
    Field rec = mollified_recovery(uj, 0.05);
    ExtendedValue er = energy(IntegrandSpec::minimal_surface(1), rec);
    ExtendedValue eb = bv_energy(uj, IntegrandSpec::minimal_surface(1));
    CHECK(std::fabs(er.value() - eb.value()) <= 1e-10);

    CHECK_THROWS_AS(mollified_recovery(uj, dom->collar * dom->h), UsageError);
}

TEST_CASE("mollified_recovery: unit step energies rise toward the split value") {
    // E(eps) = 2 - Theta(eps): the smeared jump always undershoots the
    // vertical-segment length, so the energies approach 2 from below.
    IntegrandSpec ms = IntegrandSpec::minimal_surface(1);
    double prev = 0.0;
    for (double eps : {0.1, 0.05, 0.025, 0.0125, 0.00625}) {
        double h = eps / 25.0;
        int inner = static_cast<int>(std::lround(1.0 / h)) - 1;
        int collar = static_cast<int>(std::ceil(2.0 * eps / h)) + 2;
        auto dom = make_dom(1, 1, h, inner, collar);
        JumpField uj;
        uj.ac = Field(dom);
        uj.jumps = {{0.5, 1.0}};
        Field rec = mollified_recovery(uj, eps);
        double e = energy(ms, rec).value();
        CHECK(e > prev);
        CHECK(e <= 2.0 + 1e-9);
        prev = e;
        if (eps == 0.00625) CHECK(std::fabs(e - 2.0) / 2.0 <= 0.01);
    }
}

TEST_CASE("mollified_recovery: superlinear integrand with a jump blows up like 1/eps") {
    IntegrandSpec q = IntegrandSpec::quadratic(1);
    auto energy_at = [&](double eps) {
        double h = eps / 25.0;
        int inner = static_cast<int>(std::lround(1.0 / h)) - 1;
        int collar = static_cast<int>(std::ceil(2.0 * eps / h)) + 2;
        auto dom = make_dom(1, 1, h, inner, collar);
        JumpField uj;
        uj.ac = Field(dom);
        uj.jumps = {{0.5, 1.0}};
        return energy(q, mollified_recovery(uj, eps)).value();
    };
    double e1 = energy_at(0.1), e2 = energy_at(0.05), e3 = energy_at(0.025);
    CHECK(e2 / e1 >= 1.8);
    CHECK(e3 / e2 >= 1.8);
}
