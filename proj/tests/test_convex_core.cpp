#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "doctest.h"
#include "varidual/approximation.hpp"
#include "varidual/conjugation.hpp"
#include "varidual/integrand.hpp"

using namespace varidual;

namespace {

// Independent exhaustive conjugation oracle: plain double loop over an
// arbitrary candidate list, no shared code with the library paths.
double oracle_conjugate_1d(const std::vector<double>& xi, const std::vector<double>& f, double z) {
    double best = -1e308;
    for (std::size_t i = 0; i < xi.size(); ++i) best = std::max(best, xi[i] * z - f[i]);
    return best;
}

SampledConvexFunction sample_fn(const GridLayout& g, const std::function<ExtendedValue(const TensorPoint&)>& fn) {
    SampledConvexFunction f(g);
    for (std::int64_t i = 0; i < g.node_count(); ++i) f.set(i, fn(g.coords_linear(i)));
    return f;
}

}  // namespace

TEST_CASE("evaluate: catalog values") {
    CHECK(evaluate(IntegrandSpec::quadratic(1), TensorPoint(2.0)).value() == doctest::Approx(2.0));
    CHECK(evaluate(IntegrandSpec::log_barrier(1), TensorPoint(1.5)).is_infinite());
    CHECK(evaluate(IntegrandSpec::minimal_surface(1), TensorPoint(0.0)).value() == doctest::Approx(1.0));
    CHECK_THROWS_AS(evaluate(IntegrandSpec::quadratic(2), TensorPoint(1.0)), UsageError);
}

TEST_CASE("evaluate: m=3 inner product counts the cross component twice") {
    // |xi|^2 for (a,b,c) representing a symmetric 2x2 tensor is a^2+b^2+2c^2.
    TensorPoint xi(1.0, 2.0, 3.0);
    CHECK(xi.norm2() == doctest::Approx(1.0 + 4.0 + 18.0));
    CHECK(evaluate(IntegrandSpec::quadratic(3), xi).value() == doctest::Approx(0.5 * 23.0));
}

TEST_CASE("sample: catalog grids") {
    GridLayout g = GridLayout::centered(1, 4.0, 0.01);
    SampledConvexFunction q = sample(IntegrandSpec::quadratic(1), g);
    CHECK(q.finite_count() == q.node_count());
    CHECK(q.check_convexity().ok());

    GridLayout g2 = GridLayout::centered(1, 2.0, 0.01);
    SampledConvexFunction lb = sample(IntegrandSpec::log_barrier(1), g2);
    for (std::int64_t i = 0; i < g2.node_count(); ++i) {
        bool inside = std::fabs(g2.coords_linear(i)[0]) < 1.0;
        CHECK(lb.is_finite(i) == inside);
    }
    CHECK(lb.check_convexity().ok());

    SampledConvexFunction av = sample(IntegrandSpec::abs_value(1), g);
    for (std::int64_t i = 0; i < g.node_count(); ++i) CHECK(av.raw(i) == std::fabs(g.coords_linear(i)[0]));

    GridLayout off({{0.5, 0.1, 5}});
    CHECK_THROWS_AS(sample(IntegrandSpec::quadratic(1), off), UsageError);
}

TEST_CASE("conjugate: quadratic is self-dual up to grid truncation") {
    GridLayout g = GridLayout::centered(1, 4.0, 0.01);
    SampledConvexFunction f = sample(IntegrandSpec::quadratic(1), g);
    ConjugatePair pair = conjugate(f, GridLayout::centered(1, 3.0, 0.01));
    for (std::int64_t i = 0; i < pair.dual.node_count(); ++i) {
        double z = pair.dual.layout().coords_linear(i)[0];
        double err = std::fabs(pair.dual.raw(i) - 0.5 * z * z);
        CHECK(err <= 0.01 * std::fabs(z) + 0.01 * 0.01 / 2.0 + 1e-12);
    }
}

TEST_CASE("conjugate: minimal surface against a 10x finer offline oracle") {
    GridLayout g = GridLayout::centered(1, 50.0, 0.1);
    SampledConvexFunction f = sample(IntegrandSpec::minimal_surface(1), g);
    ConjugatePair pair = conjugate(f, GridLayout::centered(1, 2.0, 0.05));

    std::vector<double> xi_fine, f_fine;
    for (double x = -50.0; x <= 50.0 + 1e-12; x += 0.01) {
        xi_fine.push_back(x);
        f_fine.push_back(std::sqrt(1.0 + x * x));
    }
    for (std::int64_t i = 0; i < pair.dual.node_count(); ++i) {
        double z = pair.dual.layout().coords_linear(i)[0];
        if (std::fabs(z) <= 0.95) {
            double oracle = oracle_conjugate_1d(xi_fine, f_fine, z);
            CHECK(std::fabs(pair.dual.raw(i) - oracle) <= 2e-2);
            CHECK(std::fabs(pair.dual.raw(i) - (-std::sqrt(1.0 - z * z))) <= 2e-2);
        }
        if (std::fabs(z) >= 1.2) {
            // box truncation: linear growth with the primal radius as slope
            CHECK(pair.dual.raw(i) >= 50.0 * (std::fabs(z) - 1.0) - 2.0);
        }
    }
}

TEST_CASE("conjugate: abs value has the box-truncated closed form") {
    const double R = 4.0;
    GridLayout g = GridLayout::centered(1, R, 0.001);
    SampledConvexFunction f = sample(IntegrandSpec::abs_value(1), g);
    ConjugatePair pair = conjugate(f, GridLayout::centered(1, 3.0, 0.01));
    for (std::int64_t i = 0; i < pair.dual.node_count(); ++i) {
        double z = pair.dual.layout().coords_linear(i)[0];
        double expect = std::fabs(z) <= 1.0 ? 0.0 : R * (std::fabs(z) - 1.0);
        CHECK(pair.dual.raw(i) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("conjugate: Young inequality on all grid pairs and order reversal") {
    GridLayout g = GridLayout::centered(1, 2.0, 0.05);
    GridLayout dual = GridLayout::centered(1, 2.0, 0.07);
    SampledConvexFunction f = sample(IntegrandSpec::quadratic(1), g);
    SampledConvexFunction h = sample_fn(g, [](const TensorPoint& p) {
        return ExtendedValue::finite(0.5 * p[0] * p[0] + std::fabs(p[0]));
    });
    ConjugatePair pf = conjugate(f, dual), ph = conjugate(h, dual);

    for (std::int64_t zi = 0; zi < dual.node_count(); ++zi) {
        TensorPoint z = dual.coords_linear(zi);
        for (std::int64_t xi = 0; xi < g.node_count(); ++xi) {
            TensorPoint x = g.coords_linear(xi);
            double gap = f.raw(xi) + pf.dual.raw(zi) - x.dot(z);
            double scale = std::max({1.0, std::fabs(f.raw(xi)), std::fabs(pf.dual.raw(zi))});
            CHECK(gap >= -1e-12 * scale);
        }
        // f <= h pointwise implies f* >= h*
        CHECK(pf.dual.raw(zi) >= ph.dual.raw(zi) - 1e-12);
    }
}

TEST_CASE("biconjugate: convex inputs are reproduced") {
    GridLayout g = GridLayout::centered(1, 4.0, 0.01);
    SampledConvexFunction f = sample(IntegrandSpec::quadratic(1), g);
    ConjugatePair pair = conjugate(f, GridLayout::centered(1, 5.0, 0.01));
    GridLayout q = GridLayout::centered(1, 2.0, 0.01);
    SampledConvexFunction fss = biconjugate(pair, q);
    for (std::int64_t i = 0; i < q.node_count(); ++i) {
        double x = q.coords_linear(i)[0];
        CHECK(std::fabs(fss.raw(i) - 0.5 * x * x) <= 2.0 * (0.01 * std::fabs(x) + 1e-4));
        CHECK(fss.raw(i) <= 0.5 * x * x + 1e-12);  // f** <= f
    }
}

TEST_CASE("biconjugate: double well relaxes to its convex hull") {
    GridLayout g = GridLayout::centered(1, 3.0, 0.005);
    SampledConvexFunction w = sample_fn(g, [](const TensorPoint& p) {
        double a = (p[0] - 1.0) * (p[0] - 1.0), b = (p[0] + 1.0) * (p[0] + 1.0);
        return ExtendedValue::finite(std::min(a, b));
    });
    ConjugatePair pair = conjugate(w, GridLayout::centered(1, 5.0, 0.005));
    GridLayout q = GridLayout::centered(1, 2.0, 0.05);
    SampledConvexFunction hull = biconjugate(pair, q);

    // Independent oracle: brute biconjugation through a fine dual sweep.
    std::vector<double> xs, fs;
    for (std::int64_t i = 0; i < g.node_count(); ++i) {
        xs.push_back(g.coords_linear(i)[0]);
        fs.push_back(w.raw(i));
    }
    for (std::int64_t i = 0; i < q.node_count(); ++i) {
        double x = q.coords_linear(i)[0];
        double best = -1e308;
        for (double z = -5.0; z <= 5.0 + 1e-12; z += 0.005) {
            best = std::max(best, x * z - oracle_conjugate_1d(xs, fs, z));
        }
        CHECK(std::fabs(hull.raw(i) - best) <= 1e-6);
        double expect = std::fabs(x) <= 1.0 ? 0.0 : (std::fabs(x) - 1.0) * (std::fabs(x) - 1.0);
        CHECK(std::fabs(hull.raw(i) - expect) <= 5e-3);
    }
}

TEST_CASE("biconjugate: indicator-style sample is unchanged") {
    GridLayout g = GridLayout::centered(1, 2.0, 0.01);
    SampledConvexFunction ind = sample_fn(g, [](const TensorPoint& p) {
        return std::fabs(p[0]) <= 1.0 ? ExtendedValue::finite(0.0) : ExtendedValue::infinity();
    });
    ConjugatePair pair = conjugate(ind, GridLayout::centered(1, 8.0, 0.01));
    SampledConvexFunction back = biconjugate(pair, g);
    for (std::int64_t i = 0; i < g.node_count(); ++i) {
        double x = std::fabs(g.coords_linear(i)[0]);
        if (x <= 1.0) CHECK(std::fabs(back.raw(i)) <= 8.0 * 1e-12 + 1e-9);
        // outside: the dual box caps the slope at 8, so values grow linearly
        if (x > 1.1) CHECK(back.raw(i) >= 8.0 * (x - 1.0) - 1e-6);
    }
}

TEST_CASE("recession: catalog limits and positive homogeneity") {
    IntegrandSpec ms = IntegrandSpec::minimal_surface(1);
    CHECK(recession(ms, TensorPoint(1.0)).value() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(recession(IntegrandSpec::quadratic(1), TensorPoint(1.0)).is_infinite());
    CHECK(recession(IntegrandSpec::abs_value(1), TensorPoint(-3.0)).value() == doctest::Approx(3.0));
    CHECK(recession(IntegrandSpec::log_barrier(1), TensorPoint(0.5)).is_infinite());
    CHECK(recession(IntegrandSpec::log_barrier(1), TensorPoint(0.0)).value() == doctest::Approx(0.0));

    for (double t : {0.5, 2.0, 10.0}) {
        ExtendedValue a = recession(ms, t * TensorPoint(1.3));
        ExtendedValue b = recession(ms, TensorPoint(1.3));
        REQUIRE(a.is_finite());
        REQUIRE(b.is_finite());
        CHECK(std::fabs(a.value() - t * b.value()) <= 1e-8 * (1.0 + t));
    }
}

TEST_CASE("derivative: closed forms and finite-difference agreement") {
    CHECK(derivative(IntegrandSpec::quadratic(1), TensorPoint(2.0))[0] == doctest::Approx(2.0));
    CHECK(derivative(IntegrandSpec::minimal_surface(1), TensorPoint(0.0))[0] == doctest::Approx(0.0));
    CHECK(derivative(IntegrandSpec::log_barrier(1), TensorPoint(0.99))[0] ==
          doctest::Approx(2.0 * 0.99 / (1.0 - 0.99 * 0.99)).epsilon(1e-10));
    CHECK_THROWS_AS(derivative(IntegrandSpec::log_barrier(1), TensorPoint(1.0)), OutsideDomainError);

    std::mt19937_64 rng(20240811);
    auto check_fd = [&](const IntegrandSpec& spec, double lo, double hi) {
        std::uniform_real_distribution<double> pts(lo, hi);
        for (int trial = 0; trial < 100; ++trial) {
            double x = pts(rng);
            if (spec.kind() == IntegrandKind::abs_value && std::fabs(x) < 0.05) continue;
            TensorPoint xi(x);
            double h = 1e-6 * std::max(1.0, std::fabs(x));
            double fd =
                (evaluate(spec, TensorPoint(x + h)).value() - evaluate(spec, TensorPoint(x - h)).value()) / (2.0 * h);
            double d = derivative(spec, xi)[0];
            CHECK(std::fabs(d - fd) <= 1e-6 * std::max(1.0, std::fabs(d)));
        }
    };
    check_fd(IntegrandSpec::quadratic(1), -3.0, 3.0);
    check_fd(IntegrandSpec::p_power(1, 3.0), -3.0, 3.0);
    check_fd(IntegrandSpec::minimal_surface(1), -3.0, 3.0);
    check_fd(IntegrandSpec::log_barrier(1), -0.9, 0.9);
    check_fd(IntegrandSpec::abs_value(1), -3.0, 3.0);
}

TEST_CASE("conjugate_closed_form: Fenchel equality at gradient pairs") {
    std::mt19937_64 rng(7);
    auto check_kind = [&](const IntegrandSpec& spec, double lo, double hi) {
        std::uniform_real_distribution<double> pts(lo, hi);
        for (int t = 0; t < 100; ++t) {
            double x = pts(rng);
            if (spec.kind() == IntegrandKind::abs_value && std::fabs(x) < 0.05) continue;
            TensorPoint xi(x);
            TensorPoint z = derivative(spec, xi);
            ExtendedValue fs = conjugate_closed_form(spec, z);
            REQUIRE(fs.is_finite());
            double gap = fs.value() + evaluate(spec, xi).value() - xi.dot(z);
            CHECK(std::fabs(gap) <= 1e-9);
        }
    };
    check_kind(IntegrandSpec::quadratic(1), -3.0, 3.0);
    check_kind(IntegrandSpec::p_power(1, 3.0), -3.0, 3.0);
    check_kind(IntegrandSpec::minimal_surface(1), -3.0, 3.0);
    check_kind(IntegrandSpec::log_barrier(1), -0.9, 0.9);
    check_kind(IntegrandSpec::abs_value(1), -3.0, 3.0);
}

TEST_CASE("check_demi_coercivity: support function of the unit ball gives c = 0 exactly") {
    GridLayout g = GridLayout::centered(1, 2.0, 0.01);
    SampledConvexFunction ind = sample_fn(g, [](const TensorPoint& p) {
        return std::fabs(p[0]) <= 1.0 ? ExtendedValue::finite(0.0) : ExtendedValue::infinity();
    });
    ConjugatePair pair = conjugate(ind, GridLayout::centered(1, 6.0, 0.01));

    DemiCoercivityResult res = check_demi_coercivity(pair.dual, TensorPoint::zeros(1), 1.0);
    REQUIRE(res.success);
    CHECK(res.certificate.c == 0.0);

    DemiCoercivityResult fail = check_demi_coercivity(pair.dual, TensorPoint::zeros(1), 1.01);
    CHECK(!fail.success);
    CHECK(fail.witnessed_slope == doctest::Approx(1.0));

    CHECK_THROWS_AS(check_demi_coercivity(pair.dual, TensorPoint::zeros(1), -1.0), UsageError);
}

TEST_CASE("check_demi_coercivity: quadratic dual reaches c = -1/2") {
    GridLayout dualg = GridLayout::centered(1, 4.0, 0.001);
    SampledConvexFunction dual = sample(IntegrandSpec::quadratic(1), dualg);  // F* = F for the quadratic

    // independent brute minimum of z^2/2 - |z| over the grid
    double oracle = 1e308;
    for (std::int64_t i = 0; i < dualg.node_count(); ++i) {
        double z = dualg.coords_linear(i)[0];
        oracle = std::min(oracle, 0.5 * z * z - std::fabs(z));
    }

    DemiCoercivityResult res = check_demi_coercivity(dual, TensorPoint::zeros(1), 1.0);
    REQUIRE(res.success);
    CHECK(res.certificate.c == oracle);
    CHECK(std::fabs(res.certificate.c - (-0.5)) <= 1e-9);
}

TEST_CASE("check_demi_coercivity: sampled minimal-surface dual rejects r past the witnessed slope") {
    // Box-truncated conjugate of the minimal surface integrand: finite
    // everywhere with boundary slope ~ primal radius.
    const double R = 10.0;
    GridLayout g = GridLayout::centered(1, R, 0.01);
    SampledConvexFunction f = sample(IntegrandSpec::minimal_surface(1), g);
    ConjugatePair pair = conjugate(f, GridLayout::centered(1, 3.0, 0.01));

    DemiCoercivityResult ok = check_demi_coercivity(pair.dual, TensorPoint::zeros(1), 2.0);
    CHECK(ok.success);
    DemiCoercivityResult fail = check_demi_coercivity(pair.dual, TensorPoint::zeros(1), R + 1.0);
    CHECK(!fail.success);
    CHECK(fail.witnessed_slope <= R + 1e-6);
}

TEST_CASE("check_demi_coercivity: ball inside the domain certifies with c >= -sup over the ball") {
    struct Case {
        IntegrandSpec spec;
        double r;
    };
    std::vector<Case> cases{{IntegrandSpec::quadratic(1), 1.0},
                            {IntegrandSpec::p_power(1, 3.0), 1.5},
                            {IntegrandSpec::log_barrier(1), 0.5}};
    for (const Case& c : cases) {
        PairGrids grids = default_pair_grids(c.spec, 4);
        grids.dual_spacing = 0.005;
        ConjugatePair pair = build_trimmed_pair(c.spec, grids);
        DemiCoercivityResult res = check_demi_coercivity(pair.dual, TensorPoint::zeros(1), c.r);
        REQUIRE(res.success);
        double sup = 0.0;
        for (double x = -c.r; x <= c.r + 1e-12; x += c.r / 64.0)
            sup = std::max(sup, evaluate(c.spec, TensorPoint(x)).value());
        CHECK(res.certificate.c >= -sup - 1e-9);
    }
}

TEST_CASE("essential_smoothness_probe: barrier blows up, quadratic has no boundary, kinked sample does not") {
    SmoothnessReport lb = essential_smoothness_probe(IntegrandSpec::log_barrier(1), 2, 40);
    CHECK(lb.gradient_blowup);
    CHECK(!lb.no_finite_boundary);

    SmoothnessReport q = essential_smoothness_probe(IntegrandSpec::quadratic(1), 2, 40);
    CHECK(q.no_finite_boundary);
    CHECK(q.gradient_blowup);  // vacuous
    CHECK(q.smooth_interior);

    // f(x) = x on [0,1], +inf outside: bounded slope at the boundary.
    GridLayout g({{-0.5, 0.01, 201}});
    SampledConvexFunction s(g);
    for (std::int64_t i = 0; i < g.node_count(); ++i) {
        double x = g.coords_linear(i)[0];
        if (x >= 0.0 && x <= 1.0)
            s.set_finite(i, x);
        else
            s.set_infinite(i);
    }
    IntegrandSpec custom = IntegrandSpec::custom_sampled(std::make_shared<SampledConvexFunction>(s));
    SmoothnessReport cr = essential_smoothness_probe(custom, 2, 30);
    CHECK(!cr.no_finite_boundary);
    CHECK(!cr.gradient_blowup);
}

TEST_CASE("accelerated conjugation equals the exhaustive scan bit for bit") {
    auto check_equal = [](const SampledConvexFunction& f, const GridLayout& dual) {
        ConjugatePair a = conjugate_brute(f, dual);
        ConjugatePair b = conjugate_fast(f, dual);
        REQUIRE(a.dual.node_count() == b.dual.node_count());
        for (std::int64_t i = 0; i < a.dual.node_count(); ++i) {
            CHECK(a.dual.raw(i) == b.dual.raw(i));
            CHECK(a.argmax[static_cast<std::size_t>(i)] == b.argmax[static_cast<std::size_t>(i)]);
        }
    };

    GridLayout g1 = GridLayout::centered(1, 2.0, 0.004);  // 1001 nodes
    GridLayout d1 = GridLayout::centered(1, 3.0, 0.007);
    check_equal(sample(IntegrandSpec::quadratic(1), g1), d1);
    check_equal(sample(IntegrandSpec::abs_value(1), g1), d1);          // massive ties at |z| = 1
    check_equal(sample(IntegrandSpec::minimal_surface(1), g1), d1);
    check_equal(sample_fn(g1, [](const TensorPoint& p) { return ExtendedValue::finite(2.0 * p[0]); }), d1);
    check_equal(sample_fn(g1, [](const TensorPoint&) { return ExtendedValue::finite(1.0); }), d1);
    check_equal(sample_fn(g1,
                          [](const TensorPoint& p) {
                              return std::fabs(p[0]) <= 1.0 ? ExtendedValue::finite(0.0) : ExtendedValue::infinity();
                          }),
                d1);

    GridLayout g2 = GridLayout::centered(2, 1.0, 0.05);  // 41x41
    GridLayout d2 = GridLayout::centered(2, 1.5, 0.1);   // 31x31
    check_equal(sample(IntegrandSpec::quadratic(2), g2), d2);
    check_equal(sample(IntegrandSpec::abs_value(2), g2), d2);
    check_equal(sample(IntegrandSpec::log_barrier(2), GridLayout::centered(2, 0.9, 0.05)), d2);
}

TEST_CASE("trim_dual_to_witnessed_slopes marks unreachable slopes infinite") {
    GridLayout g = GridLayout::centered(1, 10.0, 0.01);
    SampledConvexFunction f = sample(IntegrandSpec::minimal_surface(1), g);
    ConjugatePair pair = conjugate(f, GridLayout::centered(1, 3.0, 0.001));
    SampledConvexFunction trimmed = trim_dual_to_witnessed_slopes(f, pair.dual);
    double smax = 10.0 / std::sqrt(1.0 + 100.0);
    for (std::int64_t i = 0; i < trimmed.node_count(); ++i) {
        double z = trimmed.layout().coords_linear(i)[0];
        if (std::fabs(z) > smax + 1e-3) CHECK(!trimmed.is_finite(i));
        if (std::fabs(z) < smax - 1e-3) CHECK(trimmed.is_finite(i));
    }
}

TEST_CASE("csv round trip is lossless") {
    SampledConvexFunction f = sample(IntegrandSpec::log_barrier(1), GridLayout::centered(1, 1.5, 0.1));
    std::stringstream ss;
    f.write_csv(ss);
    SampledConvexFunction back = SampledConvexFunction::read_csv(ss);
    REQUIRE(back.node_count() == f.node_count());
    REQUIRE(back.layout() == f.layout());
    for (std::int64_t i = 0; i < f.node_count(); ++i) {
        CHECK(back.is_finite(i) == f.is_finite(i));
        if (f.is_finite(i)) CHECK(back.raw(i) == f.raw(i));
    }

    GridLayout g2 = GridLayout::centered(2, 0.5, 0.25);
    SampledConvexFunction f2 = sample(IntegrandSpec::quadratic(2), g2);
    std::stringstream s2;
    f2.write_csv(s2);
    SampledConvexFunction b2 = SampledConvexFunction::read_csv(s2);
    REQUIRE(b2.layout() == f2.layout());
    for (std::int64_t i = 0; i < f2.node_count(); ++i) CHECK(b2.raw(i) == f2.raw(i));
}
