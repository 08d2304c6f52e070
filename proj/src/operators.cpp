#include "varidual/operators.hpp"

#include <algorithm>
#include <cmath>

namespace varidual {

GradientField grad_k(const Field& u) {
    const GridDomain& d = *u.dom;
    GradientField out(u.dom);
    const double inv_h = 1.0 / d.h;
    const double inv_h2 = inv_h * inv_h;
    const int lo = d.stencil_lo();

    if (d.n == 1) {
        for (int i = lo; i < lo + d.stencil_count(0); ++i) {
            TensorPoint t = TensorPoint::zeros(1);
            if (d.k == 1)
                t[0] = (u.at(i + 1) - u.at(i)) * inv_h;
            else
                t[0] = (u.at(i + 2) - 2.0 * u.at(i + 1) + u.at(i)) * inv_h2;
            out.set(d.stencil_index(i), t);
        }
        return out;
    }

    for (int i = lo; i < lo + d.stencil_count(0); ++i) {
        for (int j = lo; j < lo + d.stencil_count(1); ++j) {
            if (d.k == 1) {
                TensorPoint t = TensorPoint::zeros(2);
                t[0] = (u.at(i + 1, j) - u.at(i, j)) * inv_h;
                t[1] = (u.at(i, j + 1) - u.at(i, j)) * inv_h;
                out.set(d.stencil_index(i, j), t);
            } else {
                TensorPoint t = TensorPoint::zeros(3);
                t[0] = (u.at(i + 2, j) - 2.0 * u.at(i + 1, j) + u.at(i, j)) * inv_h2;
                t[1] = (u.at(i, j + 2) - 2.0 * u.at(i, j + 1) + u.at(i, j)) * inv_h2;
                t[2] = (u.at(i + 1, j + 1) - u.at(i + 1, j) - u.at(i, j + 1) + u.at(i, j)) * inv_h2;
                out.set(d.stencil_index(i, j), t);
            }
        }
    }
    return out;
}

Field divergence_k(const GradientField& sigma) {
    const GridDomain& d = *sigma.dom;
    Field out(sigma.dom);
    const double inv_h = 1.0 / d.h;
    const double inv_h2 = inv_h * inv_h;
    const int lo = d.stencil_lo();
    const double sign = d.k == 1 ? -1.0 : 1.0;  // (-1)^k

    // Transpose of grad_k with component weights folded in, then the (-1)^k
    // sign so the adjoint identity reads
    //   sum <sigma, grad phi> h^n = (-1)^k sum div(sigma) phi h^n.
    auto add = [&](int i, int j, double v) { out.at(i, j) += sign * v; };

    if (d.n == 1) {
        for (int i = lo; i < lo + d.stencil_count(0); ++i) {
            double s = sigma.at(d.stencil_index(i))[0];
            if (d.k == 1) {
                add(i + 1, 0, s * inv_h);
                add(i, 0, -s * inv_h);
            } else {
                add(i + 2, 0, s * inv_h2);
                add(i + 1, 0, -2.0 * s * inv_h2);
                add(i, 0, s * inv_h2);
            }
        }
        return out;
    }

    for (int i = lo; i < lo + d.stencil_count(0); ++i) {
        for (int j = lo; j < lo + d.stencil_count(1); ++j) {
            TensorPoint t = sigma.at(d.stencil_index(i, j));
            if (d.k == 1) {
                add(i + 1, j, t[0] * inv_h);
                add(i, j, -t[0] * inv_h);
                add(i, j + 1, t[1] * inv_h);
                add(i, j, -t[1] * inv_h);
            } else {
                add(i + 2, j, t[0] * inv_h2);
                add(i + 1, j, -2.0 * t[0] * inv_h2);
                add(i, j, t[0] * inv_h2);
                add(i, j + 2, t[1] * inv_h2);
                add(i, j + 1, -2.0 * t[1] * inv_h2);
                add(i, j, t[1] * inv_h2);
                const double w = 2.0 * t[2] * inv_h2;  // component weight 2
                add(i + 1, j + 1, w);
                add(i + 1, j, -w);
                add(i, j + 1, -w);
                add(i, j, w);
            }
        }
    }
    return out;
}

ExtendedValue energy(const EnergyIntegrand& w, const Field& u) {
    const GridDomain& d = *u.dom;
    if (w.dim() != d.m()) throw UsageError("energy: integrand dimension mismatch");
    GradientField g = grad_k(u);
    const double cell = d.n == 1 ? d.h : d.h * d.h;
    double acc = 0.0;
    for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) {
        ExtendedValue v = w.value(g.at(s));
        if (!v.is_finite()) return ExtendedValue::infinity();
        acc += v.value() * cell;
    }
    return ExtendedValue::finite(acc);
}

ExtendedValue energy(const IntegrandSpec& spec, const Field& u) { return energy(SpecIntegrand(spec), u); }

double pairing(const GradientField& sigma, const GradientField& tau) {
    const GridDomain& d = *sigma.dom;
    if (!(*tau.dom == d)) throw UsageError("pairing: domain mismatch");
    const double cell = d.n == 1 ? d.h : d.h * d.h;
    double acc = 0.0;
    for (std::int64_t s = 0; s < d.stencil_node_count(); ++s) acc += sigma.at(s).dot(tau.at(s)) * cell;
    return acc;
}

Field project_constraint(const Field& u, const ConstraintSpec& c) {
    if (c.kind == ConstraintSpec::Kind::unconstrained) return u;
    const GridDomain& d = *u.dom;
    if (!(*c.psi.dom == d)) throw UsageError("project_constraint: domain mismatch");
    Field out = u;
    for (int i = 0; i < d.total(0); ++i)
        for (int j = 0; j < (d.n == 2 ? d.total(1) : 1); ++j)
            if (d.is_free(i, j)) out.at(i, j) = std::max(out.at(i, j), c.psi.at(i, j));
    return out;
}

Field apply_dirichlet(const Field& u, const Field& g) {
    const GridDomain& d = *u.dom;
    if (!(*g.dom == d)) throw UsageError("apply_dirichlet: domain mismatch");
    Field out = u;
    for (int i = 0; i < d.total(0); ++i)
        for (int j = 0; j < (d.n == 2 ? d.total(1) : 1); ++j)
            if (!d.is_free(i, j)) out.at(i, j) = g.at(i, j);
    return out;
}

ExtendedValue bv_energy(const JumpField& uj, const IntegrandSpec& spec) {
    uj.validate();
    const GridDomain& d = *uj.ac.dom;
    if (spec.dim() != 1) throw UsageError("bv_energy: 1D integrand required");

    double acc = 0.0;
    const int lo = d.stencil_lo();
    for (int i = lo; i < lo + d.stencil_count(0); ++i) {
        ExtendedValue v = evaluate(spec, TensorPoint(uj.ac.at(i)));
        if (!v.is_finite()) return ExtendedValue::infinity();
        acc += v.value() * d.h;
    }
    for (const auto& [x, s] : uj.jumps) {
        (void)x;
        ExtendedValue rec = recession(spec, TensorPoint(s > 0.0 ? 1.0 : -1.0));
        if (!rec.is_finite()) return ExtendedValue::infinity();
        acc += std::fabs(s) * rec.value();
    }
    return ExtendedValue::finite(acc);
}

double bump_kernel_1d(double t, double eps) {
    // 1/c = integral of exp(-1/(1-s^2)) over (-1, 1), fixed high-resolution
    // Simpson rule, computed once.
    static const double inv_mass = [] {
        const int n = 20000;  // even
        const double a = -1.0, b = 1.0;
        const double h = (b - a) / n;
        auto f = [](double s) {
            double d = 1.0 - s * s;
            return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
        };
        double acc = f(a) + f(b);
        for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return 1.0 / (acc * h / 3.0);
    }();
    double s = t / eps;
    double d = 1.0 - s * s;
    if (d <= 0.0) return 0.0;
    return inv_mass / eps * std::exp(-1.0 / d);
}

Field mollified_recovery(const JumpField& uj, double eps) {
    uj.validate();
    const GridDomain& d = *uj.ac.dom;
    if (!(eps > 0.0)) throw UsageError("mollified_recovery: eps must be positive");
    if (!(eps < d.collar * d.h / 2.0)) throw UsageError("mollified_recovery: eps must be < collar*h/2");

    // Piecewise-linear read of the density samples, clamped at the ends.
    auto ac_at = [&](double x) {
        double t = x / d.h + (d.collar - d.k);  // inverse of coord()
        int i = static_cast<int>(std::floor(t));
        i = std::clamp(i, 0, d.total(0) - 2);
        double fr = std::clamp(t - i, 0.0, 1.0);
        return (1.0 - fr) * uj.ac.at(i) + fr * uj.ac.at(i + 1);
    };

    // Mollified density at x: 15-point Gauss-Legendre of the 1D bump.
    const MollifierRule& rule = mollifier_rule(1, 15);
    auto density = [&](double x) {
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.points(); ++q) acc += rule.weights[q] * ac_at(x - eps * rule.offsets[q]);
        for (const auto& [xj, s] : uj.jumps) acc += s * bump_kernel_1d(x - xj, eps);
        return acc;
    };

    Field u(uj.ac.dom);
    u.at(0) = 0.0;
    for (int i = 0; i + 1 < d.total(0); ++i) {
        double mid = 0.5 * (d.coord(0, i) + d.coord(0, i + 1));
        u.at(i + 1) = u.at(i) + d.h * density(mid);
    }
    return u;
}

}  // namespace varidual
