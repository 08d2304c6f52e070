#include "varidual/integrand.hpp"

#include <algorithm>
#include <cmath>

namespace varidual {

std::string kind_name(IntegrandKind k) {
    switch (k) {
        case IntegrandKind::quadratic: return "quadratic";
        case IntegrandKind::p_power: return "p_power";
        case IntegrandKind::minimal_surface: return "minimal_surface";
        case IntegrandKind::log_barrier: return "log_barrier";
        case IntegrandKind::abs_value: return "abs_value";
        case IntegrandKind::custom_sampled: return "custom_sampled";
    }
    return "?";
}

bool kind_from_name(const std::string& name, IntegrandKind* out) {
    for (IntegrandKind k : {IntegrandKind::quadratic, IntegrandKind::p_power, IntegrandKind::minimal_surface,
                            IntegrandKind::log_barrier, IntegrandKind::abs_value, IntegrandKind::custom_sampled}) {
        if (kind_name(k) == name) {
            *out = k;
            return true;
        }
    }
    return false;
}

namespace {
void require_dim(int m) {
    if (m < 1 || m > 3) throw UsageError("IntegrandSpec: tensor dimension must be 1..3");
}
}  // namespace

IntegrandSpec IntegrandSpec::quadratic(int m) {
    require_dim(m);
    IntegrandSpec s;
    s.kind_ = IntegrandKind::quadratic;
    s.m_ = m;
    s.coercivity_.kind = CoercivityDescriptor::Kind::superlinear;
    return s;
}

IntegrandSpec IntegrandSpec::p_power(int m, double p) {
    require_dim(m);
    if (!(p > 1.0)) throw UsageError("p_power: need p > 1");
    IntegrandSpec s;
    s.kind_ = IntegrandKind::p_power;
    s.m_ = m;
    s.params_ = {p};
    s.coercivity_.kind = CoercivityDescriptor::Kind::superlinear;
    return s;
}

IntegrandSpec IntegrandSpec::minimal_surface(int m) {
    require_dim(m);
    IntegrandSpec s;
    s.kind_ = IntegrandKind::minimal_surface;
    s.m_ = m;
    s.coercivity_.kind = CoercivityDescriptor::Kind::demi_coercive;
    s.coercivity_.x0 = TensorPoint::zeros(m);  // sqrt(1+t^2) >= 0 + 1*t - 0
    s.coercivity_.c1 = 1.0;
    s.coercivity_.c2 = 0.0;
    return s;
}

IntegrandSpec IntegrandSpec::log_barrier(int m, double radius) {
    require_dim(m);
    if (!(radius > 0.0)) throw UsageError("log_barrier: need radius > 0");
    IntegrandSpec s;
    s.kind_ = IntegrandKind::log_barrier;
    s.m_ = m;
    s.params_ = {radius};
    s.coercivity_.kind = CoercivityDescriptor::Kind::superlinear;
    return s;
}

IntegrandSpec IntegrandSpec::abs_value(int m) {
    require_dim(m);
    IntegrandSpec s;
    s.kind_ = IntegrandKind::abs_value;
    s.m_ = m;
    s.coercivity_.kind = CoercivityDescriptor::Kind::demi_coercive;
    s.coercivity_.x0 = TensorPoint::zeros(m);
    s.coercivity_.c1 = 1.0;
    s.coercivity_.c2 = 0.0;
    return s;
}

IntegrandSpec IntegrandSpec::custom_sampled(std::shared_ptr<const SampledConvexFunction> samples) {
    if (!samples) throw UsageError("custom_sampled: null samples");
    IntegrandSpec s;
    s.kind_ = IntegrandKind::custom_sampled;
    s.m_ = samples->dim();
    s.samples_ = std::move(samples);
    s.coercivity_.kind = CoercivityDescriptor::Kind::demi_coercive;
    s.coercivity_.x0 = TensorPoint::zeros(s.m_);
    s.coercivity_.c1 = 1.0;
    s.coercivity_.c2 = 0.0;
    return s;
}

bool IntegrandSpec::has_closed_form_derivative() const { return kind_ != IntegrandKind::custom_sampled; }
bool IntegrandSpec::has_closed_form_conjugate() const { return kind_ != IntegrandKind::custom_sampled; }

ExtendedValue IntegrandSpec::theta(double t) const {
    if (t < 0.0) throw UsageError("theta: negative argument");
    switch (kind_) {
        case IntegrandKind::quadratic: return ExtendedValue::finite(0.5 * t * t);
        case IntegrandKind::p_power: return ExtendedValue::finite(std::pow(t, params_[0]) / params_[0]);
        case IntegrandKind::log_barrier: {
            double r = params_[0];
            if (t >= r) return ExtendedValue::infinity();
            double s = t / r;
            return ExtendedValue::finite(-std::log1p(-s * s));
        }
        default: throw UsageError("theta: integrand carries a demi-coercivity descriptor, not theta");
    }
}

ExtendedValue evaluate(const IntegrandSpec& spec, const TensorPoint& xi) {
    if (xi.dim() != spec.dim()) throw UsageError("evaluate: dimension mismatch");
    switch (spec.kind()) {
        case IntegrandKind::quadratic: return ExtendedValue::finite(0.5 * xi.norm2());
        case IntegrandKind::p_power: {
            double p = spec.params()[0];
            return ExtendedValue::finite(std::pow(xi.norm(), p) / p);
        }
        case IntegrandKind::minimal_surface: return ExtendedValue::finite(std::sqrt(1.0 + xi.norm2()));
        case IntegrandKind::log_barrier: {
            double r = spec.params()[0];
            double s2 = xi.norm2() / (r * r);
            if (s2 >= 1.0) return ExtendedValue::infinity();
            return ExtendedValue::finite(-std::log1p(-s2));
        }
        case IntegrandKind::abs_value: return ExtendedValue::finite(xi.norm());
        case IntegrandKind::custom_sampled: return spec.samples()->interpolate(xi);
    }
    throw UsageError("evaluate: unknown kind");
}

double boundary_distance(const IntegrandSpec& spec, const TensorPoint& xi) {
    switch (spec.kind()) {
        case IntegrandKind::log_barrier: return spec.params()[0] - xi.norm();
        case IntegrandKind::custom_sampled: {
            // Walk outward along each axis to the nearest non-finite node.
            const SampledConvexFunction& f = *spec.samples();
            const GridLayout& g = f.layout();
            int multi[3] = {0, 0, 0};
            for (int a = 0; a < g.dim(); ++a) multi[a] = g.axis(a).nearest(xi[a]);
            double best = 1e308;
            for (int a = 0; a < g.dim(); ++a) {
                for (int dir : {-1, 1}) {
                    int probe[3] = {multi[0], multi[1], multi[2]};
                    int steps = 0;
                    while (probe[a] >= 0 && probe[a] < g.axis(a).count && f.is_finite(g.linear_index(probe))) {
                        probe[a] += dir;
                        ++steps;
                    }
                    bool hit_infinite_node = probe[a] >= 0 && probe[a] < g.axis(a).count;
                    if (hit_infinite_node) best = std::min(best, steps * g.axis(a).step);
                }
            }
            return best;
        }
        default: return 1e308;  // full effective domain
    }
}

namespace {

TensorPoint radial_derivative(const IntegrandSpec& spec, const TensorPoint& xi) {
    // d/dxi of phi(|xi|) is phi'(|xi|) * xi / |xi| componentwise; the inner
    // product weights cancel against the norm gradient.
    double n = xi.norm();
    switch (spec.kind()) {
        case IntegrandKind::quadratic: return xi;
        case IntegrandKind::p_power: {
            double p = spec.params()[0];
            if (n == 0.0) return TensorPoint::zeros(xi.dim());
            return std::pow(n, p - 2.0) * xi;
        }
        case IntegrandKind::minimal_surface: return (1.0 / std::sqrt(1.0 + xi.norm2())) * xi;
        case IntegrandKind::log_barrier: {
            double r = spec.params()[0];
            double denom = r * r - xi.norm2();
            return (2.0 / denom) * xi;
        }
        case IntegrandKind::abs_value: {
            if (n == 0.0) return TensorPoint::zeros(xi.dim());  // minimal-norm subgradient
            return (1.0 / n) * xi;
        }
        default: throw UsageError("radial_derivative: no closed form");
    }
}

}  // namespace

TensorPoint derivative(const IntegrandSpec& spec, const TensorPoint& xi) {
    if (xi.dim() != spec.dim()) throw UsageError("derivative: dimension mismatch");
    double dist = boundary_distance(spec, xi);
    if (!(dist > 0.0)) throw OutsideDomainError("derivative: point on or outside closure of dom(F)");
    if (spec.has_closed_form_derivative()) return radial_derivative(spec, xi);

    // Central differences; for sampled kinds stay at least one cell inside.
    double h = std::min(1e-5, dist / 8.0);
    TensorPoint d = TensorPoint::zeros(spec.dim());
    for (int a = 0; a < spec.dim(); ++a) {
        TensorPoint plus = xi, minus = xi;
        plus[a] += h;
        minus[a] -= h;
        ExtendedValue vp = evaluate(spec, plus), vm = evaluate(spec, minus);
        if (!vp.is_finite() || !vm.is_finite())
            throw OutsideDomainError("derivative: finite-difference stencil leaves dom(F)");
        // Components of the derivative in the weighted pairing: the plain
        // partial divided by the component weight.
        d[a] = (vp.value() - vm.value()) / (2.0 * h) / TensorPoint::component_weight(spec.dim(), a);
    }
    return d;
}

ExtendedValue conjugate_closed_form(const IntegrandSpec& spec, const TensorPoint& z) {
    if (z.dim() != spec.dim()) throw UsageError("conjugate_closed_form: dimension mismatch");
    double n = z.norm();
    switch (spec.kind()) {
        case IntegrandKind::quadratic: return ExtendedValue::finite(0.5 * z.norm2());
        case IntegrandKind::p_power: {
            double p = spec.params()[0];
            double q = p / (p - 1.0);
            return ExtendedValue::finite(std::pow(n, q) / q);
        }
        case IntegrandKind::minimal_surface: {
            if (n > 1.0) return ExtendedValue::infinity();
            return ExtendedValue::finite(-std::sqrt(std::max(0.0, 1.0 - n * n)));
        }
        case IntegrandKind::log_barrier: {
            // sup_xi <xi,z> + log(1 - |xi/R|^2): radial, with |xi| = R*t,
            // t = (sqrt(1 + (Rn)^2) - 1) / (Rn).
            double r = spec.params()[0];
            if (n == 0.0) return ExtendedValue::finite(0.0);
            double a = r * n;
            double t = (std::sqrt(1.0 + a * a) - 1.0) / a;
            return ExtendedValue::finite(a * t + std::log1p(-t * t));
        }
        case IntegrandKind::abs_value: {
            if (n > 1.0) return ExtendedValue::infinity();
            return ExtendedValue::finite(0.0);
        }
        default: throw UsageError("conjugate_closed_form: not available for this kind");
    }
}

ExtendedValue recession(const IntegrandSpec& spec, const TensorPoint& xi) {
    if (xi.dim() != spec.dim()) throw UsageError("recession: dimension mismatch");
    bool have_prev = false;
    double prev = 0.0;
    for (int p = 0; p <= 40; ++p) {
        double t = std::ldexp(1.0, p);
        ExtendedValue fv = evaluate(spec, t * xi);
        if (!fv.is_finite()) return ExtendedValue::infinity();
        double v = fv.value() / t;
        if (v > 1e12) return ExtendedValue::infinity();
        if (have_prev && std::fabs(v - prev) < 1e-10 * (1.0 + std::fabs(v))) return ExtendedValue::finite(v);
        prev = v;
        have_prev = true;
    }
    // Doubling budget exhausted without stabilising: superlinear direction.
    return ExtendedValue::infinity();
}

SampledConvexFunction sample(const IntegrandSpec& spec, const GridLayout& grid) {
    if (grid.dim() != spec.dim()) throw UsageError("sample: dimension mismatch");
    for (int a = 0; a < grid.dim(); ++a) {
        if (!(grid.axis(a).lo < 0.0 && grid.axis(a).hi() > 0.0))
            throw UsageError("sample: box must contain 0 in its interior");
    }
    SampledConvexFunction f(grid);
    std::int64_t finite = 0;
    for (std::int64_t lin = 0; lin < grid.node_count(); ++lin) {
        ExtendedValue v = evaluate(spec, grid.coords_linear(lin));
        f.set(lin, v);
        finite += v.is_finite();
    }
    if (finite == 0) throw EmptyDomainError("sample: dom(F) does not meet the box");
    return f;
}

SmoothnessReport essential_smoothness_probe(const IntegrandSpec& spec, int n_rays, int steps) {
    if (n_rays < 1 || steps < 1) throw UsageError("essential_smoothness_probe: bad counts");
    SmoothnessReport rep;
    const int m = spec.dim();

    std::vector<TensorPoint> rays;
    if (m == 1) {
        rays.push_back(TensorPoint(1.0));
        if (n_rays > 1) rays.push_back(TensorPoint(-1.0));
    } else {
        const double golden = 2.399963229728653;  // radians
        for (int i = 0; i < n_rays; ++i) {
            double phi = golden * i;
            TensorPoint d = TensorPoint::zeros(m);
            if (m == 2) {
                d[0] = std::cos(phi);
                d[1] = std::sin(phi);
            } else {
                double c = -1.0 + 2.0 * (i + 0.5) / n_rays;
                double s = std::sqrt(std::max(0.0, 1.0 - c * c));
                d[0] = s * std::cos(phi);
                d[1] = s * std::sin(phi);
                d[2] = c;
            }
            rays.push_back((1.0 / d.norm()) * d);
        }
    }

    bool any_boundary = false;
    bool all_boundary_blowup = true;
    int interior_ok = 0, interior_total = 0;

    for (const TensorPoint& d : rays) {
        // March outward to find the domain boundary along the ray.
        double t_in = 0.0, t_out = -1.0;
        for (double t = 1e-3; t <= 1e8; t *= 2.0) {
            if (evaluate(spec, t * d).is_finite()) {
                t_in = t;
            } else {
                t_out = t;
                break;
            }
        }
        // Interior smoothness probe halfway to the last finite point.
        if (t_in > 0.0) {
            ++interior_total;
            try {
                TensorPoint g = derivative(spec, (0.5 * t_in) * d);
                (void)g;
                ++interior_ok;
            } catch (const std::exception&) {
            }
        }

        if (t_out < 0.0) continue;  // no finite boundary met on this ray
        any_boundary = true;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (t_in + t_out);
            if (evaluate(spec, mid * d).is_finite())
                t_in = mid;
            else
                t_out = mid;
        }
        double t_star = t_out;

        bool blew_up = false;
        for (int i = 1; i <= steps; ++i) {
            double t = t_star * (1.0 - std::ldexp(1.0, -i));
            if (t <= 0.0) continue;
            try {
                if (derivative(spec, t * d).norm() > 1e6) {
                    blew_up = true;
                    break;
                }
            } catch (const std::exception&) {
                break;  // stencil left the domain before blowup was seen
            }
        }
        if (!blew_up) all_boundary_blowup = false;
    }

    rep.smooth_interior = interior_ok == interior_total;
    rep.no_finite_boundary = !any_boundary;
    rep.gradient_blowup = any_boundary ? all_boundary_blowup : true;  // vacuous
    return rep;
}

}  // namespace varidual
