#pragma once

#include <memory>
#include <string>
#include <vector>

#include "varidual/sampled_function.hpp"

namespace varidual {

enum class IntegrandKind {
    quadratic,        // 0.5*|xi|^2
    p_power,          // |xi|^p / p, p > 1
    minimal_surface,  // sqrt(1 + |xi|^2)
    log_barrier,      // -log(1 - |xi/R|^2) on |xi| < R, +inf outside
    abs_value,        // |xi|
    custom_sampled,   // grid samples, multilinear between nodes
};

std::string kind_name(IntegrandKind k);
bool kind_from_name(const std::string& name, IntegrandKind* out);

// Growth class of an integrand: either a superlinear witness theta with
// theta(t)/t -> inf, or the linear lower bound F >= <x0, .> + c1|.| - c2.
struct CoercivityDescriptor {
    enum class Kind { superlinear, demi_coercive } kind = Kind::superlinear;
    TensorPoint x0;     // demi-coercive only
    double c1 = 0.0;    // demi-coercive only, > 0
    double c2 = 0.0;    // demi-coercive only
};

// A convex integrand from the analytic catalog, or a grid-sampled one.
// Convexity per kind: quadratic and p_power are convex compositions of the
// norm with increasing convex powers; minimal_surface has Hessian
// (1+|xi|^2)^{-3/2}-scaled projector, positive semidefinite; log_barrier is
// -log composed with the concave 1-|xi/R|^2; abs_value is a norm.
class IntegrandSpec {
  public:
    static IntegrandSpec quadratic(int m);
    static IntegrandSpec p_power(int m, double p);
    static IntegrandSpec minimal_surface(int m);
    static IntegrandSpec log_barrier(int m, double radius = 1.0);
    static IntegrandSpec abs_value(int m);
    static IntegrandSpec custom_sampled(std::shared_ptr<const SampledConvexFunction> samples);

    IntegrandKind kind() const { return kind_; }
    int dim() const { return m_; }
    const std::vector<double>& params() const { return params_; }
    const CoercivityDescriptor& coercivity() const { return coercivity_; }
    const SampledConvexFunction* samples() const { return samples_.get(); }

    bool has_closed_form_derivative() const;
    bool has_closed_form_conjugate() const;

    // Superlinear witness theta(t) for (kind with a superlinear descriptor);
    // extended-real because barrier-type integrands jump to +inf.
    ExtendedValue theta(double t) const;

  private:
    IntegrandKind kind_ = IntegrandKind::quadratic;
    std::vector<double> params_;
    int m_ = 1;
    CoercivityDescriptor coercivity_;
    std::shared_ptr<const SampledConvexFunction> samples_;
};

// F(xi); +inf exactly off the effective domain.
ExtendedValue evaluate(const IntegrandSpec& spec, const TensorPoint& xi);

// Distance from xi to the boundary of dom(F); +inf for full-domain kinds.
double boundary_distance(const IntegrandSpec& spec, const TensorPoint& xi);

// F'(xi) via the catalog closed form when available, otherwise central
// differences with step min(1e-5, boundary_distance/8). Throws
// OutsideDomainError on or outside the closure of dom(F).
TensorPoint derivative(const IntegrandSpec& spec, const TensorPoint& xi);

// Closed-form Fenchel conjugate F*(z) for catalog kinds.
// Throws UsageError for kinds without one (custom_sampled).
ExtendedValue conjugate_closed_form(const IntegrandSpec& spec, const TensorPoint& z);

// Recession value lim_{t->inf} F(t xi)/t computed by doubling t = 2^0..2^40
// with early stop once consecutive values differ by < 1e-10*(1+|v|).
// Returns +inf when F(t xi) is infinite, when values exceed 1e12, or when
// the doubling budget ends without stabilising (superlinear growth).
ExtendedValue recession(const IntegrandSpec& spec, const TensorPoint& xi);

// Node-wise samples of F on the given grid. The grid box must contain 0 in
// its interior; throws EmptyDomainError when no node is finite.
SampledConvexFunction sample(const IntegrandSpec& spec, const GridLayout& grid);

struct SmoothnessReport {
    bool smooth_interior = false;    // finite derivative at all interior probes
    bool gradient_blowup = false;    // |F'| -> inf on every ray meeting a finite boundary
    bool no_finite_boundary = false; // no probed ray met a domain boundary
};

// Probes essential smoothness: walks n_rays directions toward the domain
// boundary and watches |F'|.
SmoothnessReport essential_smoothness_probe(const IntegrandSpec& spec, int n_rays, int steps);

}  // namespace varidual
