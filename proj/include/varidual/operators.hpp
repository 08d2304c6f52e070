#pragma once

#include "varidual/approximation.hpp"
#include "varidual/grid_domain.hpp"
#include "varidual/integrand.hpp"

namespace varidual {

// Value/derivative interface the energy and the solver drive. Implemented
// by the analytic catalog and by smoothing-sequence approximants.
class EnergyIntegrand {
  public:
    virtual ~EnergyIntegrand() = default;
    virtual int dim() const = 0;
    virtual ExtendedValue value(const TensorPoint& xi) const = 0;
    virtual TensorPoint grad(const TensorPoint& xi) const = 0;
};

class SpecIntegrand final : public EnergyIntegrand {
  public:
    explicit SpecIntegrand(IntegrandSpec spec) : spec_(std::move(spec)) {}
    int dim() const override { return spec_.dim(); }
    ExtendedValue value(const TensorPoint& xi) const override { return evaluate(spec_, xi); }
    TensorPoint grad(const TensorPoint& xi) const override { return derivative(spec_, xi); }
    const IntegrandSpec& spec() const { return spec_; }

  private:
    IntegrandSpec spec_;
};

class ApproximantIntegrand final : public EnergyIntegrand {
  public:
    explicit ApproximantIntegrand(const Approximant* a) : a_(a) {}
    int dim() const override { return a_->cache_grid().dim(); }
    ExtendedValue value(const TensorPoint& xi) const override { return ExtendedValue::finite(a_->value(xi)); }
    TensorPoint grad(const TensorPoint& xi) const override { return a_->derivative(xi); }
    const Approximant& approximant() const { return *a_; }

  private:
    const Approximant* a_;
};

// k-fold forward differences scaled by h^{-k}; for n=2, k=2 the mixed
// partial is the symmetrised cross difference. Exact on polynomials of
// degree <= k.
GradientField grad_k(const Field& u);

// Negative adjoint of grad_k under the discrete inner product, up to the
// sign (-1)^k:
//   sum <sigma, grad_k phi> h^n = (-1)^k sum divergence_k(sigma) phi h^n
// for every phi vanishing on the collar. This identity is the defining
// contract.
Field divergence_k(const GradientField& sigma);

// Riemann sum of W over the stencil range: sum W(grad_k u) h^n, +inf as
// soon as a stencil value leaves dom(W). Deterministic accumulation order.
ExtendedValue energy(const EnergyIntegrand& w, const Field& u);
ExtendedValue energy(const IntegrandSpec& spec, const Field& u);

// Pairing sum <sigma, tau> h^n over stencil bases.
double pairing(const GradientField& sigma, const GradientField& tau);

// Identity for unconstrained; pointwise max(u, psi) on free nodes for
// obstacle constraints. Idempotent and nonexpansive.
Field project_constraint(const Field& u, const ConstraintSpec& c);

// Collar nodes set to g, free nodes preserved.
Field apply_dirichlet(const Field& u, const Field& g);

// 1D: sum F(ac) h over stencils plus sum |s_i| F^inf(sign(s_i)); +inf when
// a jump meets a superlinear direction.
ExtendedValue bv_energy(const JumpField& uj, const IntegrandSpec& spec);

// 1D: the field whose derivative density is the mollified ac part plus
// bump kernels of radius eps at the jumps, integrated from the left edge by
// the midpoint rule (so forward differences reproduce the density at cell
// midpoints). Requires eps < collar*h/2.
Field mollified_recovery(const JumpField& uj, double eps);

// Normalised 1D bump kernel value at t for radius eps.
double bump_kernel_1d(double t, double eps);

}  // namespace varidual
