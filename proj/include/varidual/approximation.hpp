#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "varidual/conjugation.hpp"
#include "varidual/integrand.hpp"

namespace varidual {

// Smoothing schedule: regularisation radius delta_j and downward shift mu_j
// per index j. The defaults are delta_j = 1/j^3 and mu_j = 1/(j-1), which
// satisfy the chain inequality mu_{j+1} + j*delta_j <= mu_j with margin
// 1/(j^2 (j-1)); the sequence index therefore starts at 2.
struct ScheduleRule {
    std::string name;    // "inv_cube" or "inv_jminus1"
    double scale = 1.0;  // multiplies the base rule

    double eval(int j) const;
};

struct ApproximationSchedule {
    int j_start = 2;
    int j_end = 20;
    ScheduleRule delta_rule{"inv_cube", 1.0};
    ScheduleRule mu_rule{"inv_jminus1", 1.0};
    int quadrature_order = 9;

    double delta(int j) const { return delta_rule.eval(j); }
    double mu(int j) const { return mu_rule.eval(j); }

    // Throws UsageError naming the violated invariant.
    void validate() const;
};

// Tensor-product Gauss-Legendre quadrature of the normalised smooth bump
// kernel on the reference box [-1,1]^m. Weights are normalised numerically
// so the kernel mass is exactly 1 under this rule; constants are then
// reproduced to rounding.
struct MollifierRule {
    int m = 1;
    int order = 9;
    std::vector<double> offsets;  // order^m points, m coordinates each
    std::vector<double> weights;  // same count, sum == 1

    std::size_t points() const { return weights.size(); }
};

const MollifierRule& mollifier_rule(int m, int order);

// Quadrature of fn against the bump kernel of radius delta centred at xi.
// For convex L-Lipschitz fn: fn(xi) <= result <= fn(xi) + L*delta (up to
// rounding), since the rule has unit mass, nonnegative weights and symmetric
// nodes.
template <class Fn>
double mollify_point(Fn&& fn, double delta, const TensorPoint& xi, int quadrature_order) {
    if (quadrature_order < 3) throw UsageError("mollify_point: quadrature order must be >= 3");
    if (!(delta > 0.0)) throw UsageError("mollify_point: delta must be positive");
    const MollifierRule& rule = mollifier_rule(xi.dim(), quadrature_order);
    double acc = 0.0;
    const int m = xi.dim();
    for (std::size_t i = 0; i < rule.points(); ++i) {
        TensorPoint p = xi;
        for (int a = 0; a < m; ++a) p[a] -= delta * rule.offsets[i * static_cast<std::size_t>(m) + static_cast<std::size_t>(a)];
        acc += rule.weights[i] * fn(p);
    }
    return acc;
}

// max over finite dual nodes with |z| <= j of <xi,z> - F*(z): real-valued,
// convex and j-Lipschitz in xi. Exhaustive scan; the normative path.
double truncated_biconjugate(const ConjugatePair& pair, double j, const TensorPoint& xi);

// Upper-envelope evaluator for the same maximum (binary search over hull
// breakpoints per dual row). Agrees with the exhaustive scan to 1e-12 of the
// local scale; used inside cache construction. Dimension 3 stores the plain
// candidate list.
class TruncatedEnvelope {
  public:
    TruncatedEnvelope(const SampledConvexFunction& dual, double j);
    double eval(const TensorPoint& xi) const;
    double radius() const { return j_; }

    // 1D convolution with the bump kernel of radius delta, integrated piece
    // by piece between the envelope breakpoints, so each panel sees a smooth
    // kernel times an affine function. Free of the kink-aliasing noise a
    // fixed-node rule produces, which matters because the smoothing member's
    // derivative divides the value noise by the cache spacing.
    double mollified_eval_1d(double xi, double delta, int order) const;

  private:
    struct Hull {
        std::vector<double> slope;      // ascending
        std::vector<double> intercept;  // -F*(z)
        std::vector<double> breakpoint;
        double offset_slope = 0.0;      // m==2: the row's fixed coordinate
        double eval(double u) const;
    };
    int m_ = 1;
    double j_ = 1.0;
    std::vector<Hull> hulls_;
    std::vector<double> wc_, val_;  // m==3 fallback candidates
};

// One member F_j of the smoothing sequence: cached values and derivative on
// a rectangular grid, j-Lipschitz, with F_j <= F at finite-F nodes.
class Approximant {
  public:
    int j() const { return j_; }
    double delta() const { return delta_; }
    double mu() const { return mu_; }
    int quadrature_order() const { return order_; }
    double lipschitz_bound() const { return j_; }
    const GridLayout& cache_grid() const { return grid_; }
    const std::vector<double>& cached_values() const { return values_; }
    std::uint64_t source_hash() const { return source_hash_; }

    struct Eval {
        double value = 0.0;
        bool off_cache = false;
    };

    // Inside the cache box: cubic Hermite through the value and derivative
    // caches in 1D (value and gradient share one C^1 patch, which first-order
    // solvers need), multilinear for m >= 2. Off the box the exact slow path
    // (envelope + mollification) is used and flagged.
    Eval value_checked(const TensorPoint& xi) const;
    double value(const TensorPoint& xi) const { return value_checked(xi).value; }

    // Interpolated central-difference derivative; off-cache by finite
    // differences of the slow path.
    TensorPoint derivative(const TensorPoint& xi) const;

    // Exact construction path at an arbitrary point.
    double value_slow(const TensorPoint& xi) const;

    SampledConvexFunction cache_as_sampled() const;
    void write_sidecar_json(const std::string& path) const;

    friend Approximant build_approximant(const ConjugatePair& pair, int j, const ApproximationSchedule& schedule,
                                         const GridLayout& cache_grid);

  private:
    bool hermite_cell(const TensorPoint& xi, void* cell_out) const;

    int j_ = 2;
    double delta_ = 0.0, mu_ = 0.0;
    int order_ = 9;
    GridLayout grid_;
    std::vector<double> values_;
    std::vector<double> derivs_;  // m components per node
    std::shared_ptr<const TruncatedEnvelope> envelope_;
    std::uint64_t source_hash_ = 0;
};

// F_j = (bump of radius delta_j) * (truncated biconjugate at level j) - mu_j
// cached on cache_grid. Requires cache spacing <= delta_j / 4 and a dual
// grid covering the ball of radius j.
Approximant build_approximant(const ConjugatePair& pair, int j, const ApproximationSchedule& schedule,
                              const GridLayout& cache_grid);

struct ConvergenceRow {
    int j = 0;
    double sup_value_gap = 0.0;
    double sup_deriv_gap = 0.0;
    std::vector<double> recession_at_rays;  // one per probe ray; 1e300 marks +inf
};

// Per-j sup gaps |F_j - F| and |F_j' - F'| over a compact point set inside
// dom(F), plus recession values of F_j along probe rays via the doubling
// rule on the slow path.
std::vector<ConvergenceRow> convergence_report(const IntegrandSpec& spec, const ConjugatePair& pair,
                                               const ApproximationSchedule& schedule,
                                               const std::vector<TensorPoint>& compact_set,
                                               const std::vector<TensorPoint>& probe_rays,
                                               const GridLayout& cache_grid);

// Doubling-rule recession of an approximant along xi (slow path).
ExtendedValue approximant_recession(const Approximant& a, const TensorPoint& xi);

// Default conjugate-pair construction for catalog integrands: primal box
// wide enough to witness slopes past dual_radius, dual trimmed to the
// witnessed slope range.
struct PairGrids {
    double primal_radius = 24.0;
    double primal_spacing = 0.005;
    double dual_radius = 21.0;
    double dual_spacing = 0.005;
};
PairGrids default_pair_grids(const IntegrandSpec& spec, int j_max, double dual_spacing_hint = 0.0);
ConjugatePair build_trimmed_pair(const IntegrandSpec& spec, const PairGrids& grids);

}  // namespace varidual
