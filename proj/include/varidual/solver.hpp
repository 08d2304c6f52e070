#pragma once

#include <cstdint>

#include "varidual/operators.hpp"

namespace varidual {

struct SolveConfig {
    int max_inner_iters = 200000;
    double grad_tol = 1e-8;       // stop on the projected-gradient residual
    double armijo_c = 1e-4;
    double armijo_backtrack = 0.5;
    double init_step = 1.0;
    std::uint64_t seed = 0;
    bool warm_start = true;

    void validate() const;
};

struct SolveReport {
    int j = 0;
    Field u;
    GradientField sigma;
    double f = 0.0;  // energy of u under the minimised integrand
    int iters = 0;
    double residual = 0.0;
    bool converged = false;
    // Filled by the schedule when a reference solution is available.
    double gap_to_reference = 0.0;
    double ekeland_distance = 0.0;
    double epsilon_j = 0.0;
    bool has_reference = false;
};

// Projected gradient descent with Armijo backtracking on
// v -> sum W(grad_k v) h^n over the Dirichlet-plus-obstacle feasible set.
// The descent direction is the negative energy gradient
// (-1)^{k+1} divergence_k(W'(grad_k v)) masked to free nodes; iterates are
// projected after every step and the objective never increases. Deterministic.
SolveReport minimize_integrand(const EnergyIntegrand& w, const Field& g, const ConstraintSpec& c,
                               const SolveConfig& cfg, const Field* warm_start = nullptr);

// The same entry for one smoothing-sequence member.
SolveReport minimize_approximant(const Approximant& a, const Field& g, const ConstraintSpec& c,
                                 const SolveConfig& cfg, const Field* warm_start = nullptr);

// sigma_j = F_j'(grad_k u_j), node-wise through the approximant derivative;
// bounded by the Lipschitz constant j.
GradientField extract_dual(const Approximant& a, const Field& u);

struct ScheduleResult {
    std::vector<SolveReport> reports;
    std::vector<Approximant> approximants;
    bool monotone_ok = true;       // f_j nondecreasing within 10*grad_tol
    double worst_monotone_violation = 0.0;
    bool has_reference = false;    // superlinear kinds: direct solve of the raw problem
    double reference_f = 0.0;
    Field reference_u;
};

// Runs j = j_start..j_end: build approximant, minimise (warm-started when
// configured), extract the dual field, and record the nondecreasing values.
// For superlinear catalog kinds the unregularised problem is solved directly
// on the same grid and per-j gaps and transport distances are recorded.
ScheduleResult ekeland_schedule(const IntegrandSpec& spec, const ConjugatePair& pair,
                                const ApproximationSchedule& schedule, const Field& g, const ConstraintSpec& c,
                                const SolveConfig& cfg, double cache_radius);

}  // namespace varidual
