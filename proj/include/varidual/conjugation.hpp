#pragma once


#include "varidual/sampled_function.hpp"

namespace varidual {

// F together with its discrete Fenchel conjugate on a dual grid.
// Per finite dual node, argmax holds the linear index of the primal node
// attaining the sup, ties broken by smallest weighted norm then smallest
// linear index.
struct ConjugatePair {
    SampledConvexFunction primal;
    SampledConvexFunction dual;
    std::vector<std::int64_t> argmax;  // -1 where the dual value is infinite
};

// Discrete conjugate by exhaustive scan over finite primal nodes: the
// normative definition. Requires at least one finite primal node.
ConjugatePair conjugate_brute(const SampledConvexFunction& f, const GridLayout& dual_grid);

// Accelerated conjugate (monotone-argmax divide and conquer along the last
// axis, rows reduced independently). Must agree with conjugate_brute
// bit-for-bit: both paths share one candidate-value expression and one
// total-order tie comparator. Dimension 3 falls back to the exhaustive scan.
ConjugatePair conjugate_fast(const SampledConvexFunction& f, const GridLayout& dual_grid);

// Default entry point: the accelerated path.
inline ConjugatePair conjugate(const SampledConvexFunction& f, const GridLayout& dual_grid) {
    return conjugate_fast(f, dual_grid);
}

// Conjugate of the dual, sampled on a primal query grid: the discrete
// biconjugate, the convex lower-semicontinuous envelope seen by the grids.
SampledConvexFunction biconjugate(const ConjugatePair& pair, const GridLayout& primal_query_grid);

// Marks dual nodes outside the slope range witnessed by the sampled primal
// as infinite. A conjugate computed from a box-truncated primal is faithful
// only for slopes the box can witness; beyond them the true conjugate may be
// anything up to +inf, and per-axis slope trimming restores the honest
// "unknown means +inf" reading for linear-growth integrands.
SampledConvexFunction trim_dual_to_witnessed_slopes(const SampledConvexFunction& primal,
                                                    const SampledConvexFunction& dual);

struct DemiCoercivityCertificate {
    TensorPoint x0;
    double r = 0.0;
    double c = 0.0;  // min over finite dual nodes of F*(xi) - <x0,xi> - r|xi|
};

struct DemiCoercivityResult {
    bool success = false;
    DemiCoercivityCertificate certificate;
    // On extrapolation failure: the axis and witnessed boundary slope that
    // could not support the requested r.
    int witness_axis = -1;
    double witnessed_slope = 0.0;
    std::int64_t witness_node = -1;
};

// Verifies F*(xi) - <x0,xi> >= r|xi| + c on the sampled dual, and that the
// per-axis boundary slopes of F* - <x0,.> are at least r (scaled by the
// component weight) wherever the finite region reaches the grid box, so the
// bound persists off-grid.
DemiCoercivityResult check_demi_coercivity(const SampledConvexFunction& dual, const TensorPoint& x0, double r);

}  // namespace varidual
