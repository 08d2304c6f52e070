#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "varidual/extended_value.hpp"
#include "varidual/tensor_point.hpp"

namespace varidual {

// Uniform node grid for an inner box with a fixed-value collar around it.
// Free nodes (the optimisation variables) have per-axis indices in
// [collar, collar + inner); everything else is collar. A collar of width
// >= k pins values and derivatives through order k-1 at the inner boundary.
//
// Stencil bases (where k-th forward differences are formed) run over
// [collar - k, collar + inner - 1] per axis, so every stencil touching a
// free node is included and stencils never leave the grid.
struct GridDomain {
    int n = 1;      // space dimension, 1 or 2
    int k = 1;      // derivative order, 1 or 2
    double h = 0.01;
    std::array<int, 2> inner{99, 1};  // free-node extent per axis (axis 1 unused when n == 1)
    int collar = 1;

    GridDomain() = default;
    GridDomain(int n_, int k_, double h_, std::array<int, 2> inner_, int collar_);

    int m() const { return n == 1 ? 1 : (k == 1 ? 2 : 3); }
    int total(int axis) const { return inner[static_cast<std::size_t>(axis)] + 2 * collar; }
    std::int64_t node_count() const;

    // Physical coordinate; the innermost collar layer on the low side sits
    // at (k-1)*h below the first free node, and coord 0 marks the low end
    // of the stencil range.
    double coord([[maybe_unused]] int axis, int i) const { return (i - collar + k) * h; }

    int stencil_lo() const { return collar - k; }
    int stencil_count(int axis) const { return inner[static_cast<std::size_t>(axis)] + k; }
    std::int64_t stencil_node_count() const;

    // Product measure covered by the stencil sum.
    double measure() const;

    std::int64_t node_index(int i, int j = 0) const;
    std::int64_t stencil_index(int i, int j = 0) const;

    bool is_free(int i, int j = 0) const;

    friend bool operator==(const GridDomain& a, const GridDomain& b);
};

// Real-valued nodal field over the whole grid (inner + collar).
struct Field {
    std::shared_ptr<const GridDomain> dom;
    std::vector<double> values;

    Field() = default;
    explicit Field(std::shared_ptr<const GridDomain> d);

    double& at(int i, int j = 0) { return values[static_cast<std::size_t>(dom->node_index(i, j))]; }
    double at(int i, int j = 0) const { return values[static_cast<std::size_t>(dom->node_index(i, j))]; }
};

// One tensor per stencil base.
struct GradientField {
    std::shared_ptr<const GridDomain> dom;
    std::vector<double> comps;  // m per stencil base

    GradientField() = default;
    explicit GradientField(std::shared_ptr<const GridDomain> d);

    TensorPoint at(std::int64_t stencil_lin) const;
    void set(std::int64_t stencil_lin, const TensorPoint& t);
};

// Feasible-set description: everything, or pointwise u >= psi on free nodes.
struct ConstraintSpec {
    enum class Kind { unconstrained, obstacle };
    Kind kind = Kind::unconstrained;
    Field psi;

    static ConstraintSpec none();
    // Validates feasibility against the boundary data: psi <= g on the
    // collar; throws InfeasibleConstraintError otherwise.
    static ConstraintSpec obstacle(Field psi, const Field& g);
};

// 1D field whose k-th derivative splits into a sampled density plus point
// jumps strictly inside the inner interval.
struct JumpField {
    Field ac;                                      // density samples per node
    std::vector<std::pair<double, double>> jumps;  // (location, height), sorted

    void validate() const;
};

}  // namespace varidual
