#include "varidual/grid_domain.hpp"

#include <algorithm>
#include <cmath>

#include "varidual/errors.hpp"

namespace varidual {

GridDomain::GridDomain(int n_, int k_, double h_, std::array<int, 2> inner_, int collar_)
    : n(n_), k(k_), h(h_), inner(inner_), collar(collar_) {
    if (n < 1 || n > 2) throw UsageError("GridDomain: n must be 1 or 2");
    if (k < 1 || k > 2) throw UsageError("GridDomain: k must be 1 or 2");
    if (!(h > 0.0)) throw UsageError("GridDomain: h must be positive");
    if (collar < k) throw UsageError("GridDomain: collar width must be >= k");
    for (int a = 0; a < n; ++a)
        if (inner[static_cast<std::size_t>(a)] < 1) throw UsageError("GridDomain: inner box must be nonempty");
    if (n == 1) inner[1] = 1;
}

std::int64_t GridDomain::node_count() const {
    std::int64_t c = total(0);
    if (n == 2) c *= total(1);
    return c;
}

std::int64_t GridDomain::stencil_node_count() const {
    std::int64_t c = stencil_count(0);
    if (n == 2) c *= stencil_count(1);
    return c;
}

double GridDomain::measure() const {
    double m_ = stencil_count(0) * h;
    if (n == 2) m_ *= stencil_count(1) * h;
    return m_;
}

std::int64_t GridDomain::node_index(int i, int j) const {
    if (n == 1) return i;
    return static_cast<std::int64_t>(i) * total(1) + j;
}

std::int64_t GridDomain::stencil_index(int i, int j) const {
    if (n == 1) return i - stencil_lo();
    return static_cast<std::int64_t>(i - stencil_lo()) * stencil_count(1) + (j - stencil_lo());
}

bool GridDomain::is_free(int i, int j) const {
    if (i < collar || i >= collar + inner[0]) return false;
    if (n == 2 && (j < collar || j >= collar + inner[1])) return false;
    return true;
}

bool operator==(const GridDomain& a, const GridDomain& b) {
    return a.n == b.n && a.k == b.k && a.h == b.h && a.inner == b.inner && a.collar == b.collar;
}

Field::Field(std::shared_ptr<const GridDomain> d)
    : dom(std::move(d)), values(static_cast<std::size_t>(dom->node_count()), 0.0) {}

GradientField::GradientField(std::shared_ptr<const GridDomain> d)
    : dom(std::move(d)),
      comps(static_cast<std::size_t>(dom->stencil_node_count()) * static_cast<std::size_t>(dom->m()), 0.0) {}

TensorPoint GradientField::at(std::int64_t s) const {
    const int m = dom->m();
    TensorPoint t = TensorPoint::zeros(m);
    for (int c = 0; c < m; ++c)
        t[c] = comps[static_cast<std::size_t>(s) * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)];
    return t;
}

void GradientField::set(std::int64_t s, const TensorPoint& t) {
    const int m = dom->m();
    for (int c = 0; c < m; ++c)
        comps[static_cast<std::size_t>(s) * static_cast<std::size_t>(m) + static_cast<std::size_t>(c)] = t[c];
}

ConstraintSpec ConstraintSpec::none() {
    ConstraintSpec c;
    c.kind = Kind::unconstrained;
    return c;
}

ConstraintSpec ConstraintSpec::obstacle(Field psi, const Field& g) {
    if (!psi.dom || !g.dom || !(*psi.dom == *g.dom)) throw UsageError("obstacle: domain mismatch");
    const GridDomain& d = *psi.dom;
    for (int i = 0; i < d.total(0); ++i)
        for (int j = 0; j < (d.n == 2 ? d.total(1) : 1); ++j)
            if (!d.is_free(i, j) && psi.at(i, j) > g.at(i, j))
                throw InfeasibleConstraintError("obstacle exceeds boundary data on the collar");
    ConstraintSpec c;
    c.kind = Kind::obstacle;
    c.psi = std::move(psi);
    return c;
}

void JumpField::validate() const {
    if (!ac.dom) throw UsageError("JumpField: missing domain");
    if (ac.dom->n != 1) throw UsageError("JumpField: 1D only");
    const GridDomain& d = *ac.dom;
    double lo = 0.0;
    double hi = d.stencil_count(0) * d.h;
    double prev = -1e308;
    for (const auto& [x, s] : jumps) {
        if (!(x > lo) || !(x < hi)) throw UsageError("JumpField: jump location outside the inner interval");
        if (!(x > prev)) throw UsageError("JumpField: jump locations must be strictly increasing");
        if (s == 0.0) throw UsageError("JumpField: zero jump height");
        prev = x;
    }
}

}  // namespace varidual
