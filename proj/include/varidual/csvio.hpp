#pragma once

#include <string>
#include <vector>

#include "varidual/grid_domain.hpp"
#include "varidual/solver.hpp"

namespace varidual {

std::string format_double(double v);  // %.17g

// Field dump: header, then (index..., x..., value) per node.
void write_field_csv(const Field& f, const std::string& path);
// Reads values back into a field over the given domain; row count must match.
Field read_field_csv(std::shared_ptr<const GridDomain> dom, const std::string& path);

// Gradient dump: (index..., x..., c0[, c1[, c2]]) per stencil base.
void write_gradient_csv(const GradientField& g, const std::string& path);
GradientField read_gradient_csv(std::shared_ptr<const GridDomain> dom, const std::string& path);

// Schedule table: j, f_j, iters, residual, ekeland_distance per row.
void write_schedule_csv(const std::vector<SolveReport>& reports, const std::string& path);

}  // namespace varidual
