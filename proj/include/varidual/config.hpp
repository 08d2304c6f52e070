#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "varidual/solver.hpp"
#include "varidual/verification.hpp"

namespace varidual {

// A fully validated experiment description. Boundary data and obstacles are
// polynomials of degree <= 4 (per axis exponents for 2D) or the "zero"
// preset; every seed is explicit.
struct ExperimentConfig {
    // domain
    int n = 1, k = 1;
    double h = 0.01;
    std::array<int, 2> inner_extent{99, 1};
    int collar_width = 1;

    // integrand
    IntegrandKind kind = IntegrandKind::quadratic;
    std::vector<double> params;

    // boundary g and obstacle psi
    std::vector<double> g_poly;                      // 1D coefficients c0..c4
    std::vector<std::array<double, 3>> g_poly2d;     // {i, j, c}: c * x^i y^j
    bool has_obstacle = false;
    std::vector<double> psi_poly;
    std::vector<std::array<double, 3>> psi_poly2d;

    // schedule
    ApproximationSchedule schedule;

    // solver
    SolveConfig solver;

    // verification
    int n_dirs = 200;
    int n_test = 100;
    std::uint64_t verify_seed = 0;
    CertifyThresholds thresholds;

    // approximation grids
    double cache_radius = 3.0;
    double dual_spacing = 0.0;  // 0: pick min(0.005, delta(j_end))

    // bv demo
    std::vector<double> bv_ac_poly{0.0};
    std::vector<std::pair<double, double>> bv_jumps;
    std::vector<double> bv_eps;
    std::vector<double> bv_h;

    // conjugate table
    std::vector<int> table_js{2, 5, 20};
    double table_radius = 2.0;
    double table_spacing = 0.05;

    // outputs
    std::string csv_dir = "out";
    bool svg = false;
    bool dump_fields = false;

    IntegrandSpec integrand() const;
    std::shared_ptr<const GridDomain> make_domain() const;
    Field boundary_field(const std::shared_ptr<const GridDomain>& dom) const;
    ConstraintSpec constraint(const std::shared_ptr<const GridDomain>& dom, const Field& g) const;
    double effective_dual_spacing() const;
};

struct ConfigParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;  // all of them, with key paths
    bool ok() const { return errors.empty() && config.has_value(); }
};

ConfigParseResult parse_config_text(const std::string& text);
ConfigParseResult parse_config_file(const std::string& path);

// Canonical serialisation; parse(serialize(parse(x))) is a fixed point.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace varidual
