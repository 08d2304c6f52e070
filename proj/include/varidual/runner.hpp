#pragma once

#include <iosfwd>
#include <string>

#include "varidual/config.hpp"

namespace varidual {

namespace exit_code {
constexpr int ok = 0;
constexpr int verify_fail = 1;
constexpr int infeasible = 2;  // also: missing artifacts
constexpr int non_converged = 3;
constexpr int usage = 64;
}  // namespace exit_code

// Runs the smoothing schedule and writes schedule.csv, the final field and
// dual-field dumps, per-j dual fields, and optional per-j field dumps plus
// SVG plots. Exit 0 on convergence, 3 on iteration cap, 2 on infeasibility.
int run_solve(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& err);

// Reads solve artifacts, recomputes the dual field from the catalog
// derivative, and writes certificate.json plus a summary. Exit 0 when the
// certificate passes, 1 when it fails, 2 when artifacts are missing.
int run_verify(const ExperimentConfig& cfg, const std::string& artifacts_dir, std::ostream& out, std::ostream& err);

// 1D table of F, F*, F**, recession and F_j columns over the primal axis.
int run_conjugate_table(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& err);

// Mollified-recovery convergence table for the configured jump field.
int run_bv_demo(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& err);

int list_catalog(std::ostream& out);

}  // namespace varidual
