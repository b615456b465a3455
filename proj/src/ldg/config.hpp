#pragma once

// Flat `key = value` configuration (comments with '#'), canonical
// serialization, and the derived sweep/solver structures.  parse and
// serialize are mutually inverse: serialize(parse(text)) is a fixpoint.

#include <cstdint>
#include <string>

#include "ldg/asymptotics.hpp"
#include "ldg/solve.hpp"

namespace ldg {

struct RunConfig {
    Scenario scenario = Scenario::constant;
    int nx = 16, ny = 16, nz = 16;
    double box = 1.0;
    double a2 = 1.0, b2 = 1.0, c2 = 1.0;
    double L = 0.1;       // single-solve elastic constant
    double L_max = 0.35;  // sweep ladder: L_max * L_factor^k, k < L_count
    double L_factor = 0.6;
    int L_count = 8;
    double margin = 0.2;
    double lambda = 0.5;
    int max_iters = 20000;
    double tol_residual = 0.0;  // <= 0: auto
    double initial_step = 0.0;  // <= 0: auto
    StepRule step_rule = StepRule::adaptive_curvature;
    std::uint64_t seed = 0;
    int log_every = 100;
    int threads = 1;

    bool operator==(const RunConfig&) const = default;
};

// Throws config_error with a 1-based line number on syntax errors, unknown or
// duplicate keys, and out-of-range values.
RunConfig parse_config(const std::string& text);

// Canonical form: fixed key order, shortest round-trip number formatting.
std::string serialize_config(const RunConfig& c);

// FNV-1a (64-bit) over the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& c);

SolverOptions to_solver_options(const RunConfig& c);
SweepConfig to_sweep_config(const RunConfig& c);
MaterialParams to_material_params(const RunConfig& c);

}  // namespace ldg
