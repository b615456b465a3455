#pragma once

// Energy minimizers: adaptive-step gradient descent with backtracking for the
// Q-tensor energy at fixed L, and projected gradient descent on the unit
// sphere for the Oseen-Frank director energy.

#include <cstdint>
#include <utility>
#include <vector>

#include "ldg/field.hpp"

namespace ldg {

enum class StepRule { fixed, adaptive_curvature };

struct SolverOptions {
    int max_iters = 20000;
    // Stopping threshold on the max-norm of the Euler-Lagrange residual.
    // Non-positive: resolved to 1e-8 * a2 * s_plus for the Q solve and to
    // a nodal angular accuracy of 1e-8 radians (1e-8 * 24/h^2) for the
    // director solve, whose residual scales with the grid curvature bound.
    double tol_residual = 0.0;
    StepRule step_rule = StepRule::adaptive_curvature;
    // Forward-Euler step of the formal L2 gradient flow.  Non-positive:
    // resolved from an explicit-stability estimate of the energy Hessian.
    double initial_step = 0.0;
    std::uint64_t seed = 0;  // reserved for randomized initializations
    int log_every = 100;
};

struct SolveReport {
    int iterations = 0;
    double final_energy = 0.0;
    double final_residual = 0.0;
    std::vector<std::pair<int, double>> energy_trace;  // (iter, energy), nonincreasing
    bool converged = false;
    double max_q_norm = 0.0;
};

// Frobenius norm of the largest node of f.
double max_q_norm(const QField& f);

// Descent on total_energy.  Boundary nodes are never touched (Dirichlet
// freeze, bit-exact).  Terminates when the residual max-norm drops below the
// tolerance or max_iters is reached; a step underflow with no accepted step
// returns the last accepted field with converged = false.  Accepted steps
// never increase the energy.
std::pair<QField, SolveReport> minimize_q(const QField& f0, const MaterialParams& p,
                                          const SolverOptions& opts);

// Projected descent on dirichlet_energy_director: unconstrained step followed
// by nodewise renormalization to the unit sphere.  Stops on the tangential
// residual (gradient minus its radial component) max-norm.
std::pair<DirectorField, SolveReport> minimize_director(const DirectorField& d0,
                                                        const SolverOptions& opts);

// Nodewise uniaxial lift s_plus * (n x n - Id/3) of a unit director field.
QField limiting_map(const DirectorField& d, const MaterialParams& p);

}  // namespace ldg
