#pragma once

// L -> 0 experiment harness: solves the limiting director problem once, then
// minimizes the Q-tensor energy along a decreasing sequence of elastic
// constants and measures convergence toward the uniaxial harmonic-map limit
// on compact sets away from singularities.

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ldg/field.hpp"
#include "ldg/solve.hpp"

namespace ldg {

// Boundary-data families for the sweep:
//   constant — uniform director e3 (the solution is the constant minimizer);
//   rotation — in-plane quarter turn e1 -> e2 across the x-extent (smooth
//              limiting map, no defect);
//   hedgehog — radial director about a point offset half a cell from the grid
//              center, so the singularity falls between nodes.
enum class Scenario { constant, rotation, hedgehog };

const char* scenario_name(Scenario s);

struct SweepConfig {
    int nx = 24, ny = 24, nz = 24;
    double box = 1.0;  // physical edge along x; h = box / (nx - 1)
    Vec3 origin{0.0, 0.0, 0.0};
    Scenario scenario = Scenario::hedgehog;
    double a2 = 1.0, b2 = 1.0, c2 = 1.0;
    std::vector<double> L_sequence;  // strictly decreasing; empty = default geometric
    double margin = 0.2;             // compact-set distance rho_K (>= 2h)
    double lambda = 0.5;             // biaxial threshold in (0,1)
    SolverOptions solver;
};

// Default geometric ladder L_max * factor^k, k = 0..count-1.
std::vector<double> default_L_sequence(double L_max = 0.35, double factor = 0.6, int count = 8);

struct ConvergenceRecord {
    double L = 0;
    double energy = 0;           // total energy of the minimizer
    double elastic = 0;          // elastic part
    double bulk_integral = 0;    // integral of the shifted bulk density
    double q0_energy = 0;        // total energy of the limiting map at this L
    double w12_dist_to_Q0 = 0;
    double sup_K_dist = 0;       // max nodal |Q^L - Q0| on K
    double sup_K_bulk = 0;       // max shifted bulk density on K
    double sup_boundary_collar_bulk = 0;
    double max_beta_K = 0;
    double max_eig_err_sq_K = 0;
    double max_qnorm_dev_K = 0;  // max over K of ||Q| - sqrt(2/3) s_plus|
    double omega_star_measure = 0;
    double omega_lambda_measure = 0;
    double boundary_normal_deriv_sq = 0;
    double monotonicity_violation = 0;  // worst interior normalized-energy decrement
    double boundary_mono_slope = 0;     // half-ball energy slope, report-only
    double max_q_norm = 0;
    bool solver_converged = false;
    int iterations = 0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRecord> records;
    // Log-log least-squares slopes over records with L <= median(L_sequence);
    // NaN when not fittable (non-positive data or a failed solve).
    double slope_sup_K_bulk = 0;
    double slope_max_beta_K = 0;
    double slope_max_eig_err_sq_K = 0;
    double slope_qnorm_dev = 0;
    bool slopes_valid = false;
    double reference_energy = 0;  // Dirichlet energy of the converged director
    bool director_converged = false;
    // Nonincreasing up to a 10% slack factor across records.
    bool sup_K_bulk_monotone = false;
    bool sup_K_dist_monotone = false;
    bool w12_monotone = false;
    bool complete = false;  // every Q solve converged
    std::size_t compact_set_size = 0;
    SweepConfig config;  // echo for provenance
};

// Boundary director for a scenario, as a function of position.
std::function<Vec3(const Vec3&)> scenario_boundary_director(Scenario s, const Grid3& g);

// Singularity placement for the hedgehog scenario: the domain center offset
// onto a cell midpoint so no node coincides with it.
Vec3 hedgehog_center(const Grid3& g);

// Director field whose every node carries the scenario's boundary formula
// evaluated at that node (a natural initial guess).
DirectorField scenario_initial_director(Scenario s, const Grid3& g);

// Interior nodes at physical distance >= margin from the boundary and from
// the singular set: the given points plus low-|Q| nodes of f_ref (below
// 0.3 * max |Q|) dilated by two cells.  margin < 2h or an empty result is an
// error; so is a margin exceeding half the box diagonal.
std::vector<std::size_t> compact_set(const QField& f_ref, double margin,
                                     const std::vector<Vec3>& singular_pts = {});

// Max over K-nodes and eigenvalue indices of |lambda_i(fL) - lambda_i(f0)|^2,
// both spectra sorted descending.
double eigenvalue_errors(const QField& fL, const QField& f0,
                         const std::vector<std::size_t>& K);

// Nodal-volume measures: omega_star counts |Q| <= (1/2) sqrt(2/3) s_plus;
// omega_lambda counts |Q| >= (1/2) sqrt(2/3) s_plus with biaxiality > lambda.
std::pair<double, double> region_measures(const QField& f, const MaterialParams& p,
                                          double lambda);

// Min pairwise eigenvalue gap per node (diagnostic only).
std::vector<double> eigen_gap_map(const QField& f);

// Worst (most negative) increment of the normalized energy over consecutive
// radius pairs at interior centers; boundary centers contribute instead to
// the half-ball energy slope written to boundary_slope_report (never
// asserted).  Centers are node index triples; radii must be increasing.
double monotonicity_audit(const QField& f, const MaterialParams& p,
                          const std::vector<std::array<int, 3>>& centers,
                          const std::vector<double>& radii,
                          double* boundary_slope_report = nullptr);

// Deterministic default audit geometry: the central node plus four axis
// offsets, and four increasing radii that keep every ball interior.
std::vector<std::array<int, 3>> default_audit_centers(const Grid3& g);
std::vector<double> default_audit_radii(const Grid3& g);

// Invoked after each record with the record index, the filled record, the
// minimizer field, and the material constants at that L (snapshot export).
using RecordCallback = std::function<void(std::size_t, const ConvergenceRecord&, const QField&,
                                          const MaterialParams&)>;

ConvergenceReport run_sweep(const SweepConfig& cfg, const RecordCallback& on_record = {});

}  // namespace ldg
