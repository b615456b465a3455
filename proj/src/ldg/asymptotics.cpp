#include "ldg/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ldg/errors.hpp"

namespace ldg {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::constant: return "constant";
        case Scenario::rotation: return "rotation";
        case Scenario::hedgehog: return "hedgehog";
    }
    return "unknown";
}

std::vector<double> default_L_sequence(double L_max, double factor, int count) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    double v = L_max;
    for (int i = 0; i < count; ++i) {
        out.push_back(v);
        v *= factor;
    }
    return out;
}

Vec3 hedgehog_center(const Grid3& g) {
    auto c = [&](int n, int a) { return g.origin[a] + g.h * ((n - 1) / 2 + 0.5); };
    return {c(g.nx, 0), c(g.ny, 1), c(g.nz, 2)};
}

std::function<Vec3(const Vec3&)> scenario_boundary_director(Scenario s, const Grid3& g) {
    switch (s) {
        case Scenario::constant:
            return [](const Vec3&) { return Vec3{0.0, 0.0, 1.0}; };
        case Scenario::rotation: {
            // Quarter-turn in-plane rotation e1 -> e2 across the x-extent.  The
            // total turn is kept below pi deliberately: a half-turn closes a loop
            // in tensor space that relaxation can contract through biaxial states
            // (a wall of eigenvalue exchange costing ~sqrt(L)), which beats the
            // in-plane rotation (~L) at any practical L and destroys convergence
            // to the director limit.  A quarter turn has distinct endpoint
            // tensors and no such shortcut.
            double x0 = g.origin[0];
            double ext = g.h * (g.nx - 1);
            return [x0, ext](const Vec3& x) {
                double t = 0.5 * M_PI * (x[0] - x0) / ext;
                return Vec3{std::cos(t), std::sin(t), 0.0};
            };
        }
        case Scenario::hedgehog: {
            Vec3 c = hedgehog_center(g);
            return [c](const Vec3& x) { return normalized(x - c); };
        }
    }
    throw validation_error("unknown scenario");
}

DirectorField scenario_initial_director(Scenario s, const Grid3& g) {
    auto n_b = scenario_boundary_director(s, g);
    DirectorField d = make_director_field(g);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) d.v[g.idx(i, j, k)] = n_b(g.pos(i, j, k));
    return d;
}

std::vector<std::size_t> compact_set(const QField& f_ref, double margin,
                                     const std::vector<Vec3>& singular_pts) {
    const Grid3& g = f_ref.grid;
    if (margin < 2.0 * g.h - 1e-12)
        throw validation_error("compact_set: margin must be at least 2h");
    double ex = g.h * (g.nx - 1), ey = g.h * (g.ny - 1), ez = g.h * (g.nz - 1);
    double half_diag = 0.5 * std::sqrt(ex * ex + ey * ey + ez * ez);
    if (margin > half_diag)
        throw config_error(0, "compact_set: margin exceeds half the box diagonal");

    // Detected singular set: low-|Q| nodes of the reference field, dilated by
    // two cells, plus the prescribed points.
    double max2 = parallel_max(f_ref.v.size(), [&](std::size_t i) { return norm2(f_ref.v[i]); });
    double thr2 = 0.09 * max2;  // (0.3 * max|Q|)^2
    std::vector<char> low(g.n_nodes(), 0);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (norm2(f_ref.v[g.idx(i, j, k)]) < thr2) low[g.idx(i, j, k)] = 1;
    std::vector<Vec3> detected;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                bool near_low = false;
                for (int dk = -2; dk <= 2 && !near_low; ++dk)
                    for (int dj = -2; dj <= 2 && !near_low; ++dj)
                        for (int di = -2; di <= 2 && !near_low; ++di) {
                            int ii = i + di, jj = j + dj, kk = k + dk;
                            if (ii < 0 || jj < 0 || kk < 0 || ii >= g.nx || jj >= g.ny ||
                                kk >= g.nz)
                                continue;
                            if (low[g.idx(ii, jj, kk)]) near_low = true;
                        }
                if (near_low) detected.push_back(g.pos(i, j, k));
            }

    double m2 = margin * margin;
    std::vector<std::size_t> K;
    for (int k = 1; k + 1 < g.nz; ++k)
        for (int j = 1; j + 1 < g.ny; ++j)
            for (int i = 1; i + 1 < g.nx; ++i) {
                if (g.boundary_distance(i, j, k) < margin - 1e-12) continue;
                Vec3 x = g.pos(i, j, k);
                bool excluded = false;
                for (const Vec3& s : singular_pts)
                    if (norm2(x - s) < m2) {
                        excluded = true;
                        break;
                    }
                for (std::size_t q = 0; q < detected.size() && !excluded; ++q)
                    if (norm2(x - detected[q]) < m2) excluded = true;
                if (!excluded) K.push_back(g.idx(i, j, k));
            }
    if (K.empty()) throw config_error(0, "compact_set: empty node set");
    return K;
}

double eigenvalue_errors(const QField& fL, const QField& f0,
                         const std::vector<std::size_t>& K) {
    const Grid3& ga = fL.grid, &gb = f0.grid;
    if (ga.nx != gb.nx || ga.ny != gb.ny || ga.nz != gb.nz || ga.h != gb.h)
        throw validation_error("eigenvalue_errors: grid mismatch");
    return parallel_max(K.size(), [&](std::size_t q) {
        std::size_t c = K[q];
        std::array<double, 3> la = eigenvalues(fL.v[c]);
        std::array<double, 3> lb = eigenvalues(f0.v[c]);
        double worst = 0;
        for (int i = 0; i < 3; ++i) {
            double d = la[i] - lb[i];
            if (d * d > worst) worst = d * d;
        }
        return worst;
    });
}

std::pair<double, double> region_measures(const QField& f, const MaterialParams& p,
                                          double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw validation_error("region_measures: lambda must lie in (0,1)");
    const double qstar2 = (0.5 * std::sqrt(2.0 / 3.0) * p.s_plus) *
                          (0.5 * std::sqrt(2.0 / 3.0) * p.s_plus);
    double h3 = f.grid.h * f.grid.h * f.grid.h;
    double n_star = parallel_sum(f.v.size(), [&](std::size_t i) {
        return norm2(f.v[i]) <= qstar2 ? 1.0 : 0.0;
    });
    double n_lambda = parallel_sum(f.v.size(), [&](std::size_t i) {
        return (norm2(f.v[i]) >= qstar2 && biaxiality(f.v[i]) > lambda) ? 1.0 : 0.0;
    });
    return {n_star * h3, n_lambda * h3};
}

std::vector<double> eigen_gap_map(const QField& f) {
    std::vector<double> out(f.v.size());
    parallel_apply(f.v.size(), [&](std::size_t i) {
        std::array<double, 3> l = eigenvalues(f.v[i]);
        out[i] = std::min(l[0] - l[1], l[1] - l[2]);
    });
    return out;
}

namespace {

// Half-ball energy Σ e_L h³ over interior nodes within distance r of x.
double half_ball_energy(const QField& f, const MaterialParams& p, const Vec3& x, double r) {
    const Grid3& g = f.grid;
    double h3 = g.h * g.h * g.h;
    double r2 = r * r;
    double acc = 0;
    for (int k = 1; k + 1 < g.nz; ++k)
        for (int j = 1; j + 1 < g.ny; ++j)
            for (int i = 1; i + 1 < g.nx; ++i) {
                Vec3 d = g.pos(i, j, k) - x;
                if (norm2(d) > r2) continue;
                acc += (0.5 * grad_sq_centered(f, i, j, k) +
                        f_bulk_shifted(f.v[g.idx(i, j, k)], p) / p.L) *
                       h3;
            }
    return acc;
}

}  // namespace

double monotonicity_audit(const QField& f, const MaterialParams& p,
                          const std::vector<std::array<int, 3>>& centers,
                          const std::vector<double>& radii,
                          double* boundary_slope_report) {
    if (radii.size() < 2) throw validation_error("monotonicity_audit: need at least two radii");
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        if (!(radii[i + 1] > radii[i]))
            throw validation_error("monotonicity_audit: radii must be increasing");

    double worst_interior = kInf;
    double worst_boundary = kInf;
    for (const auto& c : centers) {
        Vec3 x = f.grid.pos(c[0], c[1], c[2]);
        if (f.grid.is_boundary(c[0], c[1], c[2])) {
            double prev = half_ball_energy(f, p, x, radii[0]);
            for (std::size_t j = 1; j < radii.size(); ++j) {
                double cur = half_ball_energy(f, p, x, radii[j]);
                double slope = (cur - prev) / (radii[j] - radii[j - 1]);
                worst_boundary = std::min(worst_boundary, slope);
                prev = cur;
            }
        } else {
            double prev = normalized_energy(f, p, x, radii[0]);
            for (std::size_t j = 1; j < radii.size(); ++j) {
                double cur = normalized_energy(f, p, x, radii[j]);
                worst_interior = std::min(worst_interior, cur - prev);
                prev = cur;
            }
        }
    }
    if (boundary_slope_report)
        *boundary_slope_report = std::isinf(worst_boundary) ? 0.0 : worst_boundary;
    return std::isinf(worst_interior) ? 0.0 : worst_interior;
}

std::vector<std::array<int, 3>> default_audit_centers(const Grid3& g) {
    int mx = g.nx / 2, my = g.ny / 2, mz = g.nz / 2;
    int off = std::max(2, std::min(g.nx, g.ny) / 12);
    return {{mx, my, mz},
            {mx - off, my, mz},
            {mx + off, my, mz},
            {mx, my - off, mz},
            {mx, my + off, mz}};
}

std::vector<double> default_audit_radii(const Grid3& g) {
    int mx = g.nx / 2, my = g.ny / 2, mz = g.nz / 2;
    int off = std::max(2, std::min(g.nx, g.ny) / 12);
    // Largest radius keeping every default ball one cell inside the domain.
    int cap = std::numeric_limits<int>::max();
    auto upd = [&](int c, int n) { cap = std::min(cap, std::min(c - 1, n - 2 - c)); };
    for (int dc : {0, -off, off}) {
        upd(mx + dc, g.nx);
        upd(my + dc, g.ny);
        upd(mz + dc, g.nz);
    }
    if (cap < 5) throw validation_error("default_audit_radii: grid too small for the audit");
    std::vector<double> radii;
    if (cap >= 6) {
        for (int r : {3, 4, 5, 6}) radii.push_back(g.h * r);
    } else {
        for (int j = 0; j < 4; ++j) radii.push_back(g.h * (2.0 + j * (cap - 2.0) / 3.0));
    }
    return radii;
}

namespace {

double fit_loglog_slope(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) return kNaN;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [L, y] : pts) {
        if (!(L > 0) || !(y > 0)) return kNaN;
        double lx = std::log(L), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = static_cast<double>(pts.size());
    double den = sxx - sx * sx / n;
    if (den <= 0) return kNaN;
    return (sxy - sx * sy / n) / den;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool nonincreasing_with_slack(const std::vector<double>& v, double slack) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i + 1] > (1.0 + slack) * v[i] + 1e-18) return false;
    return true;
}

}  // namespace

ConvergenceReport run_sweep(const SweepConfig& cfg, const RecordCallback& on_record) {
    std::vector<double> Ls = cfg.L_sequence.empty() ? default_L_sequence() : cfg.L_sequence;
    if (Ls.empty()) throw validation_error("run_sweep: empty L sequence");
    for (double L : Ls)
        if (!(L > 0)) throw validation_error("run_sweep: L values must be positive");
    for (std::size_t i = 0; i + 1 < Ls.size(); ++i)
        if (!(Ls[i + 1] < Ls[i]))
            throw validation_error("run_sweep: L sequence must be strictly decreasing");
    if (!(cfg.box > 0)) throw validation_error("run_sweep: box must be positive");
    if (cfg.nx < 3 || cfg.ny < 3 || cfg.nz < 3)
        throw validation_error("run_sweep: grid too small");

    ConvergenceReport rep;
    rep.config = cfg;
    rep.config.L_sequence = Ls;

    double h = cfg.box / (cfg.nx - 1);
    Grid3 g = make_grid(cfg.nx, cfg.ny, cfg.nz, h, cfg.origin);
    MaterialParams p0 = derive_params(cfg.a2, cfg.b2, cfg.c2, Ls.front());

    // Limiting director problem, solved once.
    DirectorField d0 = scenario_initial_director(cfg.scenario, g);
    // The director solve keeps its own resolution-aware auto tolerance; a
    // user tolerance in cfg.solver is meant for the tensor solves, whose
    // residual lives on a different scale.
    SolverOptions dop = cfg.solver;
    dop.tol_residual = 0;
    auto [nsol, nrep] = minimize_director(d0, dop);
    rep.director_converged = nrep.converged;
    rep.reference_energy = nrep.final_energy;

    QField Q0 = limiting_map(nsol, p0);

    std::vector<Vec3> sing;
    if (cfg.scenario == Scenario::hedgehog) sing.push_back(hedgehog_center(g));
    std::vector<std::size_t> K = compact_set(Q0, cfg.margin, sing);
    rep.compact_set_size = K.size();

    // Boundary collar for the near-boundary bulk diagnostic: interior nodes
    // within margin of the boundary and at least margin from singular points.
    std::vector<std::size_t> collar;
    for (int k = 1; k + 1 < g.nz; ++k)
        for (int j = 1; j + 1 < g.ny; ++j)
            for (int i = 1; i + 1 < g.nx; ++i) {
                if (g.boundary_distance(i, j, k) > cfg.margin) continue;
                Vec3 x = g.pos(i, j, k);
                bool ok = true;
                for (const Vec3& s : sing)
                    if (norm2(x - s) < cfg.margin * cfg.margin) ok = false;
                if (ok) collar.push_back(g.idx(i, j, k));
            }

    auto centers = default_audit_centers(g);
    auto radii = default_audit_radii(g);
    int mx = g.nx / 2, my = g.ny / 2, mz = g.nz / 2;
    std::vector<std::array<int, 3>> bcenters = {{0, my, mz},        {g.nx - 1, my, mz},
                                                {mx, 0, mz},        {mx, g.ny - 1, mz},
                                                {mx, my, 0},        {mx, my, g.nz - 1}};

    const double qn0 = std::sqrt(2.0 / 3.0) * p0.s_plus;
    QField warm = Q0;
    bool complete = true;
    for (double L : Ls) {
        MaterialParams p = derive_params(cfg.a2, cfg.b2, cfg.c2, L);
        double q0_energy = total_energy(Q0, p);
        // Warm start, but never from above the limiting map's energy: the
        // descent is monotone, so this keeps every record below q0_energy.
        const QField& init = total_energy(warm, p) <= q0_energy ? warm : Q0;
        SolverOptions qop = cfg.solver;
        if (qop.tol_residual <= 0) qop.tol_residual = 1e-8 * cfg.a2 * p.s_plus;
        auto [sol, srep] = minimize_q(init, p, qop);
        if (!srep.converged) complete = false;

        ConvergenceRecord rec;
        rec.L = L;
        rec.energy = srep.final_energy;
        rec.elastic = elastic_energy(sol, p);
        rec.bulk_integral = bulk_energy(sol, p);
        rec.q0_energy = q0_energy;
        rec.w12_dist_to_Q0 = w12_distance(sol, Q0);
        rec.sup_K_dist = std::sqrt(
            parallel_max(K.size(), [&](std::size_t q) { return norm2(sol.v[K[q]] - Q0.v[K[q]]); }));
        rec.sup_K_bulk =
            parallel_max(K.size(), [&](std::size_t q) { return f_bulk_shifted(sol.v[K[q]], p); });
        rec.sup_boundary_collar_bulk = parallel_max(
            collar.size(), [&](std::size_t q) { return f_bulk_shifted(sol.v[collar[q]], p); });
        rec.max_beta_K =
            parallel_max(K.size(), [&](std::size_t q) { return biaxiality(sol.v[K[q]]); });
        rec.max_eig_err_sq_K = eigenvalue_errors(sol, Q0, K);
        rec.max_qnorm_dev_K = parallel_max(
            K.size(), [&](std::size_t q) { return std::abs(norm(sol.v[K[q]]) - qn0); });
        auto [om_star, om_lam] = region_measures(sol, p, cfg.lambda);
        rec.omega_star_measure = om_star;
        rec.omega_lambda_measure = om_lam;
        rec.boundary_normal_deriv_sq = boundary_normal_energy(sol);
        rec.monotonicity_violation = monotonicity_audit(sol, p, centers, radii, nullptr);
        monotonicity_audit(sol, p, bcenters, radii, &rec.boundary_mono_slope);
        rec.max_q_norm = srep.max_q_norm;
        rec.solver_converged = srep.converged;
        rec.iterations = srep.iterations;
        rep.records.push_back(rec);
        if (on_record) on_record(rep.records.size() - 1, rec, sol, p);

        warm.v.swap(sol.v);
    }
    rep.complete = complete;

    // Monotone-decay flags with 10% slack.
    auto collect = [&](auto getter) {
        std::vector<double> v;
        for (const auto& r : rep.records) v.push_back(getter(r));
        return v;
    };
    rep.sup_K_bulk_monotone = nonincreasing_with_slack(
        collect([](const ConvergenceRecord& r) { return r.sup_K_bulk; }), 0.10);
    rep.sup_K_dist_monotone = nonincreasing_with_slack(
        collect([](const ConvergenceRecord& r) { return r.sup_K_dist; }), 0.10);
    rep.w12_monotone = nonincreasing_with_slack(
        collect([](const ConvergenceRecord& r) { return r.w12_dist_to_Q0; }), 0.10);

    // Slopes over the small-L half of the ladder.
    if (complete) {
        double med = median_of(Ls);
        auto fit = [&](auto getter) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& r : rep.records)
                if (r.L <= med * (1.0 + 1e-12)) pts.emplace_back(r.L, getter(r));
            return fit_loglog_slope(pts);
        };
        rep.slope_sup_K_bulk = fit([](const ConvergenceRecord& r) { return r.sup_K_bulk; });
        rep.slope_max_beta_K = fit([](const ConvergenceRecord& r) { return r.max_beta_K; });
        rep.slope_max_eig_err_sq_K =
            fit([](const ConvergenceRecord& r) { return r.max_eig_err_sq_K; });
        rep.slope_qnorm_dev = fit([](const ConvergenceRecord& r) { return r.max_qnorm_dev_K; });
        rep.slopes_valid = std::isfinite(rep.slope_sup_K_bulk) &&
                           std::isfinite(rep.slope_max_beta_K) &&
                           std::isfinite(rep.slope_max_eig_err_sq_K) &&
                           std::isfinite(rep.slope_qnorm_dev);
    } else {
        rep.slope_sup_K_bulk = rep.slope_max_beta_K = kNaN;
        rep.slope_max_eig_err_sq_K = rep.slope_qnorm_dev = kNaN;
        rep.slopes_valid = false;
    }
    return rep;
}

}  // namespace ldg
