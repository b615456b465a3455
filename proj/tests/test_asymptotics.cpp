#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ldg/asymptotics.hpp"
#include "ldg/bulk.hpp"
#include "ldg/errors.hpp"
#include "ldg/field.hpp"
#include "ldg/qtensor.hpp"
#include "ldg/solve.hpp"

using namespace ldg;

namespace {

const Vec3 e1{1, 0, 0}, e2{0, 1, 0}, e3{0, 0, 1};

QTensor two_director(double s, const Vec3& n, double r, const Vec3& m) {
    Mat3 M = s * Mat3::outer(n, n) + r * Mat3::outer(m, m) -
             ((s + r) / 3.0) * Mat3::identity();
    return from_matrix(M);
}

}  // namespace

TEST_CASE("default L ladder: geometric, strictly decreasing, frozen head") {
    auto Ls = default_L_sequence();
    REQUIRE(Ls.size() == 8);
    CHECK(Ls[0] == doctest::Approx(0.35).epsilon(1e-15));
    CHECK(Ls[1] == doctest::Approx(0.21).epsilon(1e-14));
    CHECK(Ls[2] == doctest::Approx(0.126).epsilon(1e-14));
    for (std::size_t i = 0; i + 1 < Ls.size(); ++i) {
        CHECK(Ls[i + 1] < Ls[i]);
        CHECK(Ls[i + 1] / Ls[i] == doctest::Approx(0.6).epsilon(1e-12));
    }
    auto L3 = default_L_sequence(1.0, 0.5, 3);
    REQUIRE(L3.size() == 3);
    CHECK(L3[2] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("scenario directors: unit length, correct symmetry, off-lattice hedgehog core") {
    Grid3 g = make_grid(9, 9, 9, 0.125);
    Vec3 c = hedgehog_center(g);
    // half-cell offset: the core never sits on a node
    for (int a = 0; a < 3; ++a) CHECK(c[a] == doctest::Approx(0.125 * 4.5).epsilon(1e-15));
    for (int k = 0; k < 9; ++k)
        for (int j = 0; j < 9; ++j)
            for (int i = 0; i < 9; ++i) {
                Vec3 x = g.pos(i, j, k);
                CHECK(norm(x - c) > 0.25 * g.h);
            }

    auto nb_const = scenario_boundary_director(Scenario::constant, g);
    CHECK(norm(nb_const({0.3, 0.1, 0.9}) - e3) == 0.0);

    // Quarter turn: e1 at the near x-face, e2 at the far one, 45 degrees midway.
    auto nb_rot = scenario_boundary_director(Scenario::rotation, g);
    CHECK(norm(nb_rot(g.pos(0, 4, 4)) - e1) < 1e-14);
    Vec3 far = nb_rot(g.pos(8, 4, 4));
    CHECK(std::abs(far[0]) < 1e-14);
    CHECK(far[1] == doctest::Approx(1.0).epsilon(1e-14));
    Vec3 mid = nb_rot(g.pos(4, 4, 4));
    CHECK(mid[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));
    CHECK(mid[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));
    CHECK(mid[2] == 0.0);

    auto nb_h = scenario_boundary_director(Scenario::hedgehog, g);
    for (auto s : {Scenario::constant, Scenario::rotation, Scenario::hedgehog}) {
        auto nb = scenario_boundary_director(s, g);
        for (int k = 0; k < 9; k += 4)
            for (int j = 0; j < 9; j += 4)
                for (int i = 0; i < 9; i += 4)
                    CHECK(norm(nb(g.pos(i, j, k))) == doctest::Approx(1.0).epsilon(1e-13));
    }
    // hedgehog points away from the core
    Vec3 x0 = g.pos(8, 8, 8);
    CHECK(dot(nb_h(x0), normalized(x0 - c)) == doctest::Approx(1.0).epsilon(1e-13));

    CHECK(scenario_name(Scenario::constant) == std::string("constant"));
    CHECK(scenario_name(Scenario::rotation) == std::string("rotation"));
    CHECK(scenario_name(Scenario::hedgehog) == std::string("hedgehog"));

    DirectorField d = scenario_initial_director(Scenario::hedgehog, g);
    for (std::size_t cc = 0; cc < g.n_nodes(); ++cc)
        CHECK(norm(d.v[cc]) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("compact set: margin shell for a clean reference field") {
    Grid3 g = make_grid(17, 17, 17, 1.0 / 16.0);
    MaterialParams p = derive_params(1, 1, 1, 0.1);
    QField ref = make_qfield(g);
    for (auto& q : ref.v) q = from_uniaxial(p.s_plus, e3);

    double margin = 0.2;
    auto K = compact_set(ref, margin);
    std::set<std::size_t> Kset(K.begin(), K.end());
    std::size_t expect = 0;
    for (int k = 1; k + 1 < g.nz; ++k)
        for (int j = 1; j + 1 < g.ny; ++j)
            for (int i = 1; i + 1 < g.nx; ++i) {
                bool in = g.boundary_distance(i, j, k) >= margin - 1e-12;
                if (in) ++expect;
                CHECK(Kset.count(g.idx(i, j, k)) == (in ? 1u : 0u));
            }
    CHECK(K.size() == expect);
    CHECK(expect == 9u * 9u * 9u);  // needs >= 4 grid steps from each face
    for (std::size_t n = 1; n < K.size(); ++n) CHECK(K[n - 1] < K[n]);

    // prescribed singular point carves a margin-ball out of the shell
    Vec3 c{0.5, 0.5, 0.5};
    auto Ks = compact_set(ref, margin, {c});
    std::set<std::size_t> Ks_set(Ks.begin(), Ks.end());
    for (std::size_t id : K) {
        std::size_t k = id / (17u * 17u), j = (id / 17u) % 17u, i = id % 17u;
        bool keep = norm2(g.pos(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)) -
                          c) >= margin * margin;
        CHECK(Ks_set.count(id) == (keep ? 1u : 0u));
    }
    CHECK(Ks.size() < K.size());

    CHECK_THROWS_AS(compact_set(ref, 1.5 * g.h), validation_error);
    CHECK_THROWS_AS(compact_set(ref, 2.0), config_error);  // beyond half the diagonal
}

TEST_CASE("compact set: detected low-norm core is dilated and excluded") {
    Grid3 g = make_grid(17, 17, 17, 1.0 / 16.0);
    QField ref = make_qfield(g);
    for (auto& q : ref.v) q = from_uniaxial(1.5, e3);
    ref.v[g.idx(8, 8, 8)] = QTensor{};  // melted core at the center node

    double margin = 0.2;
    auto K = compact_set(ref, margin);
    std::set<std::size_t> Kset(K.begin(), K.end());

    // reference geometry, recomputed independently: the low node dilated by
    // two Chebyshev cells, then a euclidean margin-ball around each
    std::vector<Vec3> detected;
    for (int k = 0; k < 17; ++k)
        for (int j = 0; j < 17; ++j)
            for (int i = 0; i < 17; ++i)
                if (std::max({std::abs(i - 8), std::abs(j - 8), std::abs(k - 8)}) <= 2)
                    detected.push_back(g.pos(i, j, k));
    REQUIRE(detected.size() == 125);
    std::size_t expect = 0;
    for (int k = 1; k + 1 < g.nz; ++k)
        for (int j = 1; j + 1 < g.ny; ++j)
            for (int i = 1; i + 1 < g.nx; ++i) {
                if (g.boundary_distance(i, j, k) < margin - 1e-12) continue;
                Vec3 x = g.pos(i, j, k);
                bool excl = false;
                for (const Vec3& dpt : detected)
                    if (norm2(x - dpt) < margin * margin) {
                        excl = true;
                        break;
                    }
                if (!excl) {
                    ++expect;
                    CHECK(Kset.count(g.idx(i, j, k)) == 1u);
                }
            }
    CHECK(K.size() == expect);
    CHECK(Kset.count(g.idx(8, 8, 8)) == 0u);
    CHECK(Kset.count(g.idx(8, 8, 4)) == 0u);  // within margin of the dilated set
    CHECK(Kset.count(g.idx(4, 4, 4)) == 1u);  // far corner of the shell survives

    // a shell margin nothing satisfies: every interior node is too close
    Grid3 g9 = make_grid(9, 9, 9, 0.125);
    QField small = make_qfield(g9);
    for (auto& q : small.v) q = from_uniaxial(1.5, e3);
    CHECK_THROWS_AS(compact_set(small, 0.51), config_error);
}

TEST_CASE("eigenvalue errors: zero on equal fields, exact rank-one case, Weyl bound") {
    Grid3 g = make_grid(5, 5, 5, 0.2);
    QField a = make_qfield(g);
    QField b = make_qfield(g);
    std::vector<std::size_t> K = interior_nodes(g);
    CHECK(eigenvalue_errors(a, b, K) == 0.0);

    // rank-one coefficient bump: spectrum {eps/sqrt2, 0, -eps/sqrt2}
    double eps = 1e-3;
    b.v[K[4]].a[0] = eps;
    CHECK(eigenvalue_errors(a, b, K) == doctest::Approx(eps * eps / 2.0).epsilon(1e-12));

    SplitMix64 rng(61);
    QField f0 = make_qfield(g);
    QField fL = make_qfield(g);
    double worst_pert = 0;
    for (std::size_t c = 0; c < g.n_nodes(); ++c) {
        f0.v[c] = random_qtensor(rng, -1, 1);
        QTensor d = 0.3 * random_qtensor(rng, -1, 1);
        fL.v[c] = f0.v[c] + d;
    }
    for (std::size_t c : K) worst_pert = std::max(worst_pert, norm2(fL.v[c] - f0.v[c]));
    // Weyl: every eigenvalue moves at most the Frobenius norm of the change
    CHECK(eigenvalue_errors(fL, f0, K) <= worst_pert + 1e-14);

    QField wrong{make_grid(5, 5, 6, 0.2), {}};
    wrong.v.assign(wrong.grid.n_nodes(), QTensor{});
    CHECK_THROWS_AS(eigenvalue_errors(a, wrong, K), validation_error);
}

TEST_CASE("region measures: limiting fields, isotropic fields, maximal biaxiality") {
    Grid3 g = make_grid(6, 7, 8, 0.11);
    MaterialParams p = derive_params(1, 1, 1, 0.1);
    double full = g.n_nodes() * g.h * g.h * g.h;

    QField lim = make_qfield(g);
    for (auto& q : lim.v) q = from_uniaxial(p.s_plus, e3);
    auto [s1, l1] = region_measures(lim, p, 0.5);
    CHECK(s1 == 0.0);
    CHECK(l1 == 0.0);

    QField iso = make_qfield(g);  // |Q| = 0 everywhere: the melted region is everything
    auto [s2, l2] = region_measures(iso, p, 0.5);
    CHECK(s2 == doctest::Approx(full).epsilon(1e-14));
    CHECK(l2 == 0.0);

    QField biax = make_qfield(g);  // maximal biaxiality with |Q| above the norm split
    for (auto& q : biax.v) q = two_director(1.0, e1, 0.5, e2);
    CHECK(biaxiality(biax.v[0]) == doctest::Approx(1.0).epsilon(1e-12));
    auto [s3, l3] = region_measures(biax, p, 0.5);
    CHECK(s3 == 0.0);
    CHECK(l3 == doctest::Approx(full).epsilon(1e-14));

    CHECK_THROWS_AS(region_measures(lim, p, 0.0), validation_error);
    CHECK_THROWS_AS(region_measures(lim, p, 1.0), validation_error);
    CHECK_THROWS_AS(region_measures(lim, p, -0.2), validation_error);
}

TEST_CASE("eigen gap map flags degenerate spectra") {
    Grid3 g = make_grid(4, 4, 4, 0.25);
    QField f = make_qfield(g);
    f.v[0] = from_uniaxial(1.5, e3);           // spectrum (1, -1/2, -1/2): gap 0
    f.v[1] = two_director(1.0, e1, 0.5, e2);   // distinct eigenvalues
    auto gap = eigen_gap_map(f);
    REQUIRE(gap.size() == g.n_nodes());
    CHECK(gap[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(gap[1] > 0.1);
    CHECK(gap[2] == 0.0);  // zero tensor: fully degenerate
}

TEST_CASE("monotonicity audit: constants, minimizers, and input guards") {
    Grid3 g = make_grid(17, 17, 17, 1.0 / 16.0);
    MaterialParams p = derive_params(1, 1, 1, 0.25);
    std::vector<std::array<int, 3>> centers{{8, 8, 8}, {6, 8, 8}};
    std::vector<double> radii{2 * g.h, 3 * g.h, 4 * g.h, 5 * g.h};

    // uniform minimizer: every window energy is identically ~0
    QField fmin = make_qfield(g);
    for (auto& q : fmin.v) q = from_uniaxial(p.s_plus, e3);
    double bslope = 123.0;
    double worst = monotonicity_audit(fmin, p, centers, radii, &bslope);
    CHECK(std::abs(worst) < 1e-12);
    CHECK(bslope == 0.0);  // no boundary centers given: report defaults to zero

    // uniform isotropic state: normalized energy grows ~ r², never shrinks
    QField iso = make_qfield(g);
    CHECK(monotonicity_audit(iso, p, centers, radii) >= 0.0);

    // boundary centers only: audit returns 0 and fills the slope report
    std::vector<std::array<int, 3>> bc{{0, 8, 8}, {8, 0, 8}};
    double slope = -1;
    CHECK(monotonicity_audit(iso, p, bc, radii, &slope) == 0.0);
    CHECK(slope >= 0.0);

    CHECK_THROWS_AS(monotonicity_audit(iso, p, centers, {0.1}), validation_error);
    CHECK_THROWS_AS(monotonicity_audit(iso, p, centers, {0.2, 0.1}), validation_error);
}

TEST_CASE("default audit geometry: centers around the middle, radii inside the domain") {
    Grid3 g = make_grid(24, 24, 24, 1.0 / 23.0);
    auto centers = default_audit_centers(g);
    REQUIRE(centers.size() == 5);
    CHECK(centers[0] == std::array<int, 3>{12, 12, 12});
    CHECK(centers[1] == std::array<int, 3>{10, 12, 12});
    CHECK(centers[2] == std::array<int, 3>{14, 12, 12});
    CHECK(centers[3] == std::array<int, 3>{12, 10, 12});
    CHECK(centers[4] == std::array<int, 3>{12, 14, 12});
    auto radii = default_audit_radii(g);
    REQUIRE(radii.size() == 4);
    for (int j = 0; j < 4; ++j) CHECK(radii[j] == doctest::Approx((3 + j) * g.h).epsilon(1e-15));
    // every default ball stays inside for every default center
    QField f = make_qfield(g);
    MaterialParams p = derive_params(1, 1, 1, 0.2);
    for (const auto& c : centers)
        CHECK_NOTHROW(normalized_energy(f, p, g.pos(c[0], c[1], c[2]), radii.back()));

    Grid3 g17 = make_grid(17, 17, 17, 1.0 / 16.0);
    auto r17 = default_audit_radii(g17);
    REQUIRE(r17.size() == 4);
    for (int j = 0; j < 4; ++j) CHECK(r17[j] == doctest::Approx((2 + j) * g17.h).epsilon(1e-14));

    CHECK_THROWS_AS(default_audit_radii(make_grid(9, 9, 9, 0.125)), validation_error);
    CHECK_THROWS_AS(default_audit_radii(make_grid(13, 13, 13, 0.1)), validation_error);
}

TEST_CASE("sweep input validation") {
    SweepConfig cfg;
    cfg.nx = cfg.ny = cfg.nz = 9;
    cfg.scenario = Scenario::constant;
    cfg.margin = 0.3;

    SweepConfig bad = cfg;
    bad.L_sequence = {0.1, 0.2};  // not decreasing
    CHECK_THROWS_AS(run_sweep(bad), validation_error);
    bad.L_sequence = {0.1, -0.05};
    CHECK_THROWS_AS(run_sweep(bad), validation_error);
    bad = cfg;
    bad.box = 0.0;
    CHECK_THROWS_AS(run_sweep(bad), validation_error);
    bad = cfg;
    bad.nx = 2;
    CHECK_THROWS_AS(run_sweep(bad), validation_error);
}

TEST_CASE("sweep over the constant scenario: exact limit at every L") {
    SweepConfig cfg;
    cfg.nx = cfg.ny = cfg.nz = 17;
    cfg.box = 1.0;
    cfg.scenario = Scenario::constant;
    cfg.margin = 0.3;
    cfg.L_sequence = {0.2, 0.1, 0.05};

    std::size_t calls = 0;
    auto rep = run_sweep(cfg, [&](std::size_t idx, const ConvergenceRecord& rec,
                                  const QField& field, const MaterialParams& p) {
        CHECK(idx == calls);
        ++calls;
        CHECK(field.v.size() == 17u * 17u * 17u);
        CHECK(rec.L == doctest::Approx(cfg.L_sequence[idx]).epsilon(1e-15));
        CHECK(p.L == doctest::Approx(cfg.L_sequence[idx]).epsilon(1e-15));
    });
    CHECK(calls == 3);

    CHECK(rep.director_converged);
    CHECK(std::abs(rep.reference_energy) < 1e-12);
    CHECK(rep.complete);
    CHECK(rep.compact_set_size > 0);
    REQUIRE(rep.records.size() == 3);
    for (const auto& rec : rep.records) {
        CHECK(rec.solver_converged);
        CHECK(rec.energy < 1e-10);
        CHECK(rec.energy <= rec.q0_energy + 1e-12);
        CHECK(rec.sup_K_dist < 1e-6);
        CHECK(rec.w12_dist_to_Q0 < 1e-6);
        CHECK(std::abs(rec.sup_K_bulk) < 1e-12);
        CHECK(rec.max_beta_K < 1e-12);
        CHECK(rec.max_eig_err_sq_K < 1e-12);
        CHECK(rec.max_qnorm_dev_K < 1e-8);
        CHECK(rec.omega_star_measure == 0.0);
        CHECK(rec.omega_lambda_measure == 0.0);
        CHECK(rec.boundary_normal_deriv_sq < 1e-12);
        CHECK(std::abs(rec.monotonicity_violation) < 1e-12);
        CHECK(rec.max_q_norm ==
              doctest::Approx(std::sqrt(2.0 / 3.0) * 1.5).epsilon(1e-10));
    }
    // distances are identically zero here, so their decay flags must hold;
    // sup_K_bulk is rounding jitter at ±1e-17 and carries no signal
    CHECK(rep.sup_K_dist_monotone);
    CHECK(rep.w12_monotone);
    // echo carries the resolved ladder
    REQUIRE(rep.config.L_sequence.size() == 3);
    CHECK(rep.config.L_sequence[1] == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("sweep over the rotation scenario: decay toward the limiting map") {
    SweepConfig cfg;
    cfg.nx = cfg.ny = cfg.nz = 17;
    cfg.box = 1.0;
    cfg.scenario = Scenario::rotation;
    cfg.margin = 0.2;
    cfg.L_sequence = {0.2, 0.1, 0.05, 0.025};

    auto rep = run_sweep(cfg);
    CHECK(rep.director_converged);
    // Dirichlet energy of the quarter-turn map is (pi/2)^2 * volume up to an
    // O(h^2) quadrature correction.
    CHECK(rep.reference_energy == doctest::Approx(M_PI * M_PI / 4.0).epsilon(0.01));
    CHECK(rep.complete);
    REQUIRE(rep.records.size() == 4);
    for (std::size_t t = 0; t < 4; ++t) {
        const auto& rec = rep.records[t];
        CHECK(rec.solver_converged);
        CHECK(rec.energy > 0.0);
        CHECK(rec.energy <= rec.q0_energy + 1e-12);
        CHECK(rec.sup_K_bulk > 0.0);
        CHECK(rec.max_qnorm_dev_K > 0.0);
        // a smooth twist never melts or crosses the biaxial threshold
        CHECK(rec.omega_star_measure == 0.0);
        CHECK(rec.omega_lambda_measure == 0.0);
    }
    // the distance to the limiting map shrinks as L does
    CHECK(rep.records.back().sup_K_dist < rep.records.front().sup_K_dist);
    CHECK(rep.records.back().sup_K_bulk < rep.records.front().sup_K_bulk);
    CHECK(rep.records.back().max_beta_K < 0.1);
    CHECK(rep.records.back().max_beta_K < rep.records.front().max_beta_K);
    CHECK(rep.sup_K_dist_monotone);
    CHECK(rep.sup_K_bulk_monotone);
    CHECK(rep.w12_monotone);
    CHECK(rep.slopes_valid);
    CHECK(std::isfinite(rep.slope_sup_K_bulk));
    CHECK(std::isfinite(rep.slope_max_beta_K));
    CHECK(std::isfinite(rep.slope_max_eig_err_sq_K));
    CHECK(std::isfinite(rep.slope_qnorm_dev));
}

TEST_CASE("refinement study: measured rates are grid-resolved, not mesh artifacts") {
    // The rate bands asserted downstream (biaxiality slope near 1, order-norm
    // deviation slope near 1/2 on this ladder) are only meaningful if the
    // fitted slopes are properties of the continuum problem.  Running the
    // identical ladder at two resolutions must reproduce them closely; the
    // observed spread is below 0.005, so 0.02 leaves a wide safety factor.
    auto sweep_at = [](int n) {
        SweepConfig cfg;
        cfg.nx = cfg.ny = cfg.nz = n;
        cfg.scenario = Scenario::rotation;
        cfg.margin = 0.2;
        cfg.L_sequence.clear();
        for (int i = 0; i < 8; ++i) cfg.L_sequence.push_back(0.21 * std::pow(0.82, i));
        return run_sweep(cfg);
    };
    auto coarse = sweep_at(17);
    auto fine = sweep_at(20);
    REQUIRE(coarse.slopes_valid);
    REQUIRE(fine.slopes_valid);

    CHECK(std::abs(coarse.slope_max_beta_K - fine.slope_max_beta_K) < 0.02);
    CHECK(std::abs(coarse.slope_qnorm_dev - fine.slope_qnorm_dev) < 0.02);
    CHECK(std::abs(coarse.slope_max_eig_err_sq_K - fine.slope_max_eig_err_sq_K) < 0.02);
    CHECK(std::abs(coarse.slope_sup_K_bulk - fine.slope_sup_K_bulk) < 0.02);

    for (const auto* r : {&coarse, &fine}) {
        CHECK(r->slope_max_beta_K > 0.5);
        CHECK(r->slope_max_beta_K < 1.5);
        CHECK(r->slope_qnorm_dev > 0.25);
        CHECK(r->slope_qnorm_dev < 0.75);
    }

    // The per-record physical quantities also agree across grids to the
    // percent level, confirming the sweep measures resolved fields.
    for (std::size_t t = 0; t < coarse.records.size(); ++t) {
        CHECK(coarse.records[t].max_beta_K ==
              doctest::Approx(fine.records[t].max_beta_K).epsilon(0.02));
        CHECK(coarse.records[t].energy == doctest::Approx(fine.records[t].energy).epsilon(0.01));
    }
}
