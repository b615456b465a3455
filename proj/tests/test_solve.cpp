#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ldg/bulk.hpp"
#include "ldg/errors.hpp"
#include "ldg/field.hpp"
#include "ldg/qtensor.hpp"
#include "ldg/solve.hpp"

using namespace ldg;

namespace {

const Vec3 e1{1, 0, 0}, e3{0, 0, 1};

// Constant strong anchoring along e3 with random interior data.
QField anchored_random(const Grid3& g, const MaterialParams& p, SplitMix64& rng, double amp) {
    QField f = make_qfield(g);
    for (auto& q : f.v) q = random_qtensor(rng, -amp, amp);
    apply_director_boundary(f, [](const Vec3&) { return Vec3{0, 0, 1}; }, p);
    return f;
}

}  // namespace

TEST_CASE("a uniform minimizing state is recognized immediately") {
    Grid3 g = make_grid(9, 9, 9, 0.125);
    MaterialParams p = derive_params(1, 1, 1, 0.2);
    QField f = make_qfield(g);
    for (auto& q : f.v) q = from_uniaxial(p.s_plus, e3);
    auto [sol, rep] = minimize_q(f, p, {});
    CHECK(rep.converged);
    CHECK(rep.iterations == 0);
    CHECK(std::abs(rep.final_energy) < 1e-12);
    CHECK(rep.final_residual < 1e-12);
    CHECK(max_q_norm(sol) == doctest::Approx(std::sqrt(2.0 / 3.0) * p.s_plus).epsilon(1e-13));
    for (std::size_t c = 0; c < g.n_nodes(); ++c) CHECK(norm(sol.v[c] - f.v[c]) == 0.0);
}

TEST_CASE("constant anchoring relaxes the interior to the boundary state") {
    Grid3 g = make_grid(9, 9, 9, 0.125);
    MaterialParams p = derive_params(1, 1, 1, 0.2);
    QField f = make_qfield(g);  // isotropic interior
    apply_director_boundary(f, [](const Vec3&) { return Vec3{0, 0, 1}; }, p);
    double e0 = total_energy(f, p);
    auto [sol, rep] = minimize_q(f, p, {});
    CHECK(rep.converged);
    CHECK(rep.final_energy < 1e-8);
    CHECK(rep.final_energy <= e0);
    CHECK(rep.final_residual <= 1e-8 * p.a2 * p.s_plus);
    QTensor qb = from_uniaxial(p.s_plus, e3);
    for (std::size_t c = 0; c < g.n_nodes(); ++c) CHECK(norm(sol.v[c] - qb) < 1e-4);
    // cross-checks between report fields and independent assembly
    CHECK(rep.final_energy == doctest::Approx(total_energy(sol, p)).epsilon(1e-12));
    CHECK(rep.final_residual == doctest::Approx(el_residual(sol, p).max_norm).epsilon(1e-12));
    CHECK(rep.max_q_norm == doctest::Approx(max_q_norm(sol)).epsilon(1e-14));
}

TEST_CASE("energy trace is nonincreasing and the energy never rises above the start") {
    SplitMix64 rng(51);
    Grid3 g = make_grid(7, 7, 7, 0.15);
    MaterialParams p = derive_params(1.5, 0.9, 1.1, 0.3);
    QField f = anchored_random(g, p, rng, 1.2);
    double e0 = total_energy(f, p);
    SolverOptions o;
    o.log_every = 1;  // trace every accepted iterate
    auto [sol, rep] = minimize_q(f, p, o);
    CHECK(rep.converged);
    REQUIRE(rep.energy_trace.size() >= 2);
    CHECK(rep.energy_trace.front().second <= e0);
    for (std::size_t t = 1; t < rep.energy_trace.size(); ++t) {
        CHECK(rep.energy_trace[t].second <= rep.energy_trace[t - 1].second);
        CHECK(rep.energy_trace[t].first > rep.energy_trace[t - 1].first);
    }
    CHECK(rep.final_energy <= e0);
}

TEST_CASE("solutions respect the uniaxial norm bound") {
    SplitMix64 rng(52);
    Grid3 g = make_grid(9, 9, 9, 0.125);
    MaterialParams p = derive_params(1, 1, 1, 0.15);
    QField f = anchored_random(g, p, rng, 0.8);
    auto [sol, rep] = minimize_q(f, p, {});
    CHECK(rep.converged);
    // minimizers live inside the closed ball |Q| ≤ √(2/3) s₊
    CHECK(max_q_norm(sol) <= std::sqrt(2.0 / 3.0) * p.s_plus + 1e-6);
}

TEST_CASE("fixed-rule descent with an explicit step also converges") {
    Grid3 g = make_grid(7, 7, 7, 0.2);
    MaterialParams p = derive_params(1, 1, 1, 0.4);
    QField f = make_qfield(g);
    apply_director_boundary(f, [](const Vec3&) { return Vec3{0, 0, 1}; }, p);
    SolverOptions o;
    o.step_rule = StepRule::fixed;
    o.max_iters = 60000;
    auto [sol, rep] = minimize_q(f, p, o);
    CHECK(rep.converged);
    CHECK(rep.final_energy < 1e-8);
}

TEST_CASE("descent is deterministic and independent of the thread count") {
    SplitMix64 rng(53);
    Grid3 g = make_grid(8, 7, 9, 0.14);
    MaterialParams p = derive_params(1.1, 1.0, 0.9, 0.25);
    QField f = anchored_random(g, p, rng, 1.0);

    set_thread_count(1);
    auto [s1, r1] = minimize_q(f, p, {});
    set_thread_count(5);
    auto [s5, r5] = minimize_q(f, p, {});
    set_thread_count(1);

    CHECK(r1.iterations == r5.iterations);
    CHECK(r1.final_energy == r5.final_energy);
    CHECK(r1.final_residual == r5.final_residual);
    for (std::size_t c = 0; c < g.n_nodes(); ++c)
        for (int t = 0; t < 5; ++t) CHECK(s1.v[c].a[t] == s5.v[c].a[t]);
}

TEST_CASE("director descent: constant anchoring, unit norms, tangential stopping") {
    SplitMix64 rng(54);
    Grid3 g = make_grid(9, 9, 9, 0.125);
    DirectorField d = make_director_field(g, {0, 0, 1});
    for (std::size_t c : interior_nodes(g)) {
        Vec3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        if (norm2(v) < 1e-4) v = {1, 0, 0};
        d.v[c] = normalized(v);
    }
    apply_director_boundary(d, [](const Vec3&) { return Vec3{0, 0, 1}; });
    auto [sol, rep] = minimize_director(d, {});
    CHECK(rep.converged);
    CHECK(rep.final_energy < 1e-8);
    for (std::size_t c = 0; c < g.n_nodes(); ++c)
        CHECK(norm(sol.v[c]) == doctest::Approx(1.0).epsilon(1e-12));
    // interior aligns with the boundary value
    for (std::size_t c : interior_nodes(g)) CHECK(norm(sol.v[c] - Vec3{0, 0, 1}) < 1e-4);
}

TEST_CASE("director descent lowers the energy of a twisted configuration") {
    Grid3 g = make_grid(9, 9, 9, 0.125);
    DirectorField d = make_director_field(g);
    // boundary: rotate by pi/2 across z; interior: constant e1 (far from optimal)
    auto twist = [&](const Vec3& x) {
        double t = 0.5 * M_PI * x[2];
        return Vec3{std::cos(t), std::sin(t), 0};
    };
    for (auto& v : d.v) v = e1;
    apply_director_boundary(d, twist);
    double start = dirichlet_energy_director(d);
    SolverOptions o;
    o.max_iters = 40000;
    auto [sol, rep] = minimize_director(d, o);
    CHECK(rep.final_energy < start);
    CHECK(rep.final_energy == doctest::Approx(dirichlet_energy_director(sol)).epsilon(1e-12));
    for (std::size_t c = 0; c < g.n_nodes(); ++c)
        CHECK(norm(sol.v[c]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("limiting map: uniaxial lift with vanishing shifted density") {
    SplitMix64 rng(55);
    Grid3 g = make_grid(6, 6, 6, 0.2);
    MaterialParams p = derive_params(1.3, 0.7, 1.2, 0.5);
    DirectorField d = make_director_field(g);
    for (auto& v : d.v) {
        Vec3 w{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        if (norm2(w) < 1e-4) w = {0, 1, 0};
        v = normalized(w);
    }
    QField q = limiting_map(d, p);
    REQUIRE(q.v.size() == g.n_nodes());
    double expect_norm = std::sqrt(2.0 / 3.0) * p.s_plus;
    for (std::size_t c = 0; c < g.n_nodes(); ++c) {
        CHECK(std::abs(f_bulk_shifted(q.v[c], p)) < 1e-12);
        CHECK(biaxiality(q.v[c]) < 1e-12);
        CHECK(norm(q.v[c]) == doctest::Approx(expect_norm).epsilon(1e-13));
        CHECK(norm(q.v[c] - from_uniaxial(p.s_plus, d.v[c])) == 0.0);
    }
}

TEST_CASE("warm data cannot end above its own start: upper bound principle") {
    SplitMix64 rng(56);
    Grid3 g = make_grid(8, 8, 8, 0.13);
    MaterialParams p = derive_params(1, 1, 1, 0.18);
    // hedgehog anchoring: the interesting nonconstant configuration
    Vec3 c{0.455, 0.455, 0.455};
    QField f = make_qfield(g);
    for (auto& q : f.v) q = QTensor{};
    apply_director_boundary(f, [&](const Vec3& x) { return normalized(x - c); }, p);
    double e0 = total_energy(f, p);
    SolverOptions o;
    o.max_iters = 4000;
    auto [sol, rep] = minimize_q(f, p, o);
    CHECK(rep.final_energy <= e0);
    CHECK(rep.final_energy == doctest::Approx(total_energy(sol, p)).epsilon(1e-12));
    // boundary data untouched, bit for bit
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (g.is_boundary(i, j, k)) {
                    std::size_t id = g.idx(i, j, k);
                    for (int t = 0; t < 5; ++t) CHECK(sol.v[id].a[t] == f.v[id].a[t]);
                }
}
