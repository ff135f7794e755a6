#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qphase/error.hpp"
#include "qphase/phase.hpp"

using namespace qphase;

namespace {

constexpr double pi = std::numbers::pi;

double sup_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double sup_abs(const std::vector<cplx>& a) {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
}

std::size_t nearest(const Grid& g, double x) {
    const auto it = std::lower_bound(g.nodes.begin(), g.nodes.end(), x);
    return static_cast<std::size_t>(it - g.nodes.begin());
}

}  // namespace

TEST_CASE("grid meets the decay budget and contains x_b") {
    const auto ho = PotentialSpec::harmonic();
    const Grid g = build_grid(ho, 0.5, 0.0);
    CHECK(g.x_b() == 0.0);
    CHECK(std::is_sorted(g.nodes.begin(), g.nodes.end()));
    CHECK(std::adjacent_find(g.nodes.begin(), g.nodes.end()) == g.nodes.end());
    // integral_1^X sqrt(x^2 - 1) dx = (X sqrt(X^2-1) - acosh X) / 2
    const double X = g.nodes.back();
    CHECK(0.5 * (X * std::sqrt(X * X - 1) - std::acosh(X)) >= 30.0);
    const double Y = -g.nodes.front();
    CHECK(0.5 * (Y * std::sqrt(Y * Y - 1) - std::acosh(Y)) >= 30.0);
}

TEST_CASE("Lennard-Jones grid starts at positive x") {
    const Grid g = build_grid(PotentialSpec::lennard_jones(1e4), -0.5, 1.0);
    CHECK(g.nodes.front() > 0.0);
    CHECK(std::isfinite(g.nodes.back()));
    CHECK(g.nodes.front() < g.turning->t1);
    CHECK(g.nodes.back() > g.turning->t2);
}

TEST_CASE("wavelength rule on a constant box") {
    GridPolicy policy;
    policy.points_per_wavelength = 20;
    policy.box = std::make_pair(-5.0, 5.0);
    const Grid g = build_grid(PotentialSpec::constant(0.0), 2.0, 0.0, policy);
    double widest = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) widest = std::max(widest, g.nodes[i] - g.nodes[i - 1]);
    CHECK(widest <= pi / 20 * (1 + 1e-12));
}

TEST_CASE("grid size cap raises resolution overflow") {
    GridPolicy policy;
    policy.node_cap = 1000;
    try {
        build_grid(PotentialSpec::anharmonic_benchmark(), 50.0, 0.0, policy);
        FAIL("expected overflow");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ResolutionOverflow);
    }
}

TEST_CASE("trial function follows the asymptotic rules") {
    const Grid g = build_grid(PotentialSpec::harmonic(), 0.5, 0.0);
    const MField t = trial_function(g);
    const auto i0 = g.x_b_index;
    CHECK(std::abs(t.M[i0] - cplx(1.0, 0.0)) < 1e-12);
    const auto ir = nearest(g, 3.0), il = nearest(g, -3.0);
    const double k = std::sqrt(-g.p2[ir]);
    CHECK(std::abs(t.M[ir] - cplx(0.0, -k)) < 1e-3 * k);
    CHECK(std::abs(t.M[il] - cplx(0.0, std::sqrt(-g.p2[il]))) < 1e-3 * k);
    CHECK(std::abs(k - std::sqrt(8.0)) < 0.05);
}

TEST_CASE("QLM keeps the exact constant solution fixed") {
    GridPolicy policy;
    policy.box = std::make_pair(-3.0, 3.0);
    const double k = 1.7;
    const Grid g = build_grid(PotentialSpec::constant(0.0), 0.5 * k * k, 0.0, policy);
    MField exact{std::vector<cplx>(g.size(), cplx(k, 0.0)), std::vector<cplx>(g.size(), cplx(0.0, 0.0))};
    const MField next = qlm_iterate(g, exact, cplx(k, 0.0));
    CHECK(sup_abs_diff(next.M, exact.M) < 1e-13);

    const auto direct = direct_riccati(PotentialSpec::constant(0.0), 0.5 * k * k, g, cplx(k, 0.0));
    CHECK(sup_abs_diff(direct, exact.M) < 1e-12);
}

TEST_CASE("boundary value with zero real part is rejected") {
    const Grid g = build_grid(PotentialSpec::harmonic(), 0.5, 0.0);
    CHECK_THROWS_AS(qlm_iterate(g, trial_function(g), cplx(0.0, 1.0)), Error);
}

TEST_CASE("total phase at harmonic eigenvalues") {
    const auto ho = PotentialSpec::harmonic();
    PhaseOptions opt;
    opt.x_b = 0.0;
    CHECK(std::abs(solve_phase(ho, 0.5, opt).total_phase - pi) < 1e-9);
    CHECK(std::abs(solve_phase(ho, 2.5, opt).total_phase - 3 * pi) < 1e-9);
}

TEST_CASE("anharmonic benchmark at E = 5 lies between the third and fourth levels") {
    PhaseOptions opt;
    opt.x_b = 0.0;
    const auto sol = solve_phase(PotentialSpec::anharmonic_benchmark(), 5.0, opt);
    CHECK(sol.total_phase > 3 * pi);
    CHECK(sol.total_phase < 4 * pi);
}

TEST_CASE("converged solutions satisfy positivity, monotone phase and the Riccati equation") {
    const PotentialSpec specs[] = {PotentialSpec::harmonic(), PotentialSpec::anharmonic_benchmark(),
                                   PotentialSpec::lennard_jones(1e4)};
    const double energies[] = {3.7, 5.0, -0.3};
    for (std::size_t s = 0; s < 3; ++s) {
        const auto sol = solve_phase(specs[s], energies[s]);
        for (const auto& m : sol.M) CHECK(m.real() > 0.0);
        for (double a : sol.alpha) CHECK(a > 0.0);
        CHECK(std::is_sorted(sol.sigma.begin(), sol.sigma.end()));
        CHECK(std::abs(sol.sigma.front()) < 1e-12);
        const double supM = sup_abs(sol.M);
        CHECK(sol.riccati_residual < 1e-8 * (1 + supM * supM));
        CHECK(sol.iterations <= 8);
        CHECK(sol.final_update_norm < 1e-12 * (1 + supM));
    }
}

TEST_CASE("wavefunction node counts") {
    const auto ho = PotentialSpec::harmonic();
    // At an eigenvalue the raw alpha sin(sigma) may cross zero once more deep in
    // the right tail, where sigma overshoots n pi by the quantization residual.
    for (double n : {0.0, 1.0, 2.0, 5.0}) {
        const auto sol = solve_phase(ho, n + 0.5);
        CHECK(count_sign_changes(*wavefunction(sol, true).normalized) == n);
        const auto& psi = wavefunction(sol).psi;
        const auto& x = sol.grid.nodes;
        std::vector<double> core;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] < sol.grid.turning->t2 + 2.0) core.push_back(psi[i]);
        CHECK(count_sign_changes(core) == n);
    }
    CHECK(count_sign_changes({1.0, 0.0, -1.0, -2.0, 0.0, 0.0, 3.0}) == 2);
}

TEST_CASE("off-eigenvalue wavefunction grows beyond the right turning point") {
    const auto sol = solve_phase(PotentialSpec::anharmonic_benchmark(), 5.0);
    const auto wf = wavefunction(sol);
    const double t2 = sol.grid.turning->t2;
    const auto a = nearest(sol.grid, t2 + 0.3), b = nearest(sol.grid, t2 + 0.6);
    CHECK(std::abs(wf.psi[b]) > std::abs(wf.psi[a]));
    CHECK(std::abs(wf.psi.back()) > 1e3 * std::abs(wf.psi[a]));
}

TEST_CASE("normalized eigenfunction has unit norm") {
    const auto sol = solve_phase(PotentialSpec::harmonic(), 1.5);
    const auto wf = wavefunction(sol, true);
    REQUIRE(wf.normalized.has_value());
    const auto& x = sol.grid.nodes;
    const auto& y = *wf.normalized;
    double norm = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) norm += 0.5 * (x[i] - x[i - 1]) * (y[i] * y[i] + y[i - 1] * y[i - 1]);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(count_sign_changes(y) == 1);
}

TEST_CASE("Schwarzian and Milne residual bounds") {
    auto kmax2 = [](const PhaseSolution& s) { return *std::max_element(s.grid.p2.begin(), s.grid.p2.end()); };
    GridPolicy policy;
    policy.box = std::make_pair(-4.0, 4.0);
    PhaseOptions flat;
    flat.policy = policy;
    const auto c = solve_phase(PotentialSpec::constant(0.0), 2.0, flat);
    CHECK(schwarzian_residual(c) < 1e-12 * kmax2(c));

    const auto ho = solve_phase(PotentialSpec::harmonic(), 0.5);
    CHECK(schwarzian_residual(ho) < 1e-7 * kmax2(ho));
    const auto an = solve_phase(PotentialSpec::quartic_anharmonic(), 5.0);
    CHECK(schwarzian_residual(an) < 1e-6 * kmax2(an));

    for (const auto* s : {&ho, &an}) {
        const auto [res, scale] = milne_residual(*s);
        CHECK(res < 1e-6 * scale);
    }
}

TEST_CASE("QLM agrees with direct Runge-Kutta integration") {
    const auto ho = PotentialSpec::harmonic();
    const auto h = solve_phase(ho, 0.5);
    CHECK(sup_abs_diff(direct_riccati(ho, 0.5, h.grid, h.boundary_value), h.M) < 1e-9);

    const auto lj = PotentialSpec::lennard_jones(1e4);
    const auto l = solve_phase(lj, -0.35);
    CHECK(sup_abs_diff(direct_riccati(lj, -0.35, l.grid, l.boundary_value), l.M) < 1e-8);
}

TEST_CASE("converged field does not depend on the trial function") {
    const auto spec = PotentialSpec::anharmonic_benchmark();
    PhaseOptions a, b;
    b.trial = TrialKind::Linear;
    const auto sa = solve_phase(spec, 5.0, a);
    b.grid = &sa.grid;
    b.x_b = sa.grid.x_b();
    const auto sb = solve_phase(spec, 5.0, b);
    CHECK(sup_abs_diff(sa.M, sb.M) < 1e-10);
}

TEST_CASE("solver is deterministic") {
    const auto spec = PotentialSpec::lennard_jones(1e4);
    const auto s1 = solve_phase(spec, -0.2), s2 = solve_phase(spec, -0.2);
    CHECK(s1.total_phase == s2.total_phase);
    CHECK(s1.M == s2.M);
}
