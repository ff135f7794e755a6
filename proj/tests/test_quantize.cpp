#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "qphase/error.hpp"
#include "qphase/oracle.hpp"
#include "qphase/quantize.hpp"
#include "qphase/wkb.hpp"

using namespace qphase;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("phase curve brackets the harmonic ground state") {
    const auto curve = scan_total_phase(PotentialSpec::harmonic(), {0.25, 0.75});
    REQUIRE(curve.size() == 2);
    CHECK(curve.total_phases()[0] < pi);
    CHECK(curve.total_phases()[1] > pi);
    const auto br = curve.bracket(pi);
    REQUIRE(br.has_value());
    CHECK(br->first == 0.25);
    CHECK(br->second == 0.75);
}

TEST_CASE("monotone interpolant does not overshoot") {
    const PhaseCurve c({0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 0.1, 5.0, 5.1, 9.0});
    CHECK(c.strictly_increasing());
    double prev = c(0.0);
    for (int k = 1; k <= 400; ++k) {
        const double v = c(k * 0.01);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(c(1.5) >= 0.1);
    CHECK(c(1.5) <= 5.0);
    const auto e = c.invert(2.0);
    REQUIRE(e.has_value());
    CHECK(c(*e) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(!c.invert(10.0).has_value());
}

TEST_CASE("scan results are independent of the worker count") {
    const auto spec = PotentialSpec::anharmonic_benchmark();
    const auto grid = auto_energy_grid(spec, 5);
    ScanOptions one, four;
    one.workers = 1;
    four.workers = 4;
    const auto a = scan_total_phase(spec, grid, one), b = scan_total_phase(spec, grid, four);
    CHECK(a.energies() == b.energies());
    CHECK(a.total_phases() == b.total_phases());
    CHECK(a.strictly_increasing());
}

TEST_CASE("scan records failures and keeps the rest") {
    const auto curve = scan_total_phase(PotentialSpec::harmonic(), {-1.0, 0.5, 1.5});
    CHECK(curve.size() == 2);
    REQUIRE(curve.failures().size() == 1);
    CHECK(curve.failures()[0].energy == -1.0);
    CHECK(curve.failures()[0].kind == ErrorKind::NoClassicalRegion);
}

TEST_CASE("Lennard-Jones phase rises by about 24 pi across the well") {
    const auto spec = PotentialSpec::lennard_jones(1e4);
    const auto curve = scan_total_phase(spec, {-0.999, -1e-9});
    REQUIRE(curve.size() == 2);
    const double rise = (curve.total_phases()[1] - curve.total_phases()[0]) / pi;
    CHECK(rise > 23.0);
    CHECK(rise < 25.0);
}

TEST_CASE("harmonic levels are exact") {
    const auto table = quantum_levels(PotentialSpec::harmonic(), 9);
    REQUIRE(table.rows.size() == 10);
    for (const auto& r : table.rows) {
        CHECK(std::abs(r.E_quantum - (r.n + 0.5)) < 1e-9);
        CHECK(std::abs(r.residual) < 1e-9);
    }
}

TEST_CASE("levels do not depend on scan density") {
    const auto spec = PotentialSpec::anharmonic_benchmark();
    ScanOptions coarse, dense;
    coarse.per_level = 3;
    dense.per_level = 12;
    const auto a = quantum_levels(spec, 6, coarse), b = quantum_levels(spec, 6, dense);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].n == i);
        CHECK(std::abs(a.rows[i].E_quantum - b.rows[i].E_quantum) < 1e-9 * std::max(1.0, a.rows[i].E_quantum));
    }
}

TEST_CASE("eigenfunctions at quantized levels have n nodes") {
    const auto spec = PotentialSpec::anharmonic_benchmark();
    const auto table = quantum_levels(spec, 5);
    for (const auto& r : table.rows) {
        const auto sol = solve_phase(spec, r.E_quantum);
        CHECK(count_sign_changes(*wavefunction(sol, true).normalized) == r.n);
    }
}

TEST_CASE("bound-state counts") {
    CHECK(count_bound_states(PotentialSpec::lennard_jones(1e4)) == 24);
    CHECK_THROWS_AS(count_bound_states(PotentialSpec::harmonic()), Error);

    const auto shallow = PotentialSpec::lennard_jones(1e2);
    const std::size_t n = count_bound_states(shallow);
    const auto cfg = default_oracle_config(shallow, 0);
    CHECK(n == oracle_count_below(shallow, cfg, -1e-12));
    CHECK(n == 2);
}

TEST_CASE("harmonic comparison columns agree") {
    const auto table = compare_methods(PotentialSpec::harmonic(), 5);
    REQUIRE(table.rows.size() == 6);
    for (const auto& r : table.rows) {
        REQUIRE(r.E_wkb.has_value());
        REQUIRE(r.E_oracle.has_value());
        CHECK(std::abs(r.E_quantum - *r.E_wkb) < 1e-8);
        CHECK(std::abs(r.E_quantum - *r.E_oracle) < 1e-8);
        REQUIRE(r.rel_err_quantum.has_value());
        CHECK(*r.rel_err_quantum < 1e-8);
    }
}

TEST_CASE("anharmonic ground state: WKB off by more than ten percent, quantum exact") {
    const auto table = compare_methods(PotentialSpec::anharmonic_benchmark(), 0);
    REQUIRE(table.rows.size() == 1);
    const auto& r = table.rows[0];
    CHECK(*r.rel_err_wkb > 0.10);
    CHECK(*r.rel_err_quantum < 1e-8);
}

// Mass convention for V = x^2 + 2 x^4: only m = 2 gives twenty levels
// below E = 60 and puts E = 5 between the third and fourth levels.
TEST_CASE("anharmonic mass convention experiment") {
    struct Outcome {
        double mass;
        std::size_t below_60;
        std::size_t below_5;
    };
    const Outcome expected[] = {{0.5, 10, 1}, {1.0, 14, 2}, {2.0, 20, 3}};
    for (const auto& o : expected) {
        const auto spec = PotentialSpec::quartic_anharmonic(1.0, 2.0, o.mass);
        const auto cfg = default_oracle_config(spec, 25);
        CHECK(oracle_count_below(spec, cfg, 60.0) == o.below_60);
        CHECK(oracle_count_below(spec, cfg, 5.0) == o.below_5);
    }
    CHECK(anharmonic_benchmark_mass == 2.0);
}
