#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qphase/error.hpp"
#include "qphase/oracle.hpp"

using namespace qphase;

namespace {

constexpr double pi = std::numbers::pi;

double trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
    return s;
}

}  // namespace

TEST_CASE("harmonic spectrum") {
    const auto spec = PotentialSpec::harmonic();
    for (auto scheme : {OracleScheme::NumerovFd, OracleScheme::SecondOrderFd}) {
        const auto lv = oracle_levels(spec, default_oracle_config(spec, 4, scheme), 4);
        REQUIRE(lv.size() == 5);
        for (std::size_t n = 0; n < 5; ++n) {
            CHECK(std::abs(lv[n].energy - (n + 0.5)) < 1e-8);
            CHECK(lv[n].uncertainty < 1e-8);
        }
    }
}

TEST_CASE("particle in a box") {
    const double L = 2.0;
    OracleConfig cfg;
    cfg.x_min = 0.0;
    cfg.x_max = L;
    cfg.node_count = 4000;
    const auto lv = oracle_levels(PotentialSpec::constant(0.0), cfg, 3);
    for (std::size_t k = 0; k < 4; ++k) {
        const double n = k + 1.0;
        CHECK(lv[k].energy == doctest::Approx(pi * pi * n * n / (2 * L * L)).epsilon(1e-9));
    }
}

TEST_CASE("schemes agree on the anharmonic benchmark") {
    const auto spec = PotentialSpec::anharmonic_benchmark();
    const auto a = oracle_levels(spec, default_oracle_config(spec, 9, OracleScheme::NumerovFd), 9);
    const auto b = oracle_levels(spec, default_oracle_config(spec, 9, OracleScheme::SecondOrderFd), 9);
    for (std::size_t n = 0; n < 10; ++n) {
        CHECK(std::abs(a[n].energy - b[n].energy) < 1e-8 * std::max(1.0, a[n].energy));
        CHECK(std::abs(a[n].energy - b[n].energy) <= a[n].uncertainty + b[n].uncertainty + 1e-12);
    }
}

TEST_CASE("ground state is the Gaussian") {
    const auto spec = PotentialSpec::harmonic();
    const auto ef = oracle_eigenfunction(spec, default_oracle_config(spec, 0), 0);
    std::vector<double> prod(ef.x.size());
    for (std::size_t i = 0; i < ef.x.size(); ++i)
        prod[i] = ef.psi[i] * std::exp(-0.5 * ef.x[i] * ef.x[i]) / std::pow(pi, 0.25);
    CHECK(trapezoid(ef.x, prod) > 1 - 1e-8);
}

TEST_CASE("parity and node count") {
    const auto ho = PotentialSpec::harmonic();
    const auto ef = oracle_eigenfunction(ho, default_oracle_config(ho, 1), 1);
    std::vector<double> prod(ef.x.size());
    for (std::size_t i = 0; i < ef.x.size(); ++i) prod[i] = ef.psi[i] * std::exp(-ef.x[i] * ef.x[i]);
    CHECK(std::abs(trapezoid(ef.x, prod)) < 1e-8);

    const auto an = PotentialSpec::quartic_anharmonic();
    const auto e2 = oracle_eigenfunction(an, default_oracle_config(an, 2), 2);
    std::size_t changes = 0;
    for (std::size_t i = 1; i < e2.psi.size(); ++i)
        if ((e2.psi[i] > 0) != (e2.psi[i - 1] > 0) && std::abs(e2.psi[i] - e2.psi[i - 1]) > 1e-12) ++changes;
    CHECK(changes == 2);
}

TEST_CASE("first ten eigenvectors are orthonormal") {
    const auto spec = PotentialSpec::anharmonic_benchmark();
    const auto cfg = default_oracle_config(spec, 9);
    std::vector<OracleEigenfunction> v;
    for (std::size_t n = 0; n < 10; ++n) v.push_back(oracle_eigenfunction(spec, cfg, n));
    double worst = 0.0;
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            std::vector<double> prod(v[i].x.size());
            for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = v[i].psi[k] * v[j].psi[k];
            worst = std::max(worst, std::abs(trapezoid(v[i].x, prod) - (i == j ? 1.0 : 0.0)));
        }
    CHECK(worst < 1e-8);
}

TEST_CASE("Sturm count matches the level list") {
    const auto spec = PotentialSpec::anharmonic_benchmark();
    const auto cfg = default_oracle_config(spec, 9);
    const auto grid = oracle_grid_levels(spec, cfg, 10);
    for (std::size_t n = 0; n < 10; ++n) {
        CHECK(oracle_count_below(spec, cfg, grid[n] - 1e-9) == n);
        CHECK(oracle_count_below(spec, cfg, grid[n] + 1e-9) == n + 1);
    }
}

TEST_CASE("invalid configurations") {
    OracleConfig cfg;
    cfg.node_count = 10;
    CHECK_THROWS_AS(oracle_levels(PotentialSpec::harmonic(), cfg, 2), Error);
    cfg.node_count = 2000;
    cfg.x_min = 1.0;
    cfg.x_max = -1.0;
    CHECK_THROWS_AS(oracle_levels(PotentialSpec::harmonic(), cfg, 2), Error);
}

TEST_CASE("unconverged extrapolation is reported") {
    OracleConfig cfg;
    cfg.x_min = -8.0;
    cfg.x_max = 8.0;
    cfg.node_count = 1000;
    cfg.scheme = OracleScheme::SecondOrderFd;
    cfg.tolerance = 1e-14;
    try {
        oracle_levels(PotentialSpec::anharmonic_benchmark(), cfg, 5);
        FAIL("expected unconverged");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Unconverged);
    }
}
