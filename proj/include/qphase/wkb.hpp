#ifndef QPHASE_WKB_HPP
#define QPHASE_WKB_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "qphase/potential.hpp"

namespace qphase {

struct ActionResult {
    double S_diff = 0.0;  ///< S(t2) - S(t1) = integral of p between the turning points
    TurningPair turning{};
    double quadrature_error_estimate = 0.0;
};

/// Integral of sqrt(p^2) over the classical region. Each half is mapped by
/// x = t +- u^2 so the integrand is smooth at the turning points.
ActionResult action_integral(const PotentialSpec& spec, double E);

/// Classical action S(x) - S(t1) at each x (clamped to [t1, t2]).
std::vector<double> classical_action_profile(const PotentialSpec& spec, double E, const std::vector<double>& xs);

struct WkbLevels {
    std::vector<double> energies;
    std::size_t requested = 0;  ///< n_max + 1
    bool complete() const { return energies.size() == requested; }
};

/// Leading-order WKB levels from S_diff(E) = (n + 1/2) pi, n = 0..n_max.
/// For potentials with a threshold the list stops at the last level below it.
WkbLevels wkb_levels(const PotentialSpec& spec, std::size_t n_max);

/// Semiclassical hbar-series of the Riccati variable M at one point.
struct SeriesReport {
    double x_b = 0.0;
    std::vector<std::complex<double>> terms;         ///< M_0(x_b)..M_{order_cap+1}(x_b)
    std::vector<std::complex<double>> derivatives;   ///< M_n'(x_b), same indexing
    std::vector<std::complex<double>> partial_sums;  ///< sum_{k<=n} M_k(x_b)
    std::size_t optimal_order = 0;                   ///< N*
    std::complex<double> boundary_value;             ///< partial_sums[N*]
    std::size_t order_cap = 0;
};

/// Computes M_0 = p, M_1 = i p'/(2p) and
///   M_n = (i M_{n-1}' - sum_{k=1}^{n-1} M_k M_{n-k}) / (2 M_0)
/// as truncated Taylor series around x_b, then applies optimal_truncation.
SeriesReport riccati_series_at(const PotentialSpec& spec, double E, double x_b, std::size_t order_cap);

struct Truncation {
    std::size_t order;
    std::complex<double> boundary_value;
};

/// Index of the smallest term before the first strict rise in |M_n|.
/// Terms that vanish identically (|M_n| <= 1e-13 |M_0|, e.g. odd terms at a
/// symmetry point) neither stop the descent nor count as the minimum.
Truncation optimal_truncation(const SeriesReport& report);

/// Value of d/dx M^(N) - i (p^2 - (M^(N))^2) at x_b for the truncated sum.
std::complex<double> series_residual(const SeriesReport& report, const PotentialSpec& spec, double E, std::size_t order);

}  // namespace qphase

#endif  // QPHASE_WKB_HPP
