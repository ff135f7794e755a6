#ifndef QPHASE_ORACLE_HPP
#define QPHASE_ORACLE_HPP

// Reference eigenvalues from matrix discretizations of
//     -psi'' = kappa (E - V) psi,   psi(x_min) = psi(x_max) = 0,
// on a uniform grid. Both schemes reduce to a symmetric tridiagonal K(E)
// whose eigenvalues decrease monotonically in E, so the number of negative
// pivots of K(E) counts the discrete levels below E (Sturm sequence). Levels
// are bisected on that count, then Richardson-extrapolated over h and h/2.
//
//   SecondOrderFd:  K = tridiag(-1, 2 - h^2 kappa (E - V_i), -1)
//   NumerovFd:      K = tridiag(-1, 2 (1 - 5 z_i / 12) / (1 + z_i / 12), -1),
//                   z_i = h^2 kappa (E - V_i), acting on (1 + z_i / 12) psi_i

#include <cstddef>
#include <string>
#include <vector>

#include "qphase/potential.hpp"

namespace qphase {

enum class OracleScheme { SecondOrderFd, NumerovFd };

const char* to_string(OracleScheme scheme);

struct OracleConfig {
    double x_min = -10.0;
    double x_max = 10.0;
    std::size_t node_count = 20000;  ///< interior nodes of the coarse grid
    OracleScheme scheme = OracleScheme::NumerovFd;
    /// Largest accepted |E_extrapolated - E_fine| relative to max(1, |E|).
    double tolerance = 1.0e-8;

    void validate() const;
};

struct OracleLevel {
    double energy = 0.0;  ///< Richardson-extrapolated
    double uncertainty = 0.0;
    double coarse = 0.0;
    double fine = 0.0;
};

/// Lowest n_max + 1 levels. For potentials with a threshold only levels
/// below it are returned, so the list may be shorter.
std::vector<OracleLevel> oracle_levels(const PotentialSpec& spec, const OracleConfig& cfg, std::size_t n_max);

/// Discrete levels on one grid (no extrapolation), lowest count of them.
std::vector<double> oracle_grid_levels(const PotentialSpec& spec, const OracleConfig& cfg, std::size_t count);

/// Number of discrete levels strictly below E on the coarse grid.
std::size_t oracle_count_below(const PotentialSpec& spec, const OracleConfig& cfg, double E);

struct OracleEigenfunction {
    std::vector<double> x;    ///< interior nodes
    std::vector<double> psi;  ///< trapezoid-normalized, first antinode positive
    double energy = 0.0;      ///< grid eigenvalue
};

OracleEigenfunction oracle_eigenfunction(const PotentialSpec& spec, const OracleConfig& cfg, std::size_t n);

/// A box meeting the decay budget for the first n_max + 1 levels and a step
/// of step_factor / p_max. For Lennard-Jones the right wall is at least 40
/// and is pushed out until the highest returned level has decayed by
/// exp(-decay_budget).
OracleConfig default_oracle_config(const PotentialSpec& spec, std::size_t n_max,
                                   OracleScheme scheme = OracleScheme::NumerovFd, double decay_budget = 20.0,
                                   double step_factor = 0.0);

}  // namespace qphase

#endif  // QPHASE_ORACLE_HPP
