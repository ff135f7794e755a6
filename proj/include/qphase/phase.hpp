#ifndef QPHASE_PHASE_HPP
#define QPHASE_PHASE_HPP

// Quantum phase of a bound-state problem.
//
// The Riccati variable M = sigma' + (i/2) (ln sigma')' obeys
//     M' = i (p^2 - M^2),
// with Re M = sigma' > 0 and amplitude alpha = (Re M)^{-1/2}. Given a
// boundary value M(x_b) from the optimally truncated hbar-series, M is found
// by quasilinearization (Newton iteration in function space) on a grid that
// extends into both forbidden regions until the wavefunction has decayed by
// exp(-decay_budget). The total phase sigma(s2) - sigma(s1) equals (n+1) pi
// exactly at the n-th eigenvalue.

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qphase/potential.hpp"
#include "qphase/wkb.hpp"

namespace qphase {

using cplx = std::complex<double>;

struct GridPolicy {
    double points_per_wavelength = 480.0;
    double points_per_decay_length = 160.0;
    double max_step = 0.5;
    double decay_budget = 30.0;
    std::size_t node_cap = 2'000'000;
    /// Explicit [lo, hi] for potentials without turning points (constant).
    std::optional<std::pair<double, double>> box;
};

struct Grid {
    std::vector<double> nodes;
    std::size_t x_b_index = 0;
    GridPolicy policy;
    std::optional<TurningPair> turning;
    /// |d(p^2)/dx| at t1 and t2 (set with turning)
    double slope_t1 = 0.0;
    double slope_t2 = 0.0;
    std::vector<double> p2;   ///< p^2 at nodes
    std::vector<double> dp2;  ///< d(p^2)/dx at nodes

    double x_b() const { return nodes[x_b_index]; }
    std::size_t size() const { return nodes.size(); }
};

/// Nodes from x_b outward until the forbidden-region decay exponent
/// (integral of |p| beyond the turning point) reaches policy.decay_budget.
Grid build_grid(const PotentialSpec& spec, double E, double x_b, const GridPolicy& policy = {});

/// Re-evaluates p^2 on the same nodes at another energy.
Grid regrid_energy(const Grid& grid, const PotentialSpec& spec, double E);

/// Step-size rule used by build_grid at one point.
double local_step(const GridPolicy& policy, double p2, double dp2);

/// M and dM/dx at the grid nodes.
struct MField {
    std::vector<cplx> M;
    std::vector<cplx> dM;
};

enum class TrialKind {
    Smoothstep,  ///< C1 blend with regularized |p| in windows around the turning points
    Linear,      ///< C0 linear ramp of the phase factor over one Airy length, (p^4 + c^4)^{1/4} everywhere
};

/// |p| between the turning points, +i|p| left of t1, -i|p| right of t2.
MField trial_function(const Grid& grid, TrialKind kind = TrialKind::Smoothstep);

/// One quasilinearization step: solves
///     M_{q+1}' = i (p^2 + M_q^2 - 2 M_q M_{q+1}),  M_{q+1}(x_b) = boundary_value,
/// marching outward from x_b with the two-point Hermite (fourth-order) rule.
MField qlm_iterate(const Grid& grid, const MField& current, cplx boundary_value);

struct PhaseOptions {
    std::optional<double> x_b;
    std::size_t order_cap = 20;
    /// Forces the series truncation order instead of the optimal one.
    std::optional<std::size_t> fixed_order;
    GridPolicy policy;
    std::size_t max_iterations = 12;
    double tolerance = 1.0e-12;
    TrialKind trial = TrialKind::Smoothstep;
    /// Skip default-x_b and grid construction when provided.
    const Grid* grid = nullptr;
};

struct PhaseSolution {
    double energy = 0.0;
    Grid grid;
    std::vector<cplx> M;
    std::vector<cplx> dM;
    std::vector<double> sigma;  ///< sigma(x_min) = 0
    std::vector<double> alpha;
    double total_phase = 0.0;
    double tail_phase = 0.0;  ///< analytic estimate of the phase outside [x_min, x_max], included in total_phase
    std::size_t iterations = 0;
    std::vector<double> update_norms;  ///< sup |M_{q+1} - M_q| per iteration
    double final_update_norm = 0.0;
    double riccati_residual = 0.0;
    SeriesReport series;
    std::size_t truncation_order = 0;
    cplx boundary_value;
};

/// Default matching point: the potential minimum for symmetric wells;
/// otherwise the point in the classical region, at or right of the
/// minimum, where the optimally truncated series has the smallest last
/// term relative to p.
double default_xb(const PotentialSpec& spec, double E, std::size_t order_cap = 20);

PhaseSolution solve_phase(const PotentialSpec& spec, double E, const PhaseOptions& options = {});

/// Phase, amplitude and total phase from a converged field.
void accumulate_phase(PhaseSolution& sol);

/// Independent route: adaptive embedded Runge-Kutta on M' = i (p^2 - M^2)
/// from x_b outward, sampled at the grid nodes.
std::vector<cplx> direct_riccati(const PotentialSpec& spec, double E, const Grid& grid, cplx boundary_value,
                                 double rel_tol = 1.0e-13, double abs_tol = 1.0e-13);

struct Wavefunction {
    std::vector<double> psi;  ///< alpha sin(sigma)
    /// L2-normalized eigenfunction, present when requested. Right of the
    /// classical midpoint it is built from sin(sigma - Sigma) cos(Sigma),
    /// which equals sin(sigma) at an eigenvalue but keeps the tail bounded.
    std::optional<std::vector<double>> normalized;
};

Wavefunction wavefunction(const PhaseSolution& sol, bool eigenvalue = false);

std::size_t count_sign_changes(const std::vector<double>& values);

/// sup |sigma'^2 - p^2 + <sigma; x>/2| over interior nodes, with sigma' = Re M
/// and higher derivatives taken from the Riccati functional.
double schwarzian_residual(const PhaseSolution& sol);

/// sup |alpha'' + p^2 alpha - alpha^-3| over classically allowed nodes,
/// same derivative route; returned together with sup |p^2 alpha| there.
std::pair<double, double> milne_residual(const PhaseSolution& sol);

/// sup over intervals of |H'(mid) - i (p^2(mid) - H(mid)^2)| with H the cubic
/// Hermite interpolant of the node values M and i (p^2 - M^2).
double riccati_residual(const PotentialSpec& spec, double E, const Grid& grid, const std::vector<cplx>& M);

}  // namespace qphase

#endif  // QPHASE_PHASE_HPP
