#ifndef QPHASE_QUANTIZE_HPP
#define QPHASE_QUANTIZE_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qphase/error.hpp"
#include "qphase/phase.hpp"
#include "qphase/potential.hpp"

namespace qphase {

struct ScanFailure {
    double energy = 0.0;
    ErrorKind kind = ErrorKind::Unconverged;
    std::string message;
};

/// Total phase Sigma(E) on an energy grid with a shape-preserving cubic
/// interpolant (linear below four samples).
class PhaseCurve {
public:
    PhaseCurve() = default;
    PhaseCurve(std::vector<double> energies, std::vector<double> total_phases, std::vector<ScanFailure> failures = {});

    const std::vector<double>& energies() const { return energies_; }
    const std::vector<double>& total_phases() const { return phases_; }
    const std::vector<ScanFailure>& failures() const { return failures_; }
    std::size_t size() const { return energies_.size(); }

    bool strictly_increasing() const;
    double operator()(double E) const;
    /// E in the sample range with curve(E) = target; nullopt when not bracketed.
    std::optional<double> invert(double target) const;
    /// Sample interval [E_i, E_{i+1}] whose phases bracket target.
    std::optional<std::pair<double, double>> bracket(double target) const;

private:
    std::vector<double> energies_;
    std::vector<double> phases_;
    std::function<double(double)> interp_;
    std::vector<ScanFailure> failures_;
};

struct ScanOptions {
    PhaseOptions phase;
    /// Worker threads; 0 reads QPHASE_WORKERS and falls back to 1.
    std::size_t workers = 0;
    /// Samples per WKB level spacing for automatic energy grids.
    std::size_t per_level = 4;
};

/// Resolves ScanOptions::workers (flag, then QPHASE_WORKERS, then 1).
std::size_t effective_workers(std::size_t requested);

/// Solves the phase at every energy. Failed energies are left out of the
/// curve and listed in failures(); the order of results never depends on
/// scheduling.
PhaseCurve scan_total_phase(const PotentialSpec& spec, const std::vector<double>& energies, const ScanOptions& options = {});

/// Energy grid covering levels 0..n_max: WKB-spaced for confining wells; for
/// Lennard-Jones, linear across the well plus E = -10^-k near threshold.
std::vector<double> auto_energy_grid(const PotentialSpec& spec, std::size_t n_max, std::size_t per_level = 4);

struct LevelRow {
    std::size_t n = 0;
    double E_quantum = 0.0;
    std::optional<double> E_wkb;
    std::optional<double> E_oracle;
    std::optional<double> oracle_uncertainty;
    double residual = 0.0;  ///< Sigma(E_quantum) - (n + 1) pi
    std::size_t iterations = 0;
    std::optional<double> rel_err_quantum;   ///< |E_quantum - E_oracle| / |E_oracle|
    std::optional<double> rel_err_wkb;       ///< |E_wkb - E_oracle| / |E_oracle|
    std::optional<double> spacing_err_quantum;  ///< |E_quantum - E_oracle| / local level spacing
    std::optional<double> spacing_err_wkb;
};

struct LevelTable {
    std::vector<LevelRow> rows;
    std::vector<std::string> notices;  ///< skipped levels and similar
};

struct RefineOptions {
    PhaseOptions phase;
    double phase_tolerance = 1.0e-9;
    std::size_t max_steps = 60;
    /// |Sigma - target| below which grid, x_b and truncation order are frozen.
    double freeze_below = 1.0e-6;
};

/// Levels whose (n + 1) pi lies inside the curve. Initial guesses come from
/// the interpolant; with refine, secant steps on full phase solves continue
/// until |Sigma(E) - (n + 1) pi| < phase_tolerance.
LevelTable solve_levels(const PhaseCurve& curve, const PotentialSpec& spec, bool refine = true,
                        const RefineOptions& options = {});

/// Single level n by safeguarded secant inside [lo, hi]; slope is an
/// initial estimate of dSigma/dE.
LevelRow refine_level(const PotentialSpec& spec, std::size_t n, double guess, double slope, double lo, double hi,
                      const RefineOptions& options = {});

/// floor(Sigma(E)/pi) just below the dissociation threshold. Rejects
/// confining potentials.
std::size_t count_bound_states(const PotentialSpec& spec, const PhaseOptions& options = {});

struct CompareOptions {
    bool wkb = true;
    bool oracle = true;
    ScanOptions scan;
    RefineOptions refine;
};

/// Relative and spacing-relative errors of the quantum and WKB columns
/// against the oracle column, where present.
void fill_comparison_errors(LevelTable& table);

/// Quantum levels 0..n_max with WKB and oracle columns and their errors.
LevelTable compare_methods(const PotentialSpec& spec, std::size_t n_max, const CompareOptions& options = {});

/// Levels 0..n_max (all bound levels for Lennard-Jones when n_max is
/// nullopt) from an automatic scan followed by refinement.
LevelTable quantum_levels(const PotentialSpec& spec, std::optional<std::size_t> n_max, const ScanOptions& scan = {},
                          const RefineOptions& refine = {});

}  // namespace qphase

#endif  // QPHASE_QUANTIZE_HPP
