#ifndef QPHASE_CLI_HPP
#define QPHASE_CLI_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qphase/phase.hpp"
#include "qphase/potential.hpp"
#include "qphase/quantize.hpp"

namespace qphase::cli {

inline constexpr const char* version = "1.0.0";

/// Effective settings of one run. Every field has a documented default and is
/// echoed into the output header, so a run can be repeated from its output.
struct RunConfig {
    std::string command;
    std::string potential = "harmonic";
    std::vector<double> coeffs;  ///< kind-specific parameters; empty selects the kind's defaults
    /// unset: anharmonic_benchmark_mass for the anharmonic preset, 1 otherwise
    std::optional<double> mass;
    double strength = 1.0e4;
    std::optional<double> e;
    std::optional<double> e_min;
    std::optional<double> e_max;
    std::size_t samples = 101;
    std::optional<std::size_t> n_max;
    std::size_t order_cap = 20;
    double decay_budget = 30.0;
    std::optional<double> xb;
    double points_per_wavelength = 480.0;
    double points_per_decay_length = 160.0;
    double qlm_tolerance = 1.0e-12;
    double phase_tolerance = 1.0e-9;
    std::string format = "csv";
    std::optional<std::string> out;
    std::string compare = "none";
    std::size_t workers = 0;
    bool normalize = false;
    std::string scheme = "numerov_fd";
    std::optional<double> box_lo;
    std::optional<double> box_hi;
    std::optional<std::size_t> nodes;
    double oracle_tolerance = 1.0e-8;

    double effective_mass() const;
    PotentialSpec potential_spec() const;
    PhaseOptions phase_options() const;
    void validate() const;

    nlohmann::ordered_json to_json() const;
    /// Unknown keys and wrongly typed values raise Error(InvalidInput).
    static RunConfig from_json(const nlohmann::json& j);
};

/// Column-oriented result; NaN cells are written empty (csv) or null (json).
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> notices;

    std::size_t column(const std::string& name) const;
};

Table cmd_levels(const RunConfig& cfg);
Table cmd_phase(const RunConfig& cfg);
Table cmd_scan(const RunConfig& cfg);
Table cmd_oracle(const RunConfig& cfg);
Table cmd_compare(const RunConfig& cfg);

/// Dispatches on cfg.command.
Table run(const RunConfig& cfg);

/// csv: '#'-prefixed metadata, one header line, rows at 15 significant digits.
std::string render_csv(const Table& t, const RunConfig& cfg);
std::string render_json(const Table& t, const RunConfig& cfg);

/// Full command line entry point. Exit codes: 0 success, 2 invalid
/// configuration, 3 solver failure.
int run_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qphase::cli

#endif  // QPHASE_CLI_HPP
