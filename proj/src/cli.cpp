#include "qphase/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "qphase/error.hpp"
#include "qphase/oracle.hpp"
#include "qphase/wkb.hpp"

namespace qphase::cli {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double pi = std::numbers::pi;

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

double opt(const std::optional<double>& v) { return v ? *v : nan; }

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        "command",       "potential",      "coeffs",          "mass",     "strength",  "e",
        "e_min",         "e_max",          "samples",         "n_max",    "order_cap", "decay_budget",
        "xb",            "points_per_wavelength", "points_per_decay_length", "qlm_tolerance",
        "phase_tolerance", "format",       "out",             "compare",  "workers",   "normalize",
        "scheme",        "box_lo",         "box_hi",          "nodes",    "oracle_tolerance"};
    return keys;
}

OracleScheme scheme_from(const std::string& s) {
    if (s == "numerov_fd") return OracleScheme::NumerovFd;
    if (s == "second_order_fd") return OracleScheme::SecondOrderFd;
    throw Error(ErrorKind::InvalidInput, "unknown oracle scheme '" + s + "'");
}

RefineOptions refine_options(const RunConfig& cfg) {
    RefineOptions r;
    r.phase = cfg.phase_options();
    r.phase.x_b.reset();  // x_b is chosen per energy during refinement
    r.phase_tolerance = cfg.phase_tolerance;
    return r;
}

ScanOptions scan_options(const RunConfig& cfg) {
    ScanOptions s;
    s.phase = cfg.phase_options();
    s.workers = cfg.workers;
    return s;
}

OracleConfig oracle_config(const RunConfig& cfg, const PotentialSpec& spec, std::size_t n_max) {
    const OracleScheme scheme = scheme_from(cfg.scheme);
    OracleConfig oc;
    if (cfg.box_lo && cfg.box_hi) {
        oc.x_min = *cfg.box_lo;
        oc.x_max = *cfg.box_hi;
        oc.scheme = scheme;
        oc.node_count = cfg.nodes ? *cfg.nodes : 20000;
    } else {
        oc = default_oracle_config(spec, n_max, scheme);
        if (cfg.nodes) oc.node_count = *cfg.nodes;
    }
    oc.tolerance = cfg.oracle_tolerance;
    return oc;
}

void add_common_meta(Table& t, const RunConfig& cfg, const PotentialSpec& spec) {
    t.meta.emplace_back("potential", spec.describe());
    t.meta.emplace_back("momentum", spec.kind == PotentialKind::LennardJones126 ? "p^2 = B (E - V)" : "p^2 = 2 m (E - V)");
    t.meta.emplace_back("qlm_tolerance", num(cfg.qlm_tolerance));
    t.meta.emplace_back("phase_tolerance", num(cfg.phase_tolerance));
}

Table level_table(const RunConfig& cfg, bool with_wkb, bool with_oracle) {
    const PotentialSpec spec = cfg.potential_spec();
    std::optional<std::size_t> n_max = cfg.n_max;
    if (!n_max && spec.confining()) n_max = 9;
    CompareOptions co;
    co.scan = scan_options(cfg);
    co.refine = refine_options(cfg);
    LevelTable lt = quantum_levels(spec, n_max, co.scan, co.refine);

    const std::size_t count = lt.rows.size();
    if (count > 0 && with_wkb) {
        const WkbLevels w = wkb_levels(spec, count - 1);
        for (std::size_t k = 0; k < count && k < w.energies.size(); ++k) lt.rows[k].E_wkb = w.energies[k];
    }
    Table t;
    if (count > 0 && with_oracle) {
        const OracleConfig oc = oracle_config(cfg, spec, count - 1);
        const std::vector<OracleLevel> o = oracle_levels(spec, oc, count - 1);
        for (std::size_t k = 0; k < count && k < o.size(); ++k) {
            lt.rows[k].E_oracle = o[k].energy;
            lt.rows[k].oracle_uncertainty = o[k].uncertainty;
        }
        t.meta.emplace_back("oracle", std::string(to_string(oc.scheme)) + " on [" + num(oc.x_min) + ", " +
                                          num(oc.x_max) + "] with " + std::to_string(oc.node_count) + " nodes");
    }
    fill_comparison_errors(lt);

    t.columns = {"n", "E_quantum", "residual", "iterations"};
    if (with_wkb) t.columns.insert(t.columns.end(), {"E_wkb", "rel_err_wkb", "spacing_err_wkb"});
    if (with_oracle)
        t.columns.insert(t.columns.end(),
                         {"E_oracle", "oracle_uncertainty", "rel_err_quantum", "spacing_err_quantum"});
    for (const LevelRow& r : lt.rows) {
        std::vector<double> row{static_cast<double>(r.n), r.E_quantum, r.residual, static_cast<double>(r.iterations)};
        if (with_wkb) row.insert(row.end(), {opt(r.E_wkb), opt(r.rel_err_wkb), opt(r.spacing_err_wkb)});
        if (with_oracle)
            row.insert(row.end(),
                       {opt(r.E_oracle), opt(r.oracle_uncertainty), opt(r.rel_err_quantum), opt(r.spacing_err_quantum)});
        t.rows.push_back(std::move(row));
    }
    t.notices = lt.notices;
    add_common_meta(t, cfg, spec);
    t.meta.emplace_back("rows", std::to_string(count));
    return t;
}

template <class T>
T get_as(const nlohmann::json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidInput, "config key '" + key + "': " + e.what());
    }
}

}  // namespace

double RunConfig::effective_mass() const {
    if (mass) return *mass;
    return potential_kind_from_string(potential) == PotentialKind::QuarticAnharmonic ? anharmonic_benchmark_mass : 1.0;
}

PotentialSpec RunConfig::potential_spec() const {
    const PotentialKind kind = potential_kind_from_string(potential);
    const double mass = effective_mass();
    auto need = [&](std::size_t n) {
        if (coeffs.size() != n)
            throw Error(ErrorKind::InvalidInput, "potential '" + potential + "' takes " + std::to_string(n) +
                                                     " coefficients, got " + std::to_string(coeffs.size()));
    };
    PotentialSpec s;
    switch (kind) {
        case PotentialKind::Harmonic:
            if (!coeffs.empty()) need(1);
            s = PotentialSpec::harmonic(coeffs.empty() ? 1.0 : coeffs[0], mass);
            break;
        case PotentialKind::QuarticAnharmonic:
            if (!coeffs.empty()) need(2);
            s = coeffs.empty() ? PotentialSpec::quartic_anharmonic(1.0, 2.0, mass)
                               : PotentialSpec::quartic_anharmonic(coeffs[0], coeffs[1], mass);
            break;
        case PotentialKind::LennardJones126:
            need(0);
            s = PotentialSpec::lennard_jones(strength);
            break;
        case PotentialKind::Constant:
            if (!coeffs.empty()) need(1);
            s = PotentialSpec::constant(coeffs.empty() ? 0.0 : coeffs[0], mass);
            break;
        case PotentialKind::Polynomial:
            s = PotentialSpec::polynomial(coeffs, mass);
            break;
    }
    s.validate();
    return s;
}

PhaseOptions RunConfig::phase_options() const {
    PhaseOptions o;
    o.x_b = xb;
    o.order_cap = order_cap;
    o.tolerance = qlm_tolerance;
    o.policy.decay_budget = decay_budget;
    o.policy.points_per_wavelength = points_per_wavelength;
    o.policy.points_per_decay_length = points_per_decay_length;
    if (box_lo && box_hi) o.policy.box = std::make_pair(*box_lo, *box_hi);
    return o;
}

void RunConfig::validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorKind::InvalidInput, m); };
    static const std::vector<std::string> commands{"levels", "phase", "scan", "oracle", "compare"};
    if (std::find(commands.begin(), commands.end(), command) == commands.end()) bad("unknown command '" + command + "'");
    if (format != "csv" && format != "json") bad("format must be csv or json");
    if (compare != "none" && compare != "wkb" && compare != "oracle" && compare != "all")
        bad("compare must be wkb, oracle or all");
    if (mass && !(*mass > 0.0)) bad("mass must be positive");
    if (!(strength > 0.0)) bad("strength must be positive");
    if (order_cap < 2) bad("order_cap must be at least 2");
    if (!(decay_budget > 0.0)) bad("decay_budget must be positive");
    if (!(qlm_tolerance > 0.0) || !(phase_tolerance > 0.0) || !(oracle_tolerance > 0.0)) bad("tolerances must be positive");
    if (box_lo.has_value() != box_hi.has_value()) bad("box_lo and box_hi go together");
    if (box_lo && !(*box_lo < *box_hi)) bad("box_lo must be below box_hi");
    scheme_from(scheme);
    if (command == "phase" && !e) bad("phase needs --e");
    if (command == "scan") {
        if (e_min.has_value() != e_max.has_value()) bad("scan needs both --e-min and --e-max");
        if (e_min && !(*e_min < *e_max)) bad("e_min must be below e_max");
        if (e_min && samples < 2) bad("samples must be at least 2");
    }
    potential_spec();
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j;
    auto put = [&](const char* k, const auto& v) {
        if constexpr (requires { v.has_value(); }) {
            if (v)
                j[k] = *v;
            else
                j[k] = nullptr;
        } else {
            j[k] = v;
        }
    };
    put("command", command);
    put("potential", potential);
    put("coeffs", coeffs);
    put("mass", effective_mass());
    put("strength", strength);
    put("e", e);
    put("e_min", e_min);
    put("e_max", e_max);
    put("samples", samples);
    put("n_max", n_max);
    put("order_cap", order_cap);
    put("decay_budget", decay_budget);
    put("xb", xb);
    put("points_per_wavelength", points_per_wavelength);
    put("points_per_decay_length", points_per_decay_length);
    put("qlm_tolerance", qlm_tolerance);
    put("phase_tolerance", phase_tolerance);
    put("format", format);
    put("out", out);
    put("compare", compare);
    put("workers", workers);
    put("normalize", normalize);
    put("scheme", scheme);
    put("box_lo", box_lo);
    put("box_hi", box_hi);
    put("nodes", nodes);
    put("oracle_tolerance", oracle_tolerance);
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorKind::InvalidInput, "config must be a JSON object");
    const auto& keys = known_keys();
    for (const auto& [k, v] : j.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw Error(ErrorKind::InvalidInput, "unknown config key '" + k + "'");

    RunConfig c;
    auto set = [&](const char* k, auto& field) {
        if (!j.contains(k)) return;
        using F = std::decay_t<decltype(field)>;
        if constexpr (requires { typename F::value_type; field.has_value(); }) {
            if (j.at(k).is_null())
                field.reset();
            else
                field = get_as<typename F::value_type>(j, k);
        } else {
            field = get_as<F>(j, k);
        }
    };
    set("command", c.command);
    set("potential", c.potential);
    set("coeffs", c.coeffs);
    set("mass", c.mass);
    set("strength", c.strength);
    set("e", c.e);
    set("e_min", c.e_min);
    set("e_max", c.e_max);
    set("samples", c.samples);
    set("n_max", c.n_max);
    set("order_cap", c.order_cap);
    set("decay_budget", c.decay_budget);
    set("xb", c.xb);
    set("points_per_wavelength", c.points_per_wavelength);
    set("points_per_decay_length", c.points_per_decay_length);
    set("qlm_tolerance", c.qlm_tolerance);
    set("phase_tolerance", c.phase_tolerance);
    set("format", c.format);
    set("out", c.out);
    set("compare", c.compare);
    set("workers", c.workers);
    set("normalize", c.normalize);
    set("scheme", c.scheme);
    set("box_lo", c.box_lo);
    set("box_hi", c.box_hi);
    set("nodes", c.nodes);
    set("oracle_tolerance", c.oracle_tolerance);
    return c;
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw Error(ErrorKind::InvalidInput, "no column '" + name + "'");
}

Table cmd_levels(const RunConfig& cfg) {
    const bool wkb = cfg.compare == "wkb" || cfg.compare == "all";
    const bool oracle = cfg.compare == "oracle" || cfg.compare == "all";
    return level_table(cfg, wkb, oracle);
}

Table cmd_compare(const RunConfig& cfg) {
    const bool wkb = cfg.compare != "oracle";
    const bool oracle = cfg.compare != "wkb";
    return level_table(cfg, wkb, oracle);
}

Table cmd_phase(const RunConfig& cfg) {
    const PotentialSpec spec = cfg.potential_spec();
    const double E = *cfg.e;
    const PhaseSolution sol = solve_phase(spec, E, cfg.phase_options());
    const Wavefunction wf = wavefunction(sol, cfg.normalize);
    const Grid& g = sol.grid;

    std::vector<double> action(g.size(), nan);
    if (g.turning) {
        std::vector<double> inside;
        for (double x : g.nodes)
            if (x >= g.turning->t1 && x <= g.turning->t2) inside.push_back(x);
        const std::vector<double> s = classical_action_profile(spec, E, inside);
        std::size_t k = 0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.nodes[i] >= g.turning->t1 && g.nodes[i] <= g.turning->t2) action[i] = s[k++] + pi / 4.0;
    }

    Table t;
    t.columns = {"x", "sigma", "dsigma", "alpha", "psi", "p2", "S_plus_pi_over_4", "p"};
    if (wf.normalized) t.columns.push_back("psi_normalized");
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double p = std::isnan(action[i]) ? nan : std::sqrt(std::max(0.0, g.p2[i]));
        std::vector<double> row{g.nodes[i], sol.sigma[i], sol.M[i].real(), sol.alpha[i], wf.psi[i],
                                g.p2[i],    action[i],    p};
        if (wf.normalized) row.push_back((*wf.normalized)[i]);
        t.rows.push_back(std::move(row));
    }
    add_common_meta(t, cfg, spec);
    t.meta.emplace_back("energy", num(E));
    t.meta.emplace_back("total_phase", num(sol.total_phase));
    t.meta.emplace_back("total_phase_over_pi", num(sol.total_phase / pi));
    t.meta.emplace_back("tail_phase", num(sol.tail_phase));
    t.meta.emplace_back("x_b", num(g.x_b()));
    t.meta.emplace_back("truncation_order", std::to_string(sol.truncation_order));
    t.meta.emplace_back("iterations", std::to_string(sol.iterations));
    t.meta.emplace_back("final_update_norm", num(sol.final_update_norm));
    t.meta.emplace_back("riccati_residual", num(sol.riccati_residual));
    if (g.turning) {
        t.meta.emplace_back("t1", num(g.turning->t1));
        t.meta.emplace_back("t2", num(g.turning->t2));
    }
    t.meta.emplace_back("offsets", "sigma is zero at the first node; the classical action column is S(x) - S(t1) + pi/4");
    return t;
}

Table cmd_scan(const RunConfig& cfg) {
    const PotentialSpec spec = cfg.potential_spec();
    std::vector<double> energies;
    if (cfg.e_min) {
        for (std::size_t k = 0; k < cfg.samples; ++k)
            energies.push_back(*cfg.e_min + (*cfg.e_max - *cfg.e_min) * static_cast<double>(k) /
                                                static_cast<double>(cfg.samples - 1));
    } else {
        std::size_t n = cfg.n_max ? *cfg.n_max : (spec.confining() ? 9 : std::numeric_limits<std::size_t>::max() - 2);
        energies = auto_energy_grid(spec, n);
    }
    const PhaseCurve curve = scan_total_phase(spec, energies, scan_options(cfg));
    if (curve.size() == 0)
        throw Error(ErrorKind::Unconverged, "every scan energy failed; first: " + curve.failures().front().message);

    Table t;
    t.columns = {"E", "total_phase", "total_phase_over_pi"};
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double s = curve.total_phases()[i];
        t.rows.push_back({curve.energies()[i], s, s / pi});
    }
    for (const auto& f : curve.failures()) t.notices.push_back("failed at E=" + num(f.energy) + ": " + f.message);
    add_common_meta(t, cfg, spec);
    t.meta.emplace_back("samples_ok", std::to_string(curve.size()));
    t.meta.emplace_back("samples_failed", std::to_string(curve.failures().size()));
    t.meta.emplace_back("monotone", curve.strictly_increasing() ? "yes" : "no");
    return t;
}

Table cmd_oracle(const RunConfig& cfg) {
    const PotentialSpec spec = cfg.potential_spec();
    const std::size_t n_max = cfg.n_max ? *cfg.n_max : (spec.kind == PotentialKind::LennardJones126 ? 100 : 9);
    const OracleConfig oc = oracle_config(cfg, spec, n_max);
    const std::vector<OracleLevel> lv = oracle_levels(spec, oc, n_max);
    Table t;
    t.columns = {"n", "E", "uncertainty", "E_coarse", "E_fine"};
    for (std::size_t k = 0; k < lv.size(); ++k)
        t.rows.push_back({static_cast<double>(k), lv[k].energy, lv[k].uncertainty, lv[k].coarse, lv[k].fine});
    t.meta.emplace_back("potential", spec.describe());
    t.meta.emplace_back("oracle_scheme", to_string(oc.scheme));
    t.meta.emplace_back("oracle_box", "[" + num(oc.x_min) + ", " + num(oc.x_max) + "]");
    t.meta.emplace_back("oracle_nodes", std::to_string(oc.node_count));
    t.meta.emplace_back("oracle_tolerance", num(oc.tolerance));
    return t;
}

Table run(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.command == "levels") return cmd_levels(cfg);
    if (cfg.command == "phase") return cmd_phase(cfg);
    if (cfg.command == "scan") return cmd_scan(cfg);
    if (cfg.command == "oracle") return cmd_oracle(cfg);
    return cmd_compare(cfg);
}

std::string render_csv(const Table& t, const RunConfig& cfg) {
    std::ostringstream os;
    os << "# qphase " << version << " " << cfg.command << "\n";
    os << "# config " << cfg.to_json().dump() << "\n";
    for (const auto& [k, v] : t.meta) os << "# " << k << ": " << v << "\n";
    for (const auto& n : t.notices) os << "# notice: " << n << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << num(row[i]);
        os << "\n";
    }
    return os.str();
}

std::string render_json(const Table& t, const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["program"] = "qphase";
    j["version"] = version;
    j["config"] = cfg.to_json();
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.meta) meta[k] = v;
    j["meta"] = meta;
    j["notices"] = t.notices;
    j["columns"] = t.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (std::isnan(row[i]))
                r[t.columns[i]] = nullptr;
            else
                r[t.columns[i]] = std::strtod(num(row[i]).c_str(), nullptr);
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

int run_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum-phase bound-state solver"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_subcommand("levels", "quantized levels from the total phase");
    app.add_subcommand("phase", "per-node phase, amplitude and wavefunction at one energy");
    app.add_subcommand("scan", "total phase over an energy grid");
    app.add_subcommand("oracle", "reference levels from matrix discretization");
    app.add_subcommand("compare", "quantum, WKB and oracle levels side by side");

    std::string config_path, potential, format, out_path, compare, scheme;
    std::vector<double> coeffs;
    double mass{}, strength{}, e{}, e_min{}, e_max{}, decay_budget{}, xb{}, ppw{}, ppd{}, box_lo{}, box_hi{};
    double qlm_tol{}, phase_tol{}, oracle_tol{};
    std::size_t samples{}, n_max{}, order_cap{}, workers{}, nodes{};
    bool normalize = false;

    auto* o_config = app.add_option("--config", config_path, "JSON file with the same keys as the flags");
    auto* o_potential = app.add_option("--potential", potential, "harmonic|anharmonic|lj|constant|poly");
    auto* o_coeffs = app.add_option("--coeffs", coeffs, "potential coefficients")->delimiter(',');
    auto* o_mass = app.add_option("--mass", mass, "mass (default 1; 2 for the anharmonic preset)");
    auto* o_strength = app.add_option("--strength", strength, "Lennard-Jones strength B (default 1e4)");
    auto* o_e = app.add_option("--e", e, "energy for phase");
    auto* o_emin = app.add_option("--e-min", e_min, "scan lower energy");
    auto* o_emax = app.add_option("--e-max", e_max, "scan upper energy");
    auto* o_samples = app.add_option("--samples", samples, "scan samples (default 101)");
    auto* o_nmax = app.add_option("--n-max", n_max, "highest level index");
    auto* o_order = app.add_option("--order-cap", order_cap, "series order cap (default 20)");
    auto* o_decay = app.add_option("--decay-budget", decay_budget, "forbidden-region decay exponent (default 30)");
    auto* o_xb = app.add_option("--xb", xb, "matching point x_b");
    auto* o_ppw = app.add_option("--ppw", ppw, "grid points per wavelength (default 480)");
    auto* o_ppd = app.add_option("--ppd", ppd, "grid points per decay length (default 160)");
    auto* o_qtol = app.add_option("--qlm-tolerance", qlm_tol, "relative QLM update tolerance (default 1e-12)");
    auto* o_ptol = app.add_option("--phase-tolerance", phase_tol, "quantization phase tolerance (default 1e-9)");
    auto* o_format = app.add_option("--format", format, "csv|json");
    auto* o_out = app.add_option("--out", out_path, "output file (default stdout)");
    auto* o_compare = app.add_option("--compare", compare, "wkb|oracle|all");
    auto* o_workers = app.add_option("--workers", workers, "scan worker threads (also QPHASE_WORKERS)");
    auto* o_norm = app.add_flag("--normalize", normalize, "add the normalized eigenfunction column (phase)");
    auto* o_scheme = app.add_option("--scheme", scheme, "oracle scheme numerov_fd|second_order_fd");
    auto* o_boxlo = app.add_option("--box-lo", box_lo, "explicit left wall (constant potential, oracle)");
    auto* o_boxhi = app.add_option("--box-hi", box_hi, "explicit right wall");
    auto* o_nodes = app.add_option("--nodes", nodes, "oracle interior node count");
    auto* o_otol = app.add_option("--oracle-tolerance", oracle_tol, "oracle extrapolation tolerance (default 1e-8)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    RunConfig cfg;
    try {
        if (*o_config) {
            std::ifstream in(config_path);
            if (!in) throw Error(ErrorKind::InvalidInput, "cannot read config file '" + config_path + "'");
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorKind::InvalidInput, std::string("config file is not valid JSON: ") + e.what());
            }
            cfg = RunConfig::from_json(j);
        }
        cfg.command = app.get_subcommands().front()->get_name();
        if (*o_potential) cfg.potential = potential;
        if (*o_coeffs) cfg.coeffs = coeffs;
        if (*o_mass) cfg.mass = mass;
        if (*o_strength) cfg.strength = strength;
        if (*o_e) cfg.e = e;
        if (*o_emin) cfg.e_min = e_min;
        if (*o_emax) cfg.e_max = e_max;
        if (*o_samples) cfg.samples = samples;
        if (*o_nmax) cfg.n_max = n_max;
        if (*o_order) cfg.order_cap = order_cap;
        if (*o_decay) cfg.decay_budget = decay_budget;
        if (*o_xb) cfg.xb = xb;
        if (*o_ppw) cfg.points_per_wavelength = ppw;
        if (*o_ppd) cfg.points_per_decay_length = ppd;
        if (*o_qtol) cfg.qlm_tolerance = qlm_tol;
        if (*o_ptol) cfg.phase_tolerance = phase_tol;
        if (*o_format) cfg.format = format;
        if (*o_out) cfg.out = out_path;
        if (*o_compare) cfg.compare = compare;
        if (*o_workers) cfg.workers = workers;
        if (*o_norm) cfg.normalize = normalize;
        if (*o_scheme) cfg.scheme = scheme;
        if (*o_boxlo) cfg.box_lo = box_lo;
        if (*o_boxhi) cfg.box_hi = box_hi;
        if (*o_nodes) cfg.nodes = nodes;
        if (*o_otol) cfg.oracle_tolerance = oracle_tol;
        cfg.workers = effective_workers(cfg.workers);
        cfg.validate();
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        const Table t = run(cfg);
        const std::string text = cfg.format == "json" ? render_json(t, cfg) : render_csv(t, cfg);
        if (cfg.out) {
            std::ofstream f(*cfg.out, std::ios::binary);
            if (!f) {
                err << "config error: cannot write '" << *cfg.out << "'\n";
                return 2;
            }
            f << text;
        } else {
            out << text;
        }
    } catch (const Error& e) {
        err << "solver failure (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return e.kind() == ErrorKind::InvalidInput ? 2 : 3;
    }
    return 0;
}

}  // namespace qphase::cli
