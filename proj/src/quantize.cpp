#include "qphase/quantize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <sstream>
#include <thread>

// pchip.hpp in Boost 1.74 calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "qphase/oracle.hpp"
#include "qphase/wkb.hpp"

namespace qphase {

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}

}  // namespace

PhaseCurve::PhaseCurve(std::vector<double> energies, std::vector<double> total_phases, std::vector<ScanFailure> failures)
    : energies_(std::move(energies)), phases_(std::move(total_phases)), failures_(std::move(failures)) {
    if (energies_.size() != phases_.size()) throw Error(ErrorKind::InvalidInput, "energies and phases differ in length");
    for (std::size_t i = 1; i < energies_.size(); ++i)
        if (!(energies_[i] > energies_[i - 1])) throw Error(ErrorKind::InvalidInput, "energy grid must increase");
    if (energies_.size() >= 4) {
        auto p = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
            std::vector<double>(energies_), std::vector<double>(phases_));
        interp_ = [p](double E) { return (*p)(E); };
    } else if (energies_.size() >= 2) {
        interp_ = [x = energies_, y = phases_](double E) {
            std::size_t i = std::upper_bound(x.begin(), x.end(), E) - x.begin();
            i = std::clamp<std::size_t>(i, 1, x.size() - 1);
            const double t = (E - x[i - 1]) / (x[i] - x[i - 1]);
            return y[i - 1] + t * (y[i] - y[i - 1]);
        };
    }
}

bool PhaseCurve::strictly_increasing() const {
    for (std::size_t i = 1; i < phases_.size(); ++i)
        if (!(phases_[i] > phases_[i - 1])) return false;
    return true;
}

double PhaseCurve::operator()(double E) const {
    if (!interp_) throw Error(ErrorKind::InvalidInput, "phase curve needs at least two samples");
    if (E < energies_.front() || E > energies_.back())
        throw Error(ErrorKind::InvalidInput, "energy " + fmt(E) + " outside the scanned range");
    return interp_(E);
}

std::optional<std::pair<double, double>> PhaseCurve::bracket(double target) const {
    for (std::size_t i = 1; i < phases_.size(); ++i)
        if (phases_[i - 1] <= target && target < phases_[i]) return std::make_pair(energies_[i - 1], energies_[i]);
    return std::nullopt;
}

std::optional<double> PhaseCurve::invert(double target) const {
    const auto b = bracket(target);
    if (!b) return std::nullopt;
    double lo = b->first, hi = b->second;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (interp_(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::size_t effective_workers(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QPHASE_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        throw Error(ErrorKind::InvalidInput, std::string("QPHASE_WORKERS must be a positive integer, got '") + env + "'");
    }
    return 1;
}

PhaseCurve scan_total_phase(const PotentialSpec& spec, const std::vector<double>& energies, const ScanOptions& options) {
    spec.validate();
    for (std::size_t i = 1; i < energies.size(); ++i)
        if (!(energies[i] > energies[i - 1])) throw Error(ErrorKind::InvalidInput, "energy grid must increase");

    struct Slot {
        bool ok = false;
        double phase = 0.0;
        ScanFailure failure;
    };
    std::vector<Slot> slots(energies.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < energies.size(); i = next++) {
            try {
                slots[i].phase = solve_phase(spec, energies[i], options.phase).total_phase;
                slots[i].ok = true;
            } catch (const Error& e) {
                slots[i].failure = {energies[i], e.kind(), e.what()};
            }
        }
    };
    const std::size_t workers = std::min(effective_workers(options.workers), std::max<std::size_t>(1, energies.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    std::vector<double> es, ps;
    std::vector<ScanFailure> failures;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        if (slots[i].ok) {
            es.push_back(energies[i]);
            ps.push_back(slots[i].phase);
        } else {
            failures.push_back(slots[i].failure);
        }
    }
    return PhaseCurve(std::move(es), std::move(ps), std::move(failures));
}

std::vector<double> auto_energy_grid(const PotentialSpec& spec, std::size_t n_max, std::size_t per_level) {
    spec.validate();
    if (per_level == 0) throw Error(ErrorKind::InvalidInput, "per_level must be positive");
    const bool lj = spec.kind == PotentialKind::LennardJones126;
    if (!spec.confining() && !lj) throw Error(ErrorKind::InvalidInput, "no automatic energy grid for this potential");

    const double v_min = spec.minimum_value();
    // anchors: a point below the ground level, then WKB levels
    const WkbLevels w = wkb_levels(spec, lj ? std::min<std::size_t>(n_max, 100000) + 2 : n_max + 2);
    std::vector<double> anchors{v_min + 0.3 * (w.energies.front() - v_min)};
    anchors.insert(anchors.end(), w.energies.begin(), w.energies.end());

    std::vector<double> grid;
    for (std::size_t k = 0; k + 1 < anchors.size(); ++k)
        for (std::size_t j = 0; j < per_level; ++j)
            grid.push_back(anchors[k] + (anchors[k + 1] - anchors[k]) * static_cast<double>(j) / per_level);
    grid.push_back(anchors.back());

    if (lj && !w.complete()) {
        // the WKB list stopped at the threshold: drop the last few anchors
        // and sample the top of the well geometrically
        const double depth = spec.threshold() - v_min;
        const double start = grid.size() > 2 * per_level ? grid[grid.size() - 2 * per_level] : grid.back();
        while (!grid.empty() && grid.back() > start) grid.pop_back();
        const int steps = 9 * static_cast<int>(per_level);
        for (int k = 0; k <= steps; ++k) {
            const double E = spec.threshold() - depth * std::pow(10.0, -static_cast<double>(k) / per_level);
            if (E > grid.back()) grid.push_back(E);
        }
    }
    return grid;
}

LevelRow refine_level(const PotentialSpec& spec, std::size_t n, double guess, double slope, double lo, double hi,
                      const RefineOptions& options) {
    const double target = (static_cast<double>(n) + 1.0) * pi;
    PhaseOptions popt = options.phase;
    std::optional<Grid> frozen;

    auto evaluate = [&](double E) {
        if (frozen) {
            const Grid g = regrid_energy(*frozen, spec, E);
            PhaseOptions o = popt;
            o.grid = &g;
            return solve_phase(spec, E, o);
        }
        return solve_phase(spec, E, popt);
    };

    double E = guess;
    PhaseSolution sol = evaluate(E);
    double f = sol.total_phase - target;
    if (!(slope > 0.0)) slope = pi / std::max(hi - lo, 1.0e-300);

    for (std::size_t step = 0; step < options.max_steps; ++step) {
        if (f < 0.0)
            lo = std::max(lo, E);
        else
            hi = std::min(hi, E);
        if (!frozen && std::abs(f) < options.freeze_below) {
            frozen = sol.grid;
            popt.fixed_order = sol.truncation_order;
            sol = evaluate(E);
            f = sol.total_phase - target;
        }
        if (frozen && std::abs(f) < options.phase_tolerance) {
            LevelRow row;
            row.n = n;
            row.E_quantum = E;
            row.residual = f;
            row.iterations = sol.iterations;
            return row;
        }
        double E_new = E - f / slope;
        if (!(E_new > lo && E_new < hi)) E_new = 0.5 * (lo + hi);
        if (E_new == E) break;
        PhaseSolution s_new = evaluate(E_new);
        const double f_new = s_new.total_phase - target;
        const double sl = (f_new - f) / (E_new - E);
        if (sl > 0.0 && std::isfinite(sl)) slope = sl;
        E = E_new;
        f = f_new;
        sol = std::move(s_new);
    }
    throw Error(ErrorKind::Unconverged, "level " + std::to_string(n) + " not refined: closest E=" + fmt(E) +
                                            " with phase residual " + fmt(f));
}

LevelTable solve_levels(const PhaseCurve& curve, const PotentialSpec& spec, bool refine, const RefineOptions& options) {
    if (curve.size() < 2) throw Error(ErrorKind::InvalidInput, "phase curve needs at least two samples");
    const auto& ph = curve.total_phases();
    LevelTable table;
    if (!curve.strictly_increasing()) table.notices.push_back("phase curve is not strictly increasing");
    const double first = ph.front() / pi - 1.0;
    const std::size_t n_lo = first < 0.0 ? 0 : static_cast<std::size_t>(std::ceil(first));
    if (n_lo > 0) table.notices.push_back("scan starts above level 0; first level found is " + std::to_string(n_lo));

    for (std::size_t n = n_lo;; ++n) {
        const double target = (static_cast<double>(n) + 1.0) * pi;
        if (target >= ph.back()) break;
        const auto br = curve.bracket(target);
        const auto guess = curve.invert(target);
        if (!br || !guess) {
            table.notices.push_back("level " + std::to_string(n) + " not bracketed by the scan; skipped");
            continue;
        }
        if (refine) {
            const double slope = (curve(br->second) - curve(br->first)) / (br->second - br->first);
            table.rows.push_back(refine_level(spec, n, *guess, slope, br->first, br->second, options));
        } else {
            const PhaseSolution s = solve_phase(spec, *guess, options.phase);
            LevelRow row;
            row.n = n;
            row.E_quantum = *guess;
            row.residual = s.total_phase - target;
            row.iterations = s.iterations;
            table.rows.push_back(row);
        }
    }
    return table;
}

std::size_t count_bound_states(const PotentialSpec& spec, const PhaseOptions& options) {
    spec.validate();
    if (spec.confining()) throw Error(ErrorKind::InvalidInput, "confining potential has no bound-state count");
    if (spec.kind != PotentialKind::LennardJones126)
        throw Error(ErrorKind::InvalidInput, std::string("no threshold for ") + to_string(spec.kind));
    const double depth = spec.threshold() - spec.minimum_value();
    std::string last;
    double closest = spec.threshold();
    for (double delta : {1.0e-10, 1.0e-9, 1.0e-8, 1.0e-7}) {
        const double E = spec.threshold() - delta * depth;
        try {
            const PhaseSolution s = solve_phase(spec, E, options);
            return static_cast<std::size_t>(std::floor(s.total_phase / pi));
        } catch (const Error& e) {
            last = e.what();
            closest = E;
        }
    }
    throw Error(ErrorKind::Unconverged,
                "near-threshold phase solve failed; closest energy tried " + fmt(closest) + ": " + last);
}

LevelTable quantum_levels(const PotentialSpec& spec, std::optional<std::size_t> n_max, const ScanOptions& scan,
                          const RefineOptions& refine) {
    const bool lj = spec.kind == PotentialKind::LennardJones126;
    if (!n_max && !lj) throw Error(ErrorKind::InvalidInput, "n_max is required for confining potentials");
    const std::size_t want = n_max ? *n_max : std::numeric_limits<std::size_t>::max() - 2;
    const std::vector<double> energies = auto_energy_grid(spec, want, scan.per_level);
    const PhaseCurve curve = scan_total_phase(spec, energies, scan);
    LevelTable table = solve_levels(curve, spec, true, refine);
    for (const auto& f : curve.failures())
        table.notices.push_back("scan failure at E=" + fmt(f.energy) + ": " + f.message);
    if (n_max) {
        std::erase_if(table.rows, [&](const LevelRow& r) { return r.n > *n_max; });
        if (table.rows.size() != *n_max + 1 && !lj)
            throw Error(ErrorKind::Unconverged, "found " + std::to_string(table.rows.size()) + " of " +
                                                    std::to_string(*n_max + 1) + " requested levels");
    }
    if (!table.rows.empty() && table.rows.front().n != 0)
        throw Error(ErrorKind::Unconverged, "scan missed the ground level");
    return table;
}

void fill_comparison_errors(LevelTable& table) {
    const std::size_t count = table.rows.size();
    for (std::size_t k = 0; k < count; ++k) {
        LevelRow& r = table.rows[k];
        if (!r.E_oracle) continue;
        const double ref = *r.E_oracle;
        // local spacing from the oracle column where possible
        double spacing = 0.0;
        if (k + 1 < count && table.rows[k + 1].E_oracle)
            spacing = *table.rows[k + 1].E_oracle - ref;
        else if (k > 0 && table.rows[k - 1].E_oracle)
            spacing = ref - *table.rows[k - 1].E_oracle;
        const double dq = std::abs(r.E_quantum - ref);
        r.rel_err_quantum = dq / std::abs(ref);
        if (spacing > 0.0) r.spacing_err_quantum = dq / spacing;
        if (r.E_wkb) {
            const double dw = std::abs(*r.E_wkb - ref);
            r.rel_err_wkb = dw / std::abs(ref);
            if (spacing > 0.0) r.spacing_err_wkb = dw / spacing;
        }
    }
}

LevelTable compare_methods(const PotentialSpec& spec, std::size_t n_max, const CompareOptions& options) {
    LevelTable table = quantum_levels(spec, n_max, options.scan, options.refine);
    const std::size_t count = table.rows.size();
    if (count == 0) return table;

    if (options.wkb) {
        const WkbLevels w = wkb_levels(spec, count - 1);
        for (std::size_t k = 0; k < count && k < w.energies.size(); ++k) table.rows[k].E_wkb = w.energies[k];
    }
    if (options.oracle) {
        const OracleConfig cfg = default_oracle_config(spec, count - 1);
        const std::vector<OracleLevel> o = oracle_levels(spec, cfg, count - 1);
        for (std::size_t k = 0; k < count && k < o.size(); ++k) {
            table.rows[k].E_oracle = o[k].energy;
            table.rows[k].oracle_uncertainty = o[k].uncertainty;
        }
        if (o.size() < count) table.notices.push_back("oracle returned fewer levels than the phase solver");
    }

    fill_comparison_errors(table);
    return table;
}

}  // namespace qphase
