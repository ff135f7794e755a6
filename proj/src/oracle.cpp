#include "qphase/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qphase/error.hpp"
#include "qphase/wkb.hpp"

namespace qphase {

const char* to_string(OracleScheme scheme) {
    return scheme == OracleScheme::NumerovFd ? "numerov_fd" : "second_order_fd";
}

void OracleConfig::validate() const {
    if (!(x_min < x_max)) throw Error(ErrorKind::InvalidInput, "oracle box needs x_min < x_max");
    if (node_count < 1000) throw Error(ErrorKind::InvalidInput, "oracle needs at least 1000 nodes");
    if (!(tolerance > 0.0)) throw Error(ErrorKind::InvalidInput, "oracle tolerance must be positive");
}

namespace {

class Discretization {
public:
    Discretization(const PotentialSpec& spec, double x_min, double x_max, std::size_t interior, OracleScheme scheme)
        : kappa_(spec.momentum_scale()), scheme_(scheme), x_min_(x_min) {
        h_ = (x_max - x_min) / static_cast<double>(interior + 1);
        v_.resize(interior);
        for (std::size_t i = 0; i < interior; ++i) v_[i] = evaluate_v(spec, x(i));
        v_min_ = *std::min_element(v_.begin(), v_.end());
        v_max_ = *std::max_element(v_.begin(), v_.end());
        if (scheme_ == OracleScheme::NumerovFd && h_ * h_ * kappa_ * (v_max_ - v_min_) >= 12.0)
            throw Error(ErrorKind::InvalidInput, "Numerov step too coarse for the wall height in the oracle box");
    }

    double x(std::size_t i) const { return x_min_ + static_cast<double>(i + 1) * h_; }
    std::size_t size() const { return v_.size(); }
    double v_min() const { return v_min_; }
    double h() const { return h_; }

    double diag(std::size_t i, double E) const {
        const double z = h_ * h_ * kappa_ * (E - v_[i]);
        if (scheme_ == OracleScheme::SecondOrderFd) return 2.0 - z;
        return 2.0 * (1.0 - 5.0 * z / 12.0) / (1.0 + z / 12.0);
    }

    /// (1 + z_i / 12) maps the Numerov unknown back to psi
    double numerov_weight(std::size_t i, double E) const {
        if (scheme_ == OracleScheme::SecondOrderFd) return 1.0;
        return 1.0 + h_ * h_ * kappa_ * (E - v_[i]) / 12.0;
    }

    /// 2 - diag(i, E), formed without the cancellation against 2
    double shift(std::size_t i, double E) const {
        const double z = h_ * h_ * kappa_ * (E - v_[i]);
        return scheme_ == OracleScheme::SecondOrderFd ? z : z / (1.0 + z / 12.0);
    }

    /// Negative pivots of K(E). The pivots d_i = 1 + e_i are carried through
    /// e_i = e_{i-1} / (1 + e_{i-1}) - shift_i, whose rounding error scales
    /// with |e| = O(h p) instead of with the O(1) diagonal.
    std::size_t count_below(double E) const {
        std::size_t neg = 0;
        double e = 0.0;
        constexpr double tiny = 1.0e-300;
        for (std::size_t i = 0; i < v_.size(); ++i) {
            e = (i == 0 ? 1.0 : e / (1.0 + e)) - shift(i, E);
            if (1.0 + e == 0.0) e = -1.0 - tiny;
            if (1.0 + e < 0.0) ++neg;
        }
        return neg;
    }

    /// Lowest `want` levels; fewer when `ceiling` caps the search.
    std::vector<double> levels(std::size_t want, double ceiling) const {
        double lo = v_min_;
        double hi;
        if (std::isfinite(ceiling)) {
            hi = ceiling;
            want = std::min(want, count_below(hi));
        } else {
            double span = 1.0;
            while (count_below(lo + span) < want) {
                span *= 2.0;
                if (span > 1.0e15) throw Error(ErrorKind::Unconverged, "oracle could not bracket the requested levels");
            }
            hi = lo + span;
        }
        std::vector<double> lower(want, lo), upper(want, hi);
        for (std::size_t k = 0; k < want; ++k) {
            for (int it = 0; it < 400; ++it) {
                const double a = lower[k], b = upper[k];
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                if (b - a <= 1.0e-16 * std::max(std::abs(a), std::abs(b))) break;
                const std::size_t c = count_below(mid);
                for (std::size_t j = k; j < want; ++j) {
                    if (c >= j + 1)
                        upper[j] = std::min(upper[j], mid);
                    else
                        lower[j] = std::max(lower[j], mid);
                }
            }
        }
        std::vector<double> out(want);
        for (std::size_t k = 0; k < want; ++k) out[k] = 0.5 * (lower[k] + upper[k]);
        return out;
    }

    /// Null vector of K(E) by inverse iteration, converted to psi.
    std::vector<double> eigenvector(double E) const {
        const std::size_t n = v_.size();
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = diag(i, E);
        std::vector<double> b(n, 1.0);
        for (int it = 0; it < 4; ++it) {
            b = solve(d, b);
            double norm = 0.0;
            for (double v : b) norm = std::max(norm, std::abs(v));
            for (double& v : b) v /= norm;
        }
        for (std::size_t i = 0; i < n; ++i) b[i] /= numerov_weight(i, E);
        return b;
    }

private:
    // tridiag(-1, d, -1) y = r with partial pivoting
    static std::vector<double> solve(const std::vector<double>& d, const std::vector<double>& r) {
        const std::size_t n = d.size();
        // rows hold (diag, super, super2) after elimination
        std::vector<double> a(n), c(n, 0.0), e(n, 0.0), y(r);
        std::vector<double> sub(n, -1.0);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = d[i];
            c[i] = i + 1 < n ? -1.0 : 0.0;
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            // candidate pivot rows i (a[i]) and i+1 (sub = -1)
            if (std::abs(a[i]) >= 1.0) {
                const double f = sub[i + 1] / a[i];
                a[i + 1] -= f * c[i];
                c[i + 1] -= f * e[i];
                y[i + 1] -= f * y[i];
            } else {
                // swap rows i and i+1
                const double ai = a[i], ci = c[i], ei = e[i], yi = y[i];
                a[i] = sub[i + 1];
                c[i] = a[i + 1];
                e[i] = c[i + 1];
                y[i] = y[i + 1];
                const double f = ai / a[i];
                a[i + 1] = ci - f * c[i];
                c[i + 1] = ei - f * e[i];
                y[i + 1] = yi - f * y[i];
            }
        }
        if (a[n - 1] == 0.0) a[n - 1] = 1.0e-300;
        std::vector<double> x(n);
        for (std::size_t k = n; k-- > 0;) {
            double s = y[k];
            if (k + 1 < n) s -= c[k] * x[k + 1];
            if (k + 2 < n) s -= e[k] * x[k + 2];
            const double piv = a[k] == 0.0 ? 1.0e-300 : a[k];
            x[k] = s / piv;
        }
        return x;
    }

    double kappa_;
    OracleScheme scheme_;
    double x_min_;
    double h_ = 0.0;
    std::vector<double> v_;
    double v_min_ = 0.0, v_max_ = 0.0;
};

double ceiling_for(const PotentialSpec& spec) {
    return spec.confining() ? std::numeric_limits<double>::infinity() : spec.threshold();
}

int scheme_order(OracleScheme s) { return s == OracleScheme::NumerovFd ? 4 : 2; }

}  // namespace

std::vector<double> oracle_grid_levels(const PotentialSpec& spec, const OracleConfig& cfg, std::size_t count) {
    spec.validate();
    cfg.validate();
    const Discretization d(spec, cfg.x_min, cfg.x_max, cfg.node_count, cfg.scheme);
    return d.levels(count, ceiling_for(spec));
}

std::size_t oracle_count_below(const PotentialSpec& spec, const OracleConfig& cfg, double E) {
    spec.validate();
    cfg.validate();
    const Discretization d(spec, cfg.x_min, cfg.x_max, cfg.node_count, cfg.scheme);
    return d.count_below(E);
}

std::vector<OracleLevel> oracle_levels(const PotentialSpec& spec, const OracleConfig& cfg, std::size_t n_max) {
    spec.validate();
    cfg.validate();
    const double ceiling = ceiling_for(spec);
    const Discretization coarse(spec, cfg.x_min, cfg.x_max, cfg.node_count, cfg.scheme);
    const Discretization fine(spec, cfg.x_min, cfg.x_max, 2 * cfg.node_count + 1, cfg.scheme);
    const std::vector<double> ec = coarse.levels(n_max + 1, ceiling);
    const std::vector<double> ef = fine.levels(n_max + 1, ceiling);
    const std::size_t n = std::min(ec.size(), ef.size());
    const double factor = std::pow(2.0, scheme_order(cfg.scheme)) - 1.0;

    std::vector<OracleLevel> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        OracleLevel& l = out[k];
        l.coarse = ec[k];
        l.fine = ef[k];
        l.energy = ef[k] + (ef[k] - ec[k]) / factor;
        l.uncertainty = std::abs(l.energy - l.fine);
        if (l.uncertainty > cfg.tolerance * std::max(1.0, std::abs(l.energy))) {
            std::ostringstream os;
            os.precision(15);
            os << "level " << k << " not converged: h gives " << ec[k] << ", h/2 gives " << ef[k]
               << " (extrapolation shift " << l.uncertainty << ")";
            throw Error(ErrorKind::Unconverged, os.str());
        }
    }
    return out;
}

OracleEigenfunction oracle_eigenfunction(const PotentialSpec& spec, const OracleConfig& cfg, std::size_t n) {
    spec.validate();
    cfg.validate();
    const Discretization d(spec, cfg.x_min, cfg.x_max, cfg.node_count, cfg.scheme);
    const std::vector<double> levels = d.levels(n + 1, ceiling_for(spec));
    if (levels.size() <= n) throw Error(ErrorKind::InvalidInput, "requested level is not bound in the oracle box");

    OracleEigenfunction f;
    f.energy = levels[n];
    f.psi = d.eigenvector(f.energy);
    f.x.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) f.x[i] = d.x(i);

    double norm = 0.0;
    for (double v : f.psi) norm += v * v;
    norm = std::sqrt(norm * d.h());
    double peak = 0.0;
    for (double v : f.psi) peak = std::max(peak, std::abs(v));
    // first local maximum of |psi| that is not tail noise
    double sign = 1.0;
    for (std::size_t i = 1; i + 1 < f.psi.size(); ++i) {
        const double a = std::abs(f.psi[i]);
        if (a > 1.0e-3 * peak && a >= std::abs(f.psi[i - 1]) && a >= std::abs(f.psi[i + 1])) {
            sign = f.psi[i] > 0.0 ? 1.0 : -1.0;
            break;
        }
    }
    for (double& v : f.psi) v *= sign / norm;
    return f;
}

namespace {

// Distance from the turning point t (moving in direction dir) at which
// integral |p| reaches budget.
double decay_edge(const PotentialSpec& spec, double E, double t, int dir, double budget) {
    double x = t, acc = 0.0;
    double p_prev = 0.0;
    while (acc < budget) {
        const double p = std::sqrt(std::max(0.0, -local_momentum_sq(spec, E, x)));
        double h = std::min(0.02 / std::max(p, 1.0e-3), 0.25);
        if (dir < 0 && spec.kind == PotentialKind::LennardJones126) h = std::min(h, 0.25 * x);
        const double xn = x + dir * h;
        const double pn = std::sqrt(std::max(0.0, -local_momentum_sq(spec, E, xn)));
        acc += 0.5 * (p_prev + pn) * h;
        p_prev = pn;
        x = xn;
        if (std::abs(x - t) > 1.0e7) throw Error(ErrorKind::Unconverged, "decay edge not found");
    }
    return x;
}

}  // namespace

OracleConfig default_oracle_config(const PotentialSpec& spec, std::size_t n_max, OracleScheme scheme,
                                   double decay_budget, double step_factor) {
    spec.validate();
    if (step_factor <= 0.0) step_factor = scheme == OracleScheme::NumerovFd ? 0.05 : 0.0005;
    OracleConfig cfg;
    cfg.scheme = scheme;

    if (spec.confining()) {
        const WkbLevels w = wkb_levels(spec, n_max + 1);
        const double e_max = w.energies.back() + 0.25 * (w.energies.back() - spec.minimum_value());
        const TurningPair tp = find_turning_points(spec, e_max);
        cfg.x_min = decay_edge(spec, e_max, tp.t1, -1, decay_budget);
        cfg.x_max = decay_edge(spec, e_max, tp.t2, +1, decay_budget);
        const double p_max = std::sqrt(spec.momentum_scale() * (e_max - spec.minimum_value()));
        const double h = step_factor / p_max;
        cfg.node_count = std::max<std::size_t>(1000, static_cast<std::size_t>((cfg.x_max - cfg.x_min) / h));
        return cfg;
    }
    if (spec.kind != PotentialKind::LennardJones126)
        throw Error(ErrorKind::InvalidInput, "no default oracle box for this potential");

    // Lennard-Jones: wall side from the threshold turning point, far side
    // grown until the top level fits.
    const double p_max = std::sqrt(spec.momentum_scale() * (spec.threshold() - spec.minimum_value()));
    const double h = step_factor / p_max;
    const double t_inner = std::pow(0.5, 1.0 / 6.0);  // V = 0
    cfg.x_min = decay_edge(spec, 0.0, t_inner, -1, decay_budget);
    cfg.x_max = 40.0;
    for (int pass = 0; pass < 6; ++pass) {
        cfg.node_count = static_cast<std::size_t>((cfg.x_max - cfg.x_min) / h);
        const std::vector<double> lv = oracle_grid_levels(spec, cfg, n_max + 1);
        if (lv.empty()) return cfg;
        const double top = std::min(lv.back(), -1.0e-14);
        const TurningPair tp = find_turning_points(spec, top);
        const double need = decay_edge(spec, top, tp.t2, +1, decay_budget);
        if (need <= cfg.x_max) return cfg;
        cfg.x_max = std::max(need, 1.25 * cfg.x_max);
    }
    return cfg;
}

}  // namespace qphase
