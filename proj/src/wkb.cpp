#include "qphase/wkb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "qphase/error.hpp"
#include "qphase/series.hpp"

namespace qphase {

namespace {

using boost::math::quadrature::gauss_kronrod;

struct Piece {
    double value;
    double error;
};

// integral of p over [t, t + sign * width] with x = t + sign * u^2
Piece action_piece(const PotentialSpec& spec, double E, double t, double sign, double width) {
    if (width <= 0.0) return {0.0, 0.0};
    auto f = [&](double u) {
        const double p2 = local_momentum_sq(spec, E, t + sign * u * u);
        return p2 > 0.0 ? 2.0 * u * std::sqrt(p2) : 0.0;
    };
    double err = 0.0;
    const double v = gauss_kronrod<double, 61>::integrate(f, 0.0, std::sqrt(width), 20, 1.0e-14, &err);
    return {v, err};
}

// The split point between the two substituted halves: the potential minimum
// when it lies in the classical region, otherwise the midpoint.
double split_point(const PotentialSpec& spec, const TurningPair& tp) {
    const double xm = spec.minimum_location();
    if (xm > tp.t1 && xm < tp.t2) return xm;
    return 0.5 * (tp.t1 + tp.t2);
}

}  // namespace

ActionResult action_integral(const PotentialSpec& spec, double E) {
    ActionResult r;
    r.turning = find_turning_points(spec, E);
    const double m = split_point(spec, r.turning);
    const Piece left = action_piece(spec, E, r.turning.t1, +1.0, m - r.turning.t1);
    const Piece right = action_piece(spec, E, r.turning.t2, -1.0, r.turning.t2 - m);
    r.S_diff = left.value + right.value;
    r.quadrature_error_estimate = left.error + right.error;
    return r;
}

std::vector<double> classical_action_profile(const PotentialSpec& spec, double E, const std::vector<double>& xs) {
    const TurningPair tp = find_turning_points(spec, E);
    const double m = split_point(spec, tp);
    const double left_total = action_piece(spec, E, tp.t1, +1.0, m - tp.t1).value;
    const double right_total = action_piece(spec, E, tp.t2, -1.0, tp.t2 - m).value;

    // Each half is accumulated over consecutive sorted points in the
    // substituted variable u, where the integrand is smooth.
    auto half = [&](double t, double sign, const std::vector<double>& widths) {
        auto f = [&](double u) {
            const double p2 = local_momentum_sq(spec, E, t + sign * u * u);
            return p2 > 0.0 ? 2.0 * u * std::sqrt(p2) : 0.0;
        };
        std::vector<std::size_t> order(widths.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return widths[a] < widths[b]; });
        std::vector<double> out(widths.size());
        double u_prev = 0.0, acc = 0.0;
        for (std::size_t i : order) {
            const double u = std::sqrt(std::max(0.0, widths[i]));
            if (u > u_prev) acc += boost::math::quadrature::gauss<double, 20>::integrate(f, u_prev, u);
            u_prev = std::max(u_prev, u);
            out[i] = acc;
        }
        return out;
    };

    std::vector<double> lw, rw;
    std::vector<std::size_t> li, ri;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = std::clamp(xs[i], tp.t1, tp.t2);
        if (x <= m) {
            lw.push_back(x - tp.t1);
            li.push_back(i);
        } else {
            rw.push_back(tp.t2 - x);
            ri.push_back(i);
        }
    }
    const std::vector<double> ls = half(tp.t1, +1.0, lw);
    const std::vector<double> rs = half(tp.t2, -1.0, rw);
    std::vector<double> out(xs.size());
    for (std::size_t k = 0; k < li.size(); ++k) out[li[k]] = ls[k];
    for (std::size_t k = 0; k < ri.size(); ++k) out[ri[k]] = left_total + right_total - rs[k];
    return out;
}

WkbLevels wkb_levels(const PotentialSpec& spec, std::size_t n_max) {
    spec.validate();
    WkbLevels out;
    out.requested = n_max + 1;
    const double v_min = spec.minimum_value();

    auto action = [&](double E) { return E <= v_min ? 0.0 : action_integral(spec, E).S_diff; };

    double e_top;  // upper limit of the search
    if (spec.confining()) {
        const double target = (static_cast<double>(n_max) + 0.5) * std::numbers::pi;
        double span = 1.0;
        while (action(v_min + span) <= target) {
            span *= 2.0;
            if (span > 1.0e12) throw Error(ErrorKind::Unconverged, "could not bracket WKB level");
        }
        e_top = v_min + span;
    } else if (spec.kind == PotentialKind::LennardJones126) {
        e_top = -1.0e-13;
    } else {
        throw Error(ErrorKind::InvalidInput, std::string("wkb_levels needs a well; got ") + to_string(spec.kind));
    }
    const double s_top = action(e_top);

    double lo = v_min;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const double target = (static_cast<double>(n) + 0.5) * std::numbers::pi;
        if (target >= s_top) break;
        auto f = [&](double E) { return action(E) - target; };
        boost::uintmax_t iters = 200;
        auto tol = boost::math::tools::eps_tolerance<double>(52);
        auto [a, b] = boost::math::tools::toms748_solve(f, lo, e_top, f(lo), s_top - target, tol, iters);
        const double E = std::abs(f(a)) <= std::abs(f(b)) ? a : b;
        out.energies.push_back(E);
        lo = E;
    }
    return out;
}

SeriesReport riccati_series_at(const PotentialSpec& spec, double E, double x_b, std::size_t order_cap) {
    spec.validate();
    if (order_cap < 2) throw Error(ErrorKind::InvalidInput, "order_cap must be at least 2");
    if (!spec.in_domain(x_b)) throw Error(ErrorKind::InvalidInput, "x_b outside the potential domain");
    const double p2 = local_momentum_sq(spec, E, x_b);
    if (!(p2 > 0.0)) {
        std::ostringstream os;
        os << "x_b=" << x_b << " is classically forbidden at E=" << E;
        throw Error(ErrorKind::InvalidInput, os.str());
    }
    if (std::sqrt(p2) < 1.0e-6) throw Error(ErrorKind::TooCloseToTurningPoint, "p(x_b) below 1e-6");

    using C = std::complex<double>;
    const C I(0.0, 1.0);
    const std::size_t depth = order_cap + 2;
    const ComplexSeries P = to_complex(momentum_sq_jet(spec, E, x_b, depth));

    std::vector<ComplexSeries> M;
    M.reserve(order_cap + 2);
    M.push_back(sqrt(P));
    const ComplexSeries two_m0 = M[0] * C(2.0);
    for (std::size_t n = 1; n <= order_cap + 1; ++n) {
        ComplexSeries num = M[n - 1].derivative() * I;
        for (std::size_t k = 1; k < n; ++k) num -= M[k] * M[n - k];
        M.push_back(num / two_m0);
    }

    SeriesReport r;
    r.x_b = x_b;
    r.order_cap = order_cap;
    C acc{};
    for (const auto& m : M) {
        r.terms.push_back(m[0]);
        r.derivatives.push_back(m.size() > 1 ? m[1] : C{});
        acc += m[0];
        r.partial_sums.push_back(acc);
    }
    const Truncation t = optimal_truncation(r);
    r.optimal_order = t.order;
    r.boundary_value = t.boundary_value;
    return r;
}

Truncation optimal_truncation(const SeriesReport& report) {
    const auto& terms = report.terms;
    if (terms.size() < 3) throw Error(ErrorKind::InvalidInput, "optimal_truncation needs at least 3 terms");
    const std::size_t cap = std::min(report.order_cap, terms.size() - 1);
    const double scale = std::abs(terms[0]);
    auto negligible = [&](std::size_t n) { return std::abs(terms[n]) <= 1.0e-13 * scale; };

    std::size_t best = 0;
    double best_mag = std::abs(terms[0]);
    std::size_t prev = 0;
    bool rose = false;
    for (std::size_t n = 1; n <= cap; ++n) {
        if (negligible(n)) continue;
        const double mag = std::abs(terms[n]);
        if (mag > std::abs(terms[prev])) {
            rose = true;
            break;
        }
        if (mag < best_mag) {
            best_mag = mag;
            best = n;
        }
        prev = n;
    }
    const std::size_t order = rose ? best : cap;
    std::complex<double> sum{};
    for (std::size_t n = 0; n <= order; ++n) sum += terms[n];
    return {order, sum};
}

std::complex<double> series_residual(const SeriesReport& report, const PotentialSpec& spec, double E, std::size_t order) {
    if (order >= report.terms.size()) throw Error(ErrorKind::InvalidInput, "order beyond computed terms");
    std::complex<double> m{}, dm{};
    for (std::size_t n = 0; n <= order; ++n) {
        m += report.terms[n];
        dm += report.derivatives[n];
    }
    const double p2 = local_momentum_sq(spec, E, report.x_b);
    return dm - std::complex<double>(0.0, 1.0) * (p2 - m * m);
}

}  // namespace qphase
