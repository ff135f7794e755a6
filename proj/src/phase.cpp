#include "qphase/phase.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "qphase/error.hpp"

namespace qphase {

namespace {

constexpr cplx I1(0.0, 1.0);

double sup_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

std::string where(double x, double E) {
    std::ostringstream os;
    os.precision(15);
    os << "x=" << x << " E=" << E;
    return os.str();
}

}  // namespace

double local_step(const GridPolicy& policy, double p2, double dp2) {
    const double airy = std::cbrt(std::abs(dp2));
    const double k = std::sqrt(std::abs(p2) + airy * airy);
    double h = p2 > 0.0 ? 2.0 * std::numbers::pi / (policy.points_per_wavelength * k)
                        : 1.0 / (policy.points_per_decay_length * k);
    if (!(h < policy.max_step)) h = policy.max_step;
    return h;
}

Grid build_grid(const PotentialSpec& spec, double E, double x_b, const GridPolicy& policy) {
    spec.validate();
    if (policy.points_per_wavelength < 20.0 || policy.points_per_decay_length < 20.0 || !(policy.max_step > 0.0) ||
        !(policy.decay_budget > 0.0))
        throw Error(ErrorKind::InvalidInput, "grid policy needs >= 20 points per wavelength/decay length");

    Grid g;
    g.policy = policy;
    const bool boxed = spec.kind == PotentialKind::Constant;
    double lo_limit = spec.domain_lo();
    double hi_limit = std::numeric_limits<double>::infinity();
    if (boxed) {
        if (!policy.box) throw Error(ErrorKind::InvalidInput, "constant potential needs an explicit box");
        lo_limit = policy.box->first;
        hi_limit = policy.box->second;
        if (!(lo_limit < x_b && x_b < hi_limit)) throw Error(ErrorKind::InvalidInput, "x_b outside the box");
        if (!(local_momentum_sq(spec, E, x_b) > 0.0))
            throw Error(ErrorKind::NoClassicalRegion, "constant potential above the energy");
    } else {
        g.turning = find_turning_points(spec, E);
        if (!(x_b > g.turning->t1 && x_b < g.turning->t2))
            throw Error(ErrorKind::InvalidInput, "x_b must lie between the turning points (" + where(x_b, E) + ")");
        g.slope_t1 = std::abs(momentum_sq_slope(spec, E, g.turning->t1).dp2);
        g.slope_t2 = std::abs(momentum_sq_slope(spec, E, g.turning->t2).dp2);
    }

    auto step_at = [&](double x) {
        const MomentumSlope s = momentum_sq_slope(spec, E, x);
        return local_step(policy, s.p2, s.dp2);
    };

    // dir = +1 marches right, -1 left
    auto march = [&](int dir) {
        std::vector<double> out;
        double x = x_b;
        double decay = 0.0;
        double p_prev = std::sqrt(std::max(0.0, -local_momentum_sq(spec, E, x)));
        const double limit = dir > 0 ? hi_limit : lo_limit;
        while (true) {
            double h = step_at(x);
            h = std::min(h, step_at(x + dir * h));
            double xn = x + dir * h;
            bool last = false;
            if (boxed) {
                if ((dir > 0 && xn >= limit) || (dir < 0 && xn <= limit)) {
                    xn = limit;
                    last = true;
                }
            } else if (dir < 0 && xn <= 0.5 * (x + limit) && std::isfinite(limit)) {
                xn = 0.5 * (x + limit);  // never step onto the singular endpoint
            }
            const double p2n = local_momentum_sq(spec, E, xn);
            const double pn = p2n < 0.0 ? std::sqrt(-p2n) : 0.0;
            if (!boxed) {
                const bool beyond = dir > 0 ? xn > g.turning->t2 : xn < g.turning->t1;
                if (beyond) decay += 0.5 * (pn + p_prev) * std::abs(xn - x);
                if (decay >= policy.decay_budget) last = true;
            }
            out.push_back(xn);
            p_prev = pn;
            x = xn;
            if (out.size() > policy.node_cap) {
                std::ostringstream os;
                os << "more than " << policy.node_cap << " nodes marching " << (dir > 0 ? "right" : "left")
                   << " from x_b=" << x_b << ", reached x=" << x << " with decay exponent " << decay << " at E=" << E;
                throw Error(ErrorKind::ResolutionOverflow, os.str());
            }
            if (last) break;
        }
        return out;
    };

    std::vector<double> right = march(+1);
    std::vector<double> left = march(-1);
    g.nodes.reserve(left.size() + right.size() + 1);
    g.nodes.assign(left.rbegin(), left.rend());
    g.x_b_index = g.nodes.size();
    g.nodes.push_back(x_b);
    g.nodes.insert(g.nodes.end(), right.begin(), right.end());
    if (g.nodes.size() > policy.node_cap)
        throw Error(ErrorKind::ResolutionOverflow, "grid exceeds node cap at E=" + where(x_b, E));
    return regrid_energy(g, spec, E);
}

Grid regrid_energy(const Grid& grid, const PotentialSpec& spec, double E) {
    Grid g = grid;
    g.p2.resize(g.nodes.size());
    g.dp2.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const MomentumSlope s = momentum_sq_slope(spec, E, g.nodes[i]);
        g.p2[i] = s.p2;
        g.dp2[i] = s.dp2;
    }
    return g;
}

namespace {

struct Blend {
    double s;   // 0 -> 1 across the window
    double ds;  // ds/dx
};

Blend smoothstep(double x, double centre, double half_width) {
    const double xi = (x - (centre - half_width)) / (2.0 * half_width);
    if (xi <= 0.0) return {0.0, 0.0};
    if (xi >= 1.0) return {1.0, 0.0};
    return {xi * xi * (3.0 - 2.0 * xi), 6.0 * xi * (1.0 - xi) / (2.0 * half_width)};
}

Blend ramp(double x, double centre, double half_width) {
    const double xi = (x - (centre - half_width)) / (2.0 * half_width);
    if (xi <= 0.0) return {0.0, 0.0};
    if (xi >= 1.0) return {1.0, 0.0};
    return {xi, 1.0 / (2.0 * half_width)};
}

// 1 at the centre, 0 outside |x - centre| >= half_width, C1.
Blend bump(double x, double centre, double half_width) {
    const double d = x - centre;
    const double eta = std::abs(d) / half_width;
    if (eta >= 1.0) return {0.0, 0.0};
    const double s = eta * eta * (3.0 - 2.0 * eta);
    const double ds = 6.0 * eta * (1.0 - eta) / half_width * (d < 0.0 ? -1.0 : 1.0);
    return {1.0 - s, -ds};
}

}  // namespace

MField trial_function(const Grid& grid, TrialKind kind) {
    const std::size_t n = grid.size();
    MField f;
    f.M.resize(n);
    f.dM.resize(n);

    if (!grid.turning) {
        for (std::size_t i = 0; i < n; ++i) {
            const double P = grid.p2[i];
            const double p = std::sqrt(std::abs(P));
            f.M[i] = P > 0.0 ? cplx(p, 0.0) : cplx(0.0, -p);
            f.dM[i] = p > 0.0 ? f.M[i] * (grid.dp2[i] / (2.0 * P)) : cplx{};
        }
        return f;
    }

    const double t1 = grid.turning->t1, t2 = grid.turning->t2;
    const double width = t2 - t1;
    const double g1 = std::max(grid.slope_t1, 1.0e-300), g2 = std::max(grid.slope_t2, 1.0e-300);
    const double c1 = std::cbrt(g1), c2 = std::cbrt(g2);
    const double l1 = 1.0 / c1, l2 = 1.0 / c2;

    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.nodes[i];
        const double P = grid.p2[i];
        const double dP = grid.dp2[i];
        const double c = std::abs(x - t1) <= std::abs(x - t2) ? c1 : c2;

        double R, dR;
        Blend s1, s2;
        if (kind == TrialKind::Smoothstep) {
            const double w1 = std::min(2.0 * l1, 0.45 * width), w2 = std::min(2.0 * l2, 0.45 * width);
            s1 = smoothstep(x, t1, w1);
            s2 = smoothstep(x, t2, w2);
            const Blend b1 = bump(x, t1, w1), b2 = bump(x, t2, w2);
            const double b = b1.s + b2.s, db = b1.ds + b2.ds;
            const double absp = std::sqrt(std::abs(P));
            const double q = P * P + c * c * c * c;
            const double reg = std::sqrt(std::sqrt(q));
            const double dreg = P * dP / (2.0 * q / reg);
            double dabsp = 0.0;
            if (P != 0.0 && b < 1.0) dabsp = (P > 0.0 ? 1.0 : -1.0) * dP / (2.0 * absp);
            R = (1.0 - b) * absp + b * reg;
            dR = (1.0 - b) * dabsp + b * dreg + db * (reg - absp);
        } else {
            s1 = ramp(x, t1, l1);
            s2 = ramp(x, t2, l2);
            const double q = P * P + c * c * c * c;
            R = std::sqrt(std::sqrt(q));
            dR = P * dP / (2.0 * q / R);
        }
        const cplx phi = I1 * (1.0 - s1.s) + (s1.s - s2.s) - I1 * s2.s;
        const cplx dphi = s1.ds * cplx(1.0, -1.0) - s2.ds * cplx(1.0, 1.0);
        f.M[i] = R * phi;
        f.dM[i] = dR * phi + R * dphi;
    }
    return f;
}

MField qlm_iterate(const Grid& grid, const MField& current, cplx boundary_value) {
    if (!(boundary_value.real() > 0.0))
        throw Error(ErrorKind::InvalidInput, "boundary value must have a positive real part");
    const std::size_t n = grid.size();
    if (current.M.size() != n || current.dM.size() != n)
        throw Error(ErrorKind::InvalidInput, "iterate does not match the grid");

    // y' = A y + B, y'' = C y + D
    std::vector<cplx> A(n), B(n), C(n), D(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx m = current.M[i], dm = current.dM[i];
        const cplx a = -2.0 * I1 * m;
        const cplx da = -2.0 * I1 * dm;
        const cplx b = I1 * (grid.p2[i] + m * m);
        const cplx db = I1 * (grid.dp2[i] + 2.0 * m * dm);
        A[i] = a;
        B[i] = b;
        C[i] = da + a * a;
        D[i] = a * b + db;
    }

    MField next;
    next.M.resize(n);
    next.dM.resize(n);
    const std::size_t b0 = grid.x_b_index;
    next.M[b0] = boundary_value;
    next.dM[b0] = A[b0] * boundary_value + B[b0];

    auto step = [&](std::size_t i, std::size_t j) {
        const double h = grid.nodes[j] - grid.nodes[i];
        const double h2 = h * h / 12.0;
        const cplx num = next.M[i] * (1.0 + 0.5 * h * A[i] + h2 * C[i]) + 0.5 * h * (B[i] + B[j]) - h2 * (D[j] - D[i]);
        const cplx den = 1.0 - 0.5 * h * A[j] + h2 * C[j];
        const cplx y = num / den;
        if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
            std::ostringstream os;
            os << "QLM march overflowed at node " << j << " (x=" << grid.nodes[j] << ")";
            throw Error(ErrorKind::StiffnessFailure, os.str());
        }
        next.M[j] = y;
        next.dM[j] = A[j] * y + B[j];
    };
    for (std::size_t i = b0; i + 1 < n; ++i) step(i, i + 1);
    for (std::size_t i = b0; i > 0; --i) step(i, i - 1);
    return next;
}

double default_xb(const PotentialSpec& spec, double E, std::size_t order_cap) {
    if (spec.kind == PotentialKind::Constant) return 0.0;
    const TurningPair tp = find_turning_points(spec, E);
    const double xm = spec.minimum_location();
    if (spec.symmetric() && xm > tp.t1 && xm < tp.t2) return xm;

    const double start = (xm > tp.t1 && xm < tp.t2) ? xm : 0.5 * (tp.t1 + tp.t2);
    double best_x = start;
    double best_q = std::numeric_limits<double>::infinity();
    constexpr int candidates = 48;
    for (int k = 0; k < candidates; ++k) {
        const double x = start + (tp.t2 - start) * 0.9 * k / candidates;
        if (!(local_momentum_sq(spec, E, x) > 1.0e-10)) continue;
        const SeriesReport r = riccati_series_at(spec, E, x, order_cap);
        const double q = std::abs(r.terms[r.optimal_order]) / std::abs(r.terms[0]);
        // the truncation error is of the size of the first omitted term
        const double omitted = r.optimal_order + 1 < r.terms.size()
                                   ? std::abs(r.terms[r.optimal_order + 1]) / std::abs(r.terms[0])
                                   : q;
        const double quality = std::max(q, omitted);
        if (quality < best_q) {
            best_q = quality;
            best_x = x;
        }
    }
    return best_x;
}

PhaseSolution solve_phase(const PotentialSpec& spec, double E, const PhaseOptions& opt) {
    spec.validate();
    PhaseSolution sol;
    sol.energy = E;
    if (opt.grid) {
        sol.grid = *opt.grid;
    } else {
        const double x_b = opt.x_b ? *opt.x_b : default_xb(spec, E, opt.order_cap);
        sol.grid = build_grid(spec, E, x_b, opt.policy);
    }
    const Grid& grid = sol.grid;

    sol.series = riccati_series_at(spec, E, grid.x_b(), opt.order_cap);
    if (opt.fixed_order) {
        sol.truncation_order = std::min(*opt.fixed_order, sol.series.partial_sums.size() - 1);
        sol.boundary_value = sol.series.partial_sums[sol.truncation_order];
    } else {
        sol.truncation_order = sol.series.optimal_order;
        sol.boundary_value = sol.series.boundary_value;
    }
    if (!(sol.boundary_value.real() > 0.0))
        throw Error(ErrorKind::PositivityViolation, "series boundary value has Re M <= 0 at " + where(grid.x_b(), E));

    MField field = trial_function(grid, opt.trial);
    bool converged = false;
    for (std::size_t q = 0; q < opt.max_iterations; ++q) {
        MField next = qlm_iterate(grid, field, sol.boundary_value);
        double norm = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) norm = std::max(norm, std::abs(next.M[i] - field.M[i]));
        field = std::move(next);
        sol.update_norms.push_back(norm);
        sol.iterations = q + 1;
        if (!std::isfinite(norm)) break;
        if (norm < opt.tolerance * (1.0 + sup_abs(field.M))) {
            converged = true;
            break;
        }
    }
    sol.final_update_norm = sol.update_norms.empty() ? 0.0 : sol.update_norms.back();
    if (!converged) {
        std::ostringstream os;
        os << "no convergence after " << sol.iterations << " iterations at E=" << E << ", last update "
           << sol.final_update_norm;
        throw Error(ErrorKind::QlmDivergence, os.str());
    }
    sol.M = std::move(field.M);
    sol.dM = std::move(field.dM);
    accumulate_phase(sol);
    sol.riccati_residual = riccati_residual(spec, E, grid, sol.M);
    return sol;
}

void accumulate_phase(PhaseSolution& sol) {
    const Grid& g = sol.grid;
    const std::size_t n = g.size();
    sol.sigma.assign(n, 0.0);
    sol.alpha.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = sol.M[i].real();
        if (!(a > 0.0)) {
            std::ostringstream os;
            os << "Re M = " << a << " at node " << i << " (" << where(g.nodes[i], sol.energy) << ")";
            throw Error(ErrorKind::PositivityViolation, os.str());
        }
        sol.alpha[i] = 1.0 / std::sqrt(a);
    }
    // Hermite quadrature of sigma' = Re M with sigma'' = Re M'
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = g.nodes[i + 1] - g.nodes[i];
        const double a0 = sol.M[i].real(), a1 = sol.M[i + 1].real();
        const double d0 = sol.dM[i].real(), d1 = sol.dM[i + 1].real();
        sol.sigma[i + 1] = sol.sigma[i] + 0.5 * h * (a0 + a1) + h * h / 12.0 * (d0 - d1);
    }
    // Re M decays like exp(-2 integral |Im M|) beyond the grid edges
    double tail = 0.0;
    if (g.turning) {
        const cplx ml = sol.M.front(), mr = sol.M.back();
        if (ml.imag() > 0.0) tail += ml.real() / (2.0 * ml.imag());
        if (mr.imag() < 0.0) tail += mr.real() / (-2.0 * mr.imag());
    }
    sol.tail_phase = tail;
    sol.total_phase = sol.sigma.back() + tail;
}

std::vector<cplx> direct_riccati(const PotentialSpec& spec, double E, const Grid& grid, cplx boundary_value,
                                 double rel_tol, double abs_tol) {
    namespace ode = boost::numeric::odeint;
    using state = std::array<double, 2>;
    if (!(boundary_value.real() > 0.0))
        throw Error(ErrorKind::InvalidInput, "boundary value must have a positive real part");

    // M = a + i b: a' = 2 a b, b' = p^2 - a^2 + b^2
    auto rhs = [&](const state& s, state& ds, double x) {
        const double p2 = local_momentum_sq(spec, E, x);
        ds[0] = 2.0 * s[0] * s[1];
        ds[1] = p2 - s[0] * s[0] + s[1] * s[1];
    };

    std::vector<cplx> out(grid.size());
    const std::size_t b0 = grid.x_b_index;
    out[b0] = boundary_value;

    auto run = [&](std::vector<double> times, bool forward) {
        if (times.size() < 2) return;
        state s{boundary_value.real(), boundary_value.imag()};
        auto stepper = ode::make_controlled(abs_tol, rel_tol, ode::runge_kutta_fehlberg78<state>());
        std::size_t k = 0;
        auto observer = [&](const state& st, double) {
            const std::size_t idx = forward ? b0 + k : b0 - k;
            out[idx] = cplx(st[0], st[1]);
            ++k;
        };
        const double dt0 = (times[1] - times[0]) * 0.25;
        try {
            ode::integrate_times(stepper, rhs, s, times.begin(), times.end(), dt0, observer,
                                 ode::max_step_checker(100000));
        } catch (const std::exception& e) {
            throw Error(ErrorKind::StiffnessFailure, std::string("direct Riccati march: ") + e.what());
        }
    };

    run(std::vector<double>(grid.nodes.begin() + static_cast<long>(b0), grid.nodes.end()), true);
    std::vector<double> left(grid.nodes.begin(), grid.nodes.begin() + static_cast<long>(b0) + 1);
    std::reverse(left.begin(), left.end());
    run(left, false);
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!std::isfinite(out[i].real()) || !std::isfinite(out[i].imag()))
            throw Error(ErrorKind::StiffnessFailure, "direct Riccati march overflowed at " + where(grid.nodes[i], E));
    return out;
}

std::size_t count_sign_changes(const std::vector<double>& values) {
    std::size_t changes = 0;
    int last = 0;
    for (double v : values) {
        const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

Wavefunction wavefunction(const PhaseSolution& sol, bool eigenvalue) {
    const std::size_t n = sol.sigma.size();
    Wavefunction w;
    w.psi.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.psi[i] = sol.alpha[i] * std::sin(sol.sigma[i]);
    if (!eigenvalue) return w;

    const double total = sol.sigma.back();
    const double c = std::cos(total);
    std::vector<double> psi(n);
    const std::size_t split = sol.grid.x_b_index;
    for (std::size_t i = 0; i < n; ++i)
        psi[i] = i <= split ? w.psi[i] : sol.alpha[i] * std::sin(sol.sigma[i] - total) * c;
    double norm = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        norm += 0.5 * (psi[i] * psi[i] + psi[i + 1] * psi[i + 1]) * (sol.grid.nodes[i + 1] - sol.grid.nodes[i]);
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& v : psi) v *= scale;
    w.normalized = std::move(psi);
    return w;
}

namespace {

struct SigmaJet {
    double d1, d2, d3;  // sigma', sigma'', sigma'''
};

SigmaJet sigma_jet(cplx m, double p2, double dp2) {
    const cplx dm = I1 * (p2 - m * m);
    const cplx ddm = I1 * (dp2 - 2.0 * m * dm);
    return {m.real(), dm.real(), ddm.real()};
}

}  // namespace

double schwarzian_residual(const PhaseSolution& sol) {
    const Grid& g = sol.grid;
    double sup = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        const SigmaJet s = sigma_jet(sol.M[i], g.p2[i], g.dp2[i]);
        const double ratio = s.d2 / s.d1;
        const double schwarz = s.d3 / s.d1 - 1.5 * ratio * ratio;
        sup = std::max(sup, std::abs(s.d1 * s.d1 - g.p2[i] + 0.5 * schwarz));
    }
    return sup;
}

std::pair<double, double> milne_residual(const PhaseSolution& sol) {
    const Grid& g = sol.grid;
    double sup = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(g.p2[i] > 0.0)) continue;
        const SigmaJet s = sigma_jet(sol.M[i], g.p2[i], g.dp2[i]);
        const double a = s.d1;
        const double alpha = 1.0 / std::sqrt(a);
        const double a32 = alpha * alpha * alpha;  // a^{-3/2}
        const double a52 = a32 * alpha * alpha;    // a^{-5/2}
        const double dd_alpha = 0.75 * a52 * s.d2 * s.d2 - 0.5 * a32 * s.d3;
        sup = std::max(sup, std::abs(dd_alpha + g.p2[i] * alpha - 1.0 / (alpha * alpha * alpha)));
        scale = std::max(scale, std::abs(g.p2[i] * alpha));
    }
    return {sup, scale};
}

double riccati_residual(const PotentialSpec& spec, double E, const Grid& grid, const std::vector<cplx>& M) {
    double sup = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double h = grid.nodes[i + 1] - grid.nodes[i];
        const cplx m0 = M[i], m1 = M[i + 1];
        const cplx d0 = I1 * (grid.p2[i] - m0 * m0);
        const cplx d1 = I1 * (grid.p2[i + 1] - m1 * m1);
        const cplx mid = 0.5 * (m0 + m1) + h / 8.0 * (d0 - d1);
        const cplx dmid = 1.5 * (m1 - m0) / h - 0.25 * (d0 + d1);
        const double p2 = local_momentum_sq(spec, E, 0.5 * (grid.nodes[i] + grid.nodes[i + 1]));
        sup = std::max(sup, std::abs(dmid - I1 * (p2 - mid * mid)));
    }
    return sup;
}

}  // namespace qphase
