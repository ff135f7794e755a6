#include "qphase/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "qphase/error.hpp"

namespace qphase {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid input";
        case ErrorKind::NoClassicalRegion: return "no classical region";
        case ErrorKind::MultiWellUnsupported: return "multi-well unsupported";
        case ErrorKind::TooCloseToTurningPoint: return "too close to turning point";
        case ErrorKind::ResolutionOverflow: return "resolution overflow";
        case ErrorKind::StiffnessFailure: return "stiffness failure";
        case ErrorKind::QlmDivergence: return "QLM divergence";
        case ErrorKind::PositivityViolation: return "positivity violation";
        case ErrorKind::Unconverged: return "unconverged";
    }
    return "unknown";
}

const char* to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::Harmonic: return "harmonic";
        case PotentialKind::QuarticAnharmonic: return "anharmonic";
        case PotentialKind::LennardJones126: return "lj";
        case PotentialKind::Constant: return "constant";
        case PotentialKind::Polynomial: return "poly";
    }
    return "unknown";
}

PotentialKind potential_kind_from_string(const std::string& name) {
    if (name == "harmonic") return PotentialKind::Harmonic;
    if (name == "anharmonic" || name == "quartic_anharmonic") return PotentialKind::QuarticAnharmonic;
    if (name == "lj" || name == "lennard_jones_12_6") return PotentialKind::LennardJones126;
    if (name == "constant") return PotentialKind::Constant;
    if (name == "poly" || name == "polynomial") return PotentialKind::Polynomial;
    throw Error(ErrorKind::InvalidInput, "unknown potential kind '" + name + "'");
}

PotentialSpec PotentialSpec::harmonic(double k, double mass) {
    PotentialSpec s{PotentialKind::Harmonic, {k}, mass, 1.0};
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::anharmonic_benchmark() { return quartic_anharmonic(1.0, 2.0, anharmonic_benchmark_mass); }

PotentialSpec PotentialSpec::quartic_anharmonic(double a, double b, double mass) {
    PotentialSpec s{PotentialKind::QuarticAnharmonic, {a, b}, mass, 1.0};
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::lennard_jones(double strength) {
    PotentialSpec s{PotentialKind::LennardJones126, {}, 1.0, strength};
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::constant(double c, double mass) {
    PotentialSpec s{PotentialKind::Constant, {c}, mass, 1.0};
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::polynomial(std::vector<double> coeffs, double mass) {
    PotentialSpec s{PotentialKind::Polynomial, std::move(coeffs), mass, 1.0};
    s.validate();
    return s;
}

void PotentialSpec::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidInput, msg); };
    if (!(mass > 0.0) || !std::isfinite(mass)) fail("mass must be positive");
    for (double p : params)
        if (!std::isfinite(p)) fail("potential parameters must be finite");
    switch (kind) {
        case PotentialKind::Harmonic:
            if (params.size() != 1 || !(params[0] > 0.0)) fail("harmonic needs one positive stiffness k");
            break;
        case PotentialKind::QuarticAnharmonic:
            if (params.size() != 2 || params[0] < 0.0 || !(params[1] > 0.0))
                fail("anharmonic needs {a >= 0, b > 0} for V = a x^2 + b x^4");
            break;
        case PotentialKind::LennardJones126:
            if (!params.empty()) fail("lj takes no coefficients; use the strength B");
            if (!(strength > 0.0) || !std::isfinite(strength)) fail("lj strength B must be positive");
            break;
        case PotentialKind::Constant:
            if (params.size() != 1) fail("constant needs exactly one value");
            break;
        case PotentialKind::Polynomial:
            if (params.size() < 3) fail("poly needs at least the coefficients c0, c1, c2");
            if ((params.size() - 1) % 2 != 0) fail("poly degree must be even to confine");
            if (!(params.back() > 0.0)) fail("poly leading coefficient must be positive");
            break;
    }
}

bool PotentialSpec::symmetric() const {
    switch (kind) {
        case PotentialKind::Harmonic:
        case PotentialKind::QuarticAnharmonic:
        case PotentialKind::Constant: return true;
        case PotentialKind::LennardJones126: return false;
        case PotentialKind::Polynomial:
            for (std::size_t k = 1; k < params.size(); k += 2)
                if (params[k] != 0.0) return false;
            return true;
    }
    return false;
}

namespace {

double polynomial_value(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
}

// Cauchy bound on the real roots of V'(x); the global minimum lies inside.
double polynomial_critical_radius(const std::vector<double>& c) {
    const std::size_t n = c.size() - 1;
    const double lead = static_cast<double>(n) * c[n];
    double bound = 0.0;
    for (std::size_t k = 1; k < n; ++k) bound = std::max(bound, std::abs(static_cast<double>(k) * c[k] / lead));
    return 1.0 + bound;
}

double polynomial_minimum(const std::vector<double>& c) {
    const double r = polynomial_critical_radius(c);
    constexpr int samples = 4000;
    double best_x = 0.0;
    double best_v = polynomial_value(c, 0.0);
    for (int i = 0; i <= samples; ++i) {
        const double x = -r + 2.0 * r * i / samples;
        const double v = polynomial_value(c, x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    const double dx = 2.0 * r / samples;
    auto f = [&](double x) { return polynomial_value(c, x); };
    return boost::math::tools::brent_find_minima(f, best_x - dx, best_x + dx, 52).first;
}

}  // namespace

double PotentialSpec::minimum_location() const {
    switch (kind) {
        case PotentialKind::LennardJones126: return 1.0;
        case PotentialKind::Polynomial: return polynomial_minimum(params);
        default: return 0.0;
    }
}

double PotentialSpec::minimum_value() const { return evaluate_v(*this, minimum_location()); }

std::string PotentialSpec::describe() const {
    std::ostringstream os;
    os.precision(15);
    os << qphase::to_string(kind);
    switch (kind) {
        case PotentialKind::Harmonic: os << " V=" << params[0] << "*x^2/2"; break;
        case PotentialKind::QuarticAnharmonic: os << " V=" << params[0] << "*x^2+" << params[1] << "*x^4"; break;
        case PotentialKind::LennardJones126: os << " V=x^-12-2x^-6 B=" << strength; break;
        case PotentialKind::Constant: os << " V=" << params[0]; break;
        case PotentialKind::Polynomial:
            os << " V=";
            for (std::size_t k = 0; k < params.size(); ++k) os << (k ? "+" : "") << params[k] << "*x^" << k;
            break;
    }
    if (kind != PotentialKind::LennardJones126) os << " mass=" << mass;
    return os.str();
}

static void require_domain(const PotentialSpec& spec, double x) {
    if (!spec.in_domain(x) || !std::isfinite(x)) {
        std::ostringstream os;
        os << "x=" << x << " outside the domain of " << to_string(spec.kind);
        throw Error(ErrorKind::InvalidInput, os.str());
    }
}

double evaluate_v(const PotentialSpec& spec, double x) {
    require_domain(spec, x);
    const auto& p = spec.params;
    switch (spec.kind) {
        case PotentialKind::Harmonic: return 0.5 * p[0] * x * x;
        case PotentialKind::QuarticAnharmonic: {
            const double x2 = x * x;
            return x2 * (p[0] + p[1] * x2);
        }
        case PotentialKind::LennardJones126: {
            const double u = 1.0 / (x * x * x * x * x * x);
            return u * (u - 2.0);
        }
        case PotentialKind::Constant: return p[0];
        case PotentialKind::Polynomial: return polynomial_value(p, x);
    }
    return 0.0;
}

double local_momentum_sq(const PotentialSpec& spec, double E, double x) {
    return spec.momentum_scale() * (E - evaluate_v(spec, x));
}

namespace {

RealSeries potential_jet(const PotentialSpec& spec, double x, std::size_t order) {
    require_domain(spec, x);
    const auto& p = spec.params;
    std::vector<double> c(order + 1, 0.0);
    switch (spec.kind) {
        case PotentialKind::Harmonic:
            c[0] = 0.5 * p[0] * x * x;
            if (order >= 1) c[1] = p[0] * x;
            if (order >= 2) c[2] = 0.5 * p[0];
            return RealSeries(std::move(c));
        case PotentialKind::QuarticAnharmonic: {
            // a(x+h)^2 + b(x+h)^4
            const double a = p[0], b = p[1];
            const double full[5] = {a * x * x + b * x * x * x * x, 2.0 * a * x + 4.0 * b * x * x * x,
                                    a + 6.0 * b * x * x, 4.0 * b * x, b};
            for (std::size_t k = 0; k <= std::min<std::size_t>(order, 4); ++k) c[k] = full[k];
            return RealSeries(std::move(c));
        }
        case PotentialKind::LennardJones126:
            return RealSeries::power_jet(x, -12.0, order) - RealSeries::power_jet(x, -6.0, order) * 2.0;
        case PotentialKind::Constant:
            c[0] = p[0];
            return RealSeries(std::move(c));
        case PotentialKind::Polynomial: {
            // Taylor shift by repeated synthetic division.
            std::vector<double> work(p);
            const std::size_t n = work.size();
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t k = n - 1; k > j; --k) work[k - 1] += x * work[k];
                // after pass j, work[j] holds the j-th Taylor coefficient
            }
            for (std::size_t k = 0; k <= order && k < n; ++k) c[k] = work[k];
            return RealSeries(std::move(c));
        }
    }
    return RealSeries(std::move(c));
}

}  // namespace

RealSeries momentum_sq_jet(const PotentialSpec& spec, double E, double x, std::size_t order) {
    RealSeries v = potential_jet(spec, x, order);
    const double kappa = spec.momentum_scale();
    std::vector<double> c(order + 1);
    for (std::size_t k = 0; k <= order; ++k) c[k] = -kappa * v[k];
    c[0] = kappa * (E - v[0]);
    return RealSeries(std::move(c));
}

MomentumSlope momentum_sq_slope(const PotentialSpec& spec, double E, double x) {
    const double kappa = spec.momentum_scale();
    const auto& p = spec.params;
    switch (spec.kind) {
        case PotentialKind::Harmonic: return {kappa * (E - 0.5 * p[0] * x * x), -kappa * p[0] * x};
        case PotentialKind::QuarticAnharmonic: {
            const double x2 = x * x;
            return {kappa * (E - x2 * (p[0] + p[1] * x2)), -kappa * x * (2.0 * p[0] + 4.0 * p[1] * x2)};
        }
        case PotentialKind::LennardJones126: {
            require_domain(spec, x);
            const double u = 1.0 / (x * x * x * x * x * x);
            return {kappa * (E - u * (u - 2.0)), kappa * 12.0 * u * (u - 1.0) / x};
        }
        default: {
            const RealSeries j = momentum_sq_jet(spec, E, x, 1);
            return {j[0], j[1]};
        }
    }
}

TurningPair find_turning_points(const PotentialSpec& spec, double E) {
    spec.validate();
    if (!std::isfinite(E)) throw Error(ErrorKind::InvalidInput, "energy must be finite");
    if (spec.kind == PotentialKind::LennardJones126 && !(E < 0.0))
        throw Error(ErrorKind::NoClassicalRegion, "lj bound regime requires E < 0");

    // Geometric sample grid around the potential minimum (and the origin).
    std::vector<double> xs;
    const double x0 = spec.minimum_location();
    if (spec.kind == PotentialKind::LennardJones126) {
        for (double x = 0.05; x < 1.0e6; x *= 1.05) xs.push_back(x);
        xs.push_back(x0);
    } else {
        xs.push_back(x0);
        xs.push_back(0.0);
        for (double r = 1.0e-5; r < 1.0e6; r *= 1.1) {
            xs.push_back(x0 + r);
            xs.push_back(x0 - r);
            if (x0 != 0.0) {
                xs.push_back(r);
                xs.push_back(-r);
            }
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<double> p2(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) p2[i] = local_momentum_sq(spec, E, xs[i]);

    std::vector<std::size_t> changes;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if ((p2[i] > 0.0) != (p2[i + 1] > 0.0)) changes.push_back(i);

    std::ostringstream os;
    os.precision(15);
    os << to_string(spec.kind) << " at E=" << E;
    if (changes.empty()) throw Error(ErrorKind::NoClassicalRegion, os.str());
    if (changes.size() > 2) throw Error(ErrorKind::MultiWellUnsupported, os.str());
    if (changes.size() == 1 || p2[changes[0]] > 0.0)
        throw Error(ErrorKind::NoClassicalRegion, os.str() + " (classical region is not bounded by two turning points)");

    auto bisect = [&](double a, double b) {
        double fa = local_momentum_sq(spec, E, a);
        for (int it = 0; it < 400; ++it) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            const double fm = local_momentum_sq(spec, E, m);
            if (fm == 0.0) return m;
            if ((fm > 0.0) == (fa > 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        // return the endpoint with the smaller |p^2|
        const double fb = local_momentum_sq(spec, E, b);
        return std::abs(fa) <= std::abs(fb) ? a : b;
    };

    const std::size_t i1 = changes[0], i2 = changes[1];
    TurningPair tp{bisect(xs[i1], xs[i1 + 1]), bisect(xs[i2], xs[i2 + 1])};
    return tp;
}

}  // namespace qphase
