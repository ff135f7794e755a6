#ifndef QPHASE_POTENTIAL_HPP
#define QPHASE_POTENTIAL_HPP

#include <limits>
#include <string>
#include <vector>

#include "qphase/series.hpp"

namespace qphase {

enum class PotentialKind { Harmonic, QuarticAnharmonic, LennardJones126, Constant, Polynomial };

const char* to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& name);

/// A closed-form one-dimensional potential plus the momentum convention.
///
/// Generic kinds use p^2 = 2 m (E - V). The Lennard-Jones kind is written in
/// scaled units, V = x^-12 - 2 x^-6 with well depth 1 at x = 1, and uses
/// p^2 = B (E - V) so that the strength B absorbs mass and length scales.
///
/// params per kind:
///   Harmonic           {k}          V = k x^2 / 2
///   QuarticAnharmonic  {a, b}       V = a x^2 + b x^4
///   LennardJones126    {}           (strength carries B)
///   Constant           {c}          V = c
///   Polynomial         {c0..cN}     V = sum c_k x^k, N even, c_N > 0
/// Mass under which x^2 + 2 x^4 has twenty levels below E = 60 and E = 5
/// between levels n = 2 and n = 3 (p^2 = 4 (E - V)).
inline constexpr double anharmonic_benchmark_mass = 2.0;

struct PotentialSpec {
    PotentialKind kind = PotentialKind::Harmonic;
    std::vector<double> params;
    double mass = 1.0;
    double strength = 1.0;

    static PotentialSpec harmonic(double k = 1.0, double mass = 1.0);
    static PotentialSpec quartic_anharmonic(double a = 1.0, double b = 2.0, double mass = 1.0);
    /// V = x^2 + 2 x^4 with the benchmark mass (see anharmonic_benchmark_mass).
    static PotentialSpec anharmonic_benchmark();
    static PotentialSpec lennard_jones(double strength = 1.0e4);
    static PotentialSpec constant(double c = 0.0, double mass = 1.0);
    static PotentialSpec polynomial(std::vector<double> coeffs, double mass = 1.0);

    /// Throws Error(InvalidInput) when an invariant is violated.
    void validate() const;

    /// Left domain endpoint: 0 for Lennard-Jones, -inf otherwise. The right
    /// endpoint is always +inf.
    double domain_lo() const {
        return kind == PotentialKind::LennardJones126 ? 0.0 : -std::numeric_limits<double>::infinity();
    }
    bool in_domain(double x) const { return x > domain_lo() && x < std::numeric_limits<double>::infinity(); }

    /// Coefficient kappa in p^2 = kappa (E - V).
    double momentum_scale() const { return kind == PotentialKind::LennardJones126 ? strength : 2.0 * mass; }

    /// True when V -> +inf on both sides, so that every level is bound.
    bool confining() const { return kind != PotentialKind::LennardJones126 && kind != PotentialKind::Constant; }

    /// True when V(-x) = V(x).
    bool symmetric() const;

    /// Location of the global minimum of V (0 for symmetric kinds, 1 for LJ).
    double minimum_location() const;
    double minimum_value() const;

    /// Dissociation energy; only meaningful when !confining().
    double threshold() const { return kind == PotentialKind::LennardJones126 ? 0.0 : std::numeric_limits<double>::quiet_NaN(); }

    std::string describe() const;
};

struct TurningPair {
    double t1;
    double t2;
};

double evaluate_v(const PotentialSpec& spec, double x);

/// p^2(x, E); negative in classically forbidden regions.
double local_momentum_sq(const PotentialSpec& spec, double E, double x);

/// Taylor coefficients c_0..c_order of p^2(x + h, E) in h.
RealSeries momentum_sq_jet(const PotentialSpec& spec, double E, double x, std::size_t order);

/// p^2 and d(p^2)/dx at one point.
struct MomentumSlope {
    double p2;
    double dp2;
};
MomentumSlope momentum_sq_slope(const PotentialSpec& spec, double E, double x);

/// Brackets sign changes of p^2 on a geometric sample grid and bisects each
/// root to machine precision. Exactly two sign changes are required.
TurningPair find_turning_points(const PotentialSpec& spec, double E);

}  // namespace qphase

#endif  // QPHASE_POTENTIAL_HPP
