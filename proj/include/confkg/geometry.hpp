#pragma once

// Background geometry for spatially flat FLRW cosmologies.
//
// Provides the scale factor profiles used throughout (constant, exponential
// in cosmic time, tanh-interpolating in conformal time, sampled), conformal
// factors relating metrics within the conformally flat class, Christoffel
// symbols in cosmic-time coordinates, the cosmic <-> conformal time map, and
// the effective mass-squared a Klein-Gordon field acquires when the expansion
// is traded for a time dependent mass on flat spacetime.
//
// Conventions: metric signature (-,+,+,+); cosmic time line element
// -dt^2 + a(t)^2 dx^2; conformal time d tau = dt / a(t), in which the same
// metric reads a(tau)^2 (-d tau^2 + dx^2).

#include "confkg/grid.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace confkg {

namespace detail {

// s(tau) = A + B tanh(rho tau), the squared scale factor of the smooth
// expansion step between the static in and out regions.
struct TanhSquared {
    double A = 1.0, B = 0.0, rho = 1.0;

    double s(double tau) const;    // value
    double ds(double tau) const;   // d s / d tau
    double dds(double tau) const;  // d^2 s / d tau^2
};

// Real samples on a uniform 1+1 grid with second-order difference accessors
// (central in the interior, one-sided at the edges).
struct SampledSurface {
    GridSpec grid;
    std::vector<double> v;

    double at(std::size_t i, std::size_t j) const { return v[grid.index(i, j)]; }
    double d_time(std::size_t i, std::size_t j) const;
    double d_x(std::size_t i, std::size_t j) const;
    double dd_time(std::size_t i, std::size_t j) const;
    double dd_x(std::size_t i, std::size_t j) const;
};

} // namespace detail

// Scale factor a of a spatially flat FLRW metric. The first two kinds are
// functions of cosmic time t, the last two of conformal time tau; accessors
// for the wrong time variable throw std::invalid_argument.
class ScaleFactorProfile {
public:
    enum class Kind { constant, exponential, tanh, sampled };

    static ScaleFactorProfile constant(double a0);
    // a(t) = e^{H t}
    static ScaleFactorProfile exponential(double hubble);
    // a(tau)^2 = (a_out^2 + a_in^2)/2 + (a_out^2 - a_in^2)/2 * tanh(rho tau)
    static ScaleFactorProfile tanh_step(double a_in, double a_out, double rho);
    // uniform samples a(tau0 + i dtau), i = 0 .. values.size()-1
    static ScaleFactorProfile sampled(std::vector<double> values, double tau0, double dtau);

    Kind kind() const { return kind_; }

    // cosmic-time accessors (constant, exponential)
    double a_cosmic(double t) const;
    double adot_cosmic(double t) const;

    // conformal-time accessors (all kinds; the exponential profile normalized
    // to a(tau=0) = 1 reads a(tau) = 1/(1 - H tau) for tau < 1/H)
    double a_conf(double tau) const;
    double da_conf(double tau) const;
    double dda_conf(double tau) const;

    // asymptotic values for tau -> -/+ infinity (constant, tanh, sampled)
    double a_in() const;
    double a_out() const;

    double hubble() const;  // exponential: H, constant: 0, otherwise throws
    double rho() const;     // tanh only

private:
    ScaleFactorProfile() = default;

    Kind kind_ = Kind::constant;
    double a0_ = 1.0;
    double hubble_ = 0.0;
    double a_in_ = 1.0, a_out_ = 1.0;
    detail::TanhSquared ts_;
    std::vector<double> samples_;
    double tau0_ = 0.0, dtau_ = 0.0;

    // quadratic-stencil helpers for the sampled kind
    void stencil(double tau, double& val, double& d1, double& d2) const;
};

// Positive conformal factor Omega relating two metrics of the conformally
// flat class, g2 = Omega^2 g1. The exponential kind e^{h t} lives in cosmic
// time and composes by adding exponents; the tanh kind (A + B tanh(rho
// tau))^{p/2}, p = +-1, and the sampled kind live in conformal coordinates.
class ConformalFactor {
public:
    enum class Kind { unit, exponential, tanh, sampled };

    static ConformalFactor unit();
    static ConformalFactor exponential(double h);
    static ConformalFactor tanh_step(double a_in, double a_out, double rho);
    static ConformalFactor sampled(GridSpec grid, std::vector<double> values);

    Kind kind() const { return kind_; }
    double exponent() const;  // exponential kind: h

    // pointwise evaluation; the first argument is t for the exponential kind
    // and tau otherwise. Sampled factors may only be evaluated on their nodes.
    double value(double time, double x) const;
    double d_time(double time, double x) const;
    double d_x(double time, double x) const;
    double dd_time(double time, double x) const;
    double dd_x(double time, double x) const;

    const GridSpec& grid() const;  // sampled kind
    const std::vector<double>& values() const;

    // resample a closed-form factor (or check congruence of a sampled one)
    ConformalFactor sample_to(const GridSpec& g) const;

    bool is_unit() const { return kind_ == Kind::unit; }

    friend ConformalFactor compose(const ConformalFactor&, const ConformalFactor&);
    friend ConformalFactor invert(const ConformalFactor&);

    // tanh parameters
    double tanh_a_in() const;
    double tanh_a_out() const;
    double tanh_rho() const;
    int tanh_power() const;

private:
    ConformalFactor() = default;

    Kind kind_ = Kind::unit;
    double h_ = 0.0;
    detail::TanhSquared ts_;
    int power_ = 1;
    double a_in_ = 1.0, a_out_ = 1.0;
    detail::SampledSurface surf_;

    void node_of(double time, double x, std::size_t& i, std::size_t& j) const;
};

// Pointwise product of two factors. Defined for two exponential factors
// (exponents add), two sampled factors on congruent grids, or any factor
// with the unit factor; other pairs throw std::invalid_argument.
ConformalFactor compose(const ConformalFactor& first, const ConformalFactor& second);

// Pointwise reciprocal: exponential h -> -h, tanh p -> -p, sampled 1/values.
ConformalFactor invert(const ConformalFactor& f);

// Spatially flat FLRW metric descriptor for cosmic-time operations.
struct FLRWMetric {
    ScaleFactorProfile scale;
    double hubble = 0.0;  // e-folding rate for the exponential kind, else 0

    static FLRWMetric from_profile(const ScaleFactorProfile& s);
};

// tau(t) = integral_{t_ref}^{t} dt' / a(t'), by adaptive quadrature to an
// absolute tolerance of 1e-12. Requires a cosmic-time profile.
double conformal_time(const ScaleFactorProfile& scale, double t, double t_ref);

// Christoffel symbols Gamma[rho][mu][nu] of the FLRW metric in cosmic-time
// coordinates x = (t, x1, x2, x3). Nonzero entries: Gamma^0_ij = a adot
// delta_ij and Gamma^i_0j = (adot/a) delta^i_j.
using Christoffel = std::array<std::array<std::array<double, 4>, 4>, 4>;
Christoffel christoffel(const FLRWMetric& metric, const std::array<double, 4>& x);

// Flat-picture mass of a field carried from FLRW (exponential profile, rate
// H) to Minkowski: M^2(t) = e^{2 H t} (m^2 - 2 H^2), expressed in the source
// cosmic time.
double effective_mass_flrw(double m2, double hubble, double t);

// Flat-picture mass in conformal time: M^2(tau) = a^2 m^2 - a''/a. May be
// negative for strong expansion; callers decide whether that matters.
double effective_mass_conformal(const ScaleFactorProfile& scale, double m2, double tau);

} // namespace confkg
