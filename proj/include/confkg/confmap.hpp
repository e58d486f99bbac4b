#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "confkg/geometry.hpp"
#include "confkg/kgfield.hpp"

namespace confkg {

// Mass sector of the transformation Omega = e^{h t} between FLRW backgrounds,
// in each background's own cosmic time:
//
//     H2 = H1 + h,   m2'(t) = e^{-2 h t} (m1_2 - 2 H1^2) + 2 (H1 + h)^2.
std::pair<double, double> apply_conformal_flrw(double h, double H1, double m1_2, double t);

// tau(t) = (1 - e^{-H t}) / H for a = e^{H t}, normalized to tau(0) = 0, and
// its inverse; both reduce to the identity at H = 0. The conformal chart only
// covers H tau < 1.
double exp_conformal_time(double hubble, double t);
double exp_cosmic_time(double hubble, double tau);

// FLRW background, field and mass transported together by Omega = e^{h t}.
// The mass lives in the closed family
//
//     m^2(t) = A e^{-2 c t} + 2 H^2,
//
// on which the transformations act by (H, c) -> (H + h, c + h) with A fixed,
// so composing shifts is exactly adding their parameters. The field picks up
// e^{-h t}; the accumulated shift is tracked against the construction-time
// background, whose field is the supplied base closure.
class ExpFamilyTriple {
public:
    ExpFamilyTriple(double hubble, double mass_amplitude, double mass_rate,
                    std::function<std::complex<double>(double, double)> base_field);

    // the triple transformed by Omega = e^{h t}
    ExpFamilyTriple shifted(double h) const;

    double hubble() const { return hubble_; }
    double mass_amplitude() const { return amplitude_; }
    double mass_rate() const { return rate_; }
    double shift_from_base() const { return shift_; }

    double mass2(double t) const;
    std::complex<double> field(double t, double x) const;

    // a(t) = e^{H t} as a profile (constant 1 when H = 0)
    ScaleFactorProfile scale() const;

    GridField sample_field(const GridSpec& g) const;  // cosmic chart

private:
    double hubble_, amplitude_, rate_, shift_;
    std::function<std::complex<double>(double, double)> base_;
};

// Conformally flat triple: metric g = w^2 eta recorded through the factor w
// relating it to Minkowski space, a field on the conformal grid, and a mass
// sampled on the same grid.
struct ConformalTriple {
    ConformalFactor rep;
    GridField phi;
    std::vector<double> mass2;

    static ConformalTriple make(ConformalFactor rep, GridField phi, std::vector<double> mass2);
};

// The general transformation on the conformally flat family:
//
//     w -> Omega w,   phi -> phi / Omega,
//     m2 -> Omega^{-2} [ m2 - (box_eta Omega + 2 eta^{rs} d_s(ln w) d_r Omega) / (w^2 Omega) ],
//
// with box_eta = -d_tau^2 + d_x^2. Derivatives of closed-form factors are
// analytic; sampled factors use their finite-difference accessors. The
// returned rep is the sampled pointwise product; Omega = 1 returns the input
// unchanged.
ConformalTriple apply_conformal(const ConformalTriple& triple, const ConformalFactor& omega);

}  // namespace confkg
