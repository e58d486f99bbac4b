#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "confkg/geometry.hpp"

namespace confkg {

// Time-dependent mass term M^2(tau) of the flat-space mode oscillator
//
//     chi'' + (k^2 + M^2(tau)) chi = 0.
class MassProfile {
public:
    // M^2(tau) = m2
    static MassProfile constant(double m2);

    // M^2(tau) = m2 * a^2(tau) with
    // a^2(tau) = (a_out^2 + a_in^2)/2 + (a_out^2 - a_in^2)/2 * tanh(rho tau)
    static MassProfile tanh_transition(double a_in, double a_out, double rho, double m2);

    // M^2(tau) = a(tau)^2 m2 - a''(tau)/a(tau) for a scale profile in
    // conformal time
    static MassProfile from_scale(ScaleFactorProfile scale, double m2);

    double operator()(double tau) const;

private:
    MassProfile() = default;

    enum class Kind { constant, tanh, curved };

    Kind kind_ = Kind::constant;
    double m2_ = 0.0;
    detail::TanhSquared a2_;
    ScaleFactorProfile scale_ = ScaleFactorProfile::constant(1.0);
};

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;           // largest step size; 0 disables the cap
    std::size_t max_steps = 4000000; // attempted steps before giving up

    // times in [tau0, tau1] where the solution is recorded exactly (the
    // integrator lands on them instead of interpolating)
    std::vector<double> checkpoints;
};

struct ModeSolution {
    double k = 0.0;
    double tau0 = 0.0, tau1 = 0.0;
    double omega_in = 0.0;  // sqrt(k^2 + M^2(tau0))

    std::complex<double> chi, dchi;  // state at tau1

    // checkpoint times (sorted, duplicates removed) and the state there
    std::vector<double> tau;
    std::vector<std::complex<double>> chi_at, dchi_at;

    double wronskian_defect = 0.0;  // max |2 Im(chi conj(chi')) - 1| seen
    std::size_t steps = 0;          // accepted steps
};

// Conserved normalization of a mode; 1 when chi started positive-frequency
// with unit Klein-Gordon norm.
inline double mode_wronskian(std::complex<double> chi, std::complex<double> dchi) {
    return 2.0 * std::imag(chi * std::conj(dchi));
}

// Evolves chi'' + (k^2 + M^2(tau)) chi = 0 from the positive-frequency state
//
//     chi(tau0) = e^{-i omega tau0} / sqrt(2 omega),  chi'(tau0) = -i omega chi(tau0),
//
// omega = sqrt(k^2 + M^2(tau0)), with an adaptive embedded Runge-Kutta pair.
// The mass must be static over one oscillation period after tau0, otherwise
// the initial state is not a meaningful vacuum and a domain_error is thrown.
ModeSolution integrate_mode(const MassProfile& m2, double k, double tau0, double tau1,
                            const IntegratorOptions& opt = {});

// The same mode evolved in the curved picture: solves the friction form
//
//     f'' + 2 (a'/a) f' + (k^2 + a^2 m2) f = 0
//
// and reports chi = a f, chi' = a' f + a f', so the result is directly
// comparable with integrate_mode on MassProfile::from_scale(scale, m2).
// Both start from the same positive-frequency state in the chi variable.
ModeSolution integrate_mode_curved(const ScaleFactorProfile& scale, double m2, double k,
                                   double tau0, double tau1, const IntegratorOptions& opt = {});

}  // namespace confkg
