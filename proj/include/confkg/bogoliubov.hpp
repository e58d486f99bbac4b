#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "confkg/modes.hpp"

namespace confkg {

struct BogoliubovPair {
    double k = 0.0;
    std::complex<double> alpha{1.0, 0.0};
    std::complex<double> beta{0.0, 0.0};
    double omega_in = 0.0, omega_out = 0.0;

    // expected quanta per mode in the out region
    double n_k() const { return std::norm(beta); }
    double unitarity_defect() const {
        return std::abs(std::norm(alpha) - std::norm(beta) - 1.0);
    }
};

// Decomposes mode data at time tau into plane waves of frequency omega,
//
//     alpha = conj(u) (omega chi + i chi'),  beta = u (omega chi - i chi'),
//     u = e^{-i omega tau} / sqrt(2 omega),
//
// so that chi = alpha u + beta conj(u) and |alpha|^2 - |beta|^2 equals the
// Wronskian of chi. k and the frequency fields are left to the caller.
BogoliubovPair project_onto_plane_waves(std::complex<double> chi, std::complex<double> dchi,
                                        double omega, double tau);

// Projection at the end of an evolved mode, with omega_out = sqrt(k^2 + M^2(tau1)).
// The mass must be static over the oscillation period before tau1; the same
// kind of check guards the vacuum definition at the start of the evolution.
BogoliubovPair extract_bogoliubov(const ModeSolution& mode, const MassProfile& m2);

// Projection at stored checkpoint `which`; in a static out region every
// checkpoint yields the same pair up to integration error.
BogoliubovPair extract_bogoliubov_at(const ModeSolution& mode, const MassProfile& m2,
                                     std::size_t which);

// Exact |alpha|^2, |beta|^2 for M^2(tau) = m2 (A + B tanh(rho tau)) with
// A = (a_out^2 + a_in^2)/2, B = (a_out^2 - a_in^2)/2:
//
//     |alpha|^2 = sinh^2(pi omega_plus / rho) / (sinh(pi omega_in / rho) sinh(pi omega_out / rho))
//     |beta|^2  = sinh^2(pi omega_minus / rho) / (sinh(pi omega_in / rho) sinh(pi omega_out / rho))
//
// with omega_{in,out} = sqrt(k^2 + m2 a_{in,out}^2), omega_pm = (omega_out +- omega_in)/2,
// evaluated in log space so large omega/rho does not overflow.
struct TanhSpectrumPoint {
    double k = 0.0;
    double omega_in = 0.0, omega_out = 0.0;
    double alpha2 = 1.0, beta2 = 0.0;

    double n_k() const { return beta2; }
};
TanhSpectrumPoint tanh_transition_spectrum(double k, double a_in, double a_out, double rho,
                                           double m2);

struct SpectrumRequest {
    std::vector<double> k;
    double tau0 = 0.0, tau1 = 0.0;

    // accuracy target for the extracted coefficients; the local step control
    // of the mode integrator runs two orders tighter to leave room for
    // accumulation over the evolution
    double tolerance = 1e-10;

    unsigned threads = 0;  // worker threads; 0 picks the hardware concurrency
};

struct Spectrum {
    std::vector<double> k;
    std::vector<BogoliubovPair> coeff;
    double tolerance = 0.0;
    double max_unitarity_defect = 0.0;
    double max_wronskian_defect = 0.0;
};

// Evolves one mode per wavenumber through the transition and extracts the
// coefficients. Work is spread over threads; results do not depend on the
// thread count. A failing mode aborts the whole spectrum with its own error.
Spectrum compute_spectrum(const MassProfile& m2, const SpectrumRequest& req);

// Same spectrum computed in the curved picture: modes evolve in the friction
// form on the given scale profile and are extracted against the flat-picture
// mass a^2 m2 - a''/a, so both overloads describe one physical transition.
Spectrum compute_spectrum(const ScaleFactorProfile& scale, double m2,
                          const SpectrumRequest& req);

// n points, geometrically spaced, first exactly k_min and last exactly k_max
std::vector<double> log_spaced(double k_min, double k_max, std::size_t n);

// columns: k,re_alpha,im_alpha,re_beta,im_beta,n_k,unitarity_defect
// values printed with %.17g so a reparse recovers the doubles bit for bit
void write_spectrum_csv(std::ostream& os, const Spectrum& s);

}  // namespace confkg
