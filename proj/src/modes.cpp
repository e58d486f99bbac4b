#include "confkg/modes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace confkg {

MassProfile MassProfile::constant(double m2) {
    MassProfile p;
    p.kind_ = Kind::constant;
    p.m2_ = m2;
    return p;
}

MassProfile MassProfile::tanh_transition(double a_in, double a_out, double rho, double m2) {
    if (!(a_in > 0.0) || !(a_out > 0.0))
        throw std::domain_error("MassProfile: tanh asymptotes must be positive");
    if (!(rho > 0.0)) throw std::invalid_argument("MassProfile: rho must be positive");
    MassProfile p;
    p.kind_ = Kind::tanh;
    p.m2_ = m2;
    p.a2_ = detail::TanhSquared{(a_out * a_out + a_in * a_in) / 2.0,
                                (a_out * a_out - a_in * a_in) / 2.0, rho};
    return p;
}

MassProfile MassProfile::from_scale(ScaleFactorProfile scale, double m2) {
    MassProfile p;
    p.kind_ = Kind::curved;
    p.m2_ = m2;
    p.scale_ = std::move(scale);
    return p;
}

double MassProfile::operator()(double tau) const {
    switch (kind_) {
    case Kind::constant: return m2_;
    case Kind::tanh: return m2_ * a2_.s(tau);
    case Kind::curved: return effective_mass_conformal(scale_, m2_, tau);
    }
    return m2_;
}

namespace {

using cplx = std::complex<double>;
using State = std::array<cplx, 2>;

constexpr std::size_t npos = ~std::size_t{0};

[[noreturn]] void fail(const char* who, double k, double tau, const char* what) {
    std::ostringstream os;
    os << who << ": mode k=" << k << " at tau=" << tau << ": " << what;
    throw std::runtime_error(os.str());
}

std::vector<double> checked_stops(const char* who, double tau0, double tau1,
                                  const IntegratorOptions& opt) {
    if (!(tau1 > tau0)) throw std::invalid_argument(std::string(who) + ": empty integration interval");
    if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0))
        throw std::invalid_argument(std::string(who) + ": tolerances must be positive");
    std::vector<double> stops = opt.checkpoints;
    for (double c : stops)
        if (!std::isfinite(c) || c < tau0 || c > tau1)
            throw std::invalid_argument(std::string(who) +
                                        ": checkpoint outside the integration interval");
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    return stops;
}

// Positive-frequency vacuum data only makes sense where the mass sits still,
// so insist on staticity over one oscillation period after tau0.
template <class M2>
double checked_omega(const char* who, const M2& m2, double k, double tau0, double tau1) {
    const double m0 = m2(tau0);
    const double w2 = k * k + m0;
    if (!(w2 > 0.0)) {
        std::ostringstream os;
        os << who << ": mode k=" << k << " is not oscillatory at the start time (k^2 + M^2 = "
           << w2 << ")";
        throw std::domain_error(os.str());
    }
    const double period = 2.0 * std::numbers::pi / std::sqrt(w2);
    double drift = 0.0;
    for (int j = 1; j <= 8; ++j) {
        const double tp = std::min(tau0 + period * j / 8.0, tau1);
        drift = std::max(drift, std::abs(m2(tp) - m0));
    }
    if (drift > 1e-3 * w2) {
        std::ostringstream os;
        os << who << ": mode k=" << k << ": mass term varies by " << drift
           << " within one oscillation period of the start time; begin the evolution in a"
              " static region";
        throw std::domain_error(os.str());
    }
    return std::sqrt(w2);
}

// Dormand-Prince 5(4) with the first-same-as-last stage reused across steps.
// Steps are clamped so checkpoints and the final time are hit exactly; the
// proposed step size never depends on times past the next stop, so the
// trajectory up to an interior checkpoint is identical to a run ending there.
template <class Rhs, class Observe>
void drive(const char* who, double k, double tau0, double tau1, const IntegratorOptions& opt,
           const std::vector<double>& stops, double h_init, Rhs&& rhs, State& y,
           std::size_t& accepted, Observe&& observe) {
    constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    // fifth-order weights minus the embedded fourth-order ones
    constexpr double d1 = 71.0 / 57600.0, d3 = -71.0 / 16695.0, d4 = 71.0 / 1920.0,
                     d5 = -17253.0 / 339200.0, d6 = 22.0 / 525.0, d7 = -1.0 / 40.0;

    std::size_t next = 0;
    while (next < stops.size() && stops[next] == tau0) observe(next++, tau0, y);

    State k1, k2, k3, k4, k5, k6, k7, yt, y5, e;
    rhs(tau0, y, k1);

    double tau = tau0;
    double h = h_init;
    bool rejected = false;
    for (std::size_t attempts = 0; tau < tau1;) {
        if (++attempts > opt.max_steps) fail(who, k, tau, "step budget exhausted");
        if (opt.max_step > 0.0 && h > opt.max_step) h = opt.max_step;
        const double target = next < stops.size() ? stops[next] : tau1;
        const bool lands = h >= target - tau;
        const double hs = lands ? target - tau : h;
        if (!(hs > 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(tau), 1.0)))
            fail(who, k, tau, "step size underflow");

        for (int i = 0; i < 2; ++i) yt[i] = y[i] + hs * (a21 * k1[i]);
        rhs(tau + c2 * hs, yt, k2);
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        rhs(tau + c3 * hs, yt, k3);
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(tau + c4 * hs, yt, k4);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(tau + c5 * hs, yt, k5);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] +
                    hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(tau + hs, yt, k6);
        for (int i = 0; i < 2; ++i)
            y5[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(tau + hs, y5, k7);

        double sum = 0.0;
        for (int i = 0; i < 2; ++i) {
            e[i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                         d7 * k7[i]);
            const double sre =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i].real()), std::abs(y5[i].real()));
            const double sim =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i].imag()), std::abs(y5[i].imag()));
            sum += (e[i].real() / sre) * (e[i].real() / sre) +
                   (e[i].imag() / sim) * (e[i].imag() / sim);
        }
        const double err = std::sqrt(sum / 4.0);

        if (err <= 1.0) {
            tau = lands ? target : tau + hs;
            y = y5;
            k1 = k7;
            ++accepted;
            const bool at_stop = lands && next < stops.size() && stops[next] == target;
            observe(at_stop ? next : npos, tau, y);
            if (at_stop) ++next;
            double fac = 0.9 * std::pow(std::max(err, 1e-12), -0.2);
            fac = std::min(fac, rejected ? 1.0 : 5.0);
            h = hs * std::max(fac, 0.2);
            rejected = false;
        } else {
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
            h = hs * fac;
            rejected = true;
        }
    }
}

}  // namespace

ModeSolution integrate_mode(const MassProfile& m2, double k, double tau0, double tau1,
                            const IntegratorOptions& opt) {
    const char* who = "integrate_mode";
    const auto stops = checked_stops(who, tau0, tau1, opt);
    const double omega = checked_omega(who, m2, k, tau0, tau1);

    ModeSolution sol;
    sol.k = k;
    sol.tau0 = tau0;
    sol.tau1 = tau1;
    sol.omega_in = omega;
    sol.tau.reserve(stops.size());
    sol.chi_at.reserve(stops.size());
    sol.dchi_at.reserve(stops.size());

    State y;
    y[0] = std::polar(1.0 / std::sqrt(2.0 * omega), -omega * tau0);
    y[1] = cplx(0.0, -omega) * y[0];

    auto rhs = [&m2, k](double t, const State& s, State& ds) {
        ds[0] = s[1];
        ds[1] = -(k * k + m2(t)) * s[0];
    };
    auto observe = [&sol](std::size_t stop, double t, const State& s) {
        const double w = mode_wronskian(s[0], s[1]);
        sol.wronskian_defect = std::max(sol.wronskian_defect, std::abs(w - 1.0));
        if (stop != npos) {
            sol.tau.push_back(t);
            sol.chi_at.push_back(s[0]);
            sol.dchi_at.push_back(s[1]);
        }
    };
    drive(who, k, tau0, tau1, opt, stops, 0.05 / std::max(omega, 1e-2), rhs, y, sol.steps,
          observe);
    sol.chi = y[0];
    sol.dchi = y[1];
    return sol;
}

ModeSolution integrate_mode_curved(const ScaleFactorProfile& scale, double m2, double k,
                                   double tau0, double tau1, const IntegratorOptions& opt) {
    const char* who = "integrate_mode_curved";
    const auto stops = checked_stops(who, tau0, tau1, opt);
    auto eff = [&scale, m2](double t) { return effective_mass_conformal(scale, m2, t); };
    const double omega = checked_omega(who, eff, k, tau0, tau1);

    ModeSolution sol;
    sol.k = k;
    sol.tau0 = tau0;
    sol.tau1 = tau1;
    sol.omega_in = omega;
    sol.tau.reserve(stops.size());
    sol.chi_at.reserve(stops.size());
    sol.dchi_at.reserve(stops.size());

    // same positive-frequency state as the flat route, expressed in f = chi/a
    const double a0 = scale.a_conf(tau0), da0 = scale.da_conf(tau0);
    const cplx chi0 = std::polar(1.0 / std::sqrt(2.0 * omega), -omega * tau0);
    const cplx dchi0 = cplx(0.0, -omega) * chi0;
    State y;
    y[0] = chi0 / a0;
    y[1] = (dchi0 - (da0 / a0) * chi0) / a0;

    auto rhs = [&scale, m2, k](double t, const State& s, State& ds) {
        const double a = scale.a_conf(t);
        const double da = scale.da_conf(t);
        ds[0] = s[1];
        ds[1] = -2.0 * (da / a) * s[1] - (k * k + a * a * m2) * s[0];
    };
    auto observe = [&sol, &scale](std::size_t stop, double t, const State& s) {
        const double a = scale.a_conf(t), da = scale.da_conf(t);
        const cplx chi = a * s[0];
        const cplx dchi = da * s[0] + a * s[1];
        const double w = mode_wronskian(chi, dchi);
        sol.wronskian_defect = std::max(sol.wronskian_defect, std::abs(w - 1.0));
        if (stop != npos) {
            sol.tau.push_back(t);
            sol.chi_at.push_back(chi);
            sol.dchi_at.push_back(dchi);
        }
    };
    drive(who, k, tau0, tau1, opt, stops, 0.05 / std::max(omega, 1e-2), rhs, y, sol.steps,
          observe);
    const double a1 = scale.a_conf(tau1), da1 = scale.da_conf(tau1);
    sol.chi = a1 * y[0];
    sol.dchi = da1 * y[0] + a1 * y[1];
    return sol;
}

}  // namespace confkg
