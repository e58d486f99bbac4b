#include "confkg/bogoliubov.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace confkg {

namespace {

using cplx = std::complex<double>;

// checks that m2 is flat over one oscillation period ending at tau (probing
// backwards, but never before tau_floor)
void require_static_out(const MassProfile& m2, double k, double tau, double tau_floor,
                        double w2) {
    const double m_out = m2(tau);
    const double period = 2.0 * std::numbers::pi / std::sqrt(w2);
    double drift = 0.0;
    for (int j = 1; j <= 8; ++j) {
        const double tp = std::max(tau - period * j / 8.0, tau_floor);
        drift = std::max(drift, std::abs(m2(tp) - m_out));
    }
    if (drift > 1e-3 * w2) {
        std::ostringstream os;
        os << "extract_bogoliubov: mode k=" << k << ": mass term varies by " << drift
           << " within one oscillation period before the extraction time; extract in a"
              " static region";
        throw std::domain_error(os.str());
    }
}

BogoliubovPair extract_at_time(const ModeSolution& mode, const MassProfile& m2, double tau,
                               cplx chi, cplx dchi) {
    const double w2 = mode.k * mode.k + m2(tau);
    if (!(w2 > 0.0)) {
        std::ostringstream os;
        os << "extract_bogoliubov: mode k=" << mode.k
           << " is not oscillatory at the extraction time (k^2 + M^2 = " << w2 << ")";
        throw std::domain_error(os.str());
    }
    require_static_out(m2, mode.k, tau, mode.tau0, w2);

    BogoliubovPair p = project_onto_plane_waves(chi, dchi, std::sqrt(w2), tau);
    p.k = mode.k;
    p.omega_in = mode.omega_in;
    p.omega_out = std::sqrt(w2);
    return p;
}

// log(sinh x) for x > 0 without overflow
double log_sinh(double x) {
    if (x < 1.0) return std::log(std::sinh(x));
    return x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0);
}

}  // namespace

BogoliubovPair project_onto_plane_waves(cplx chi, cplx dchi, double omega, double tau) {
    if (!(omega > 0.0))
        throw std::domain_error("project_onto_plane_waves: frequency must be positive");
    const cplx u = std::polar(1.0 / std::sqrt(2.0 * omega), -omega * tau);
    const cplx i{0.0, 1.0};
    BogoliubovPair p;
    p.alpha = std::conj(u) * (omega * chi + i * dchi);
    p.beta = u * (omega * chi - i * dchi);
    return p;
}

BogoliubovPair extract_bogoliubov(const ModeSolution& mode, const MassProfile& m2) {
    return extract_at_time(mode, m2, mode.tau1, mode.chi, mode.dchi);
}

BogoliubovPair extract_bogoliubov_at(const ModeSolution& mode, const MassProfile& m2,
                                     std::size_t which) {
    if (which >= mode.tau.size())
        throw std::out_of_range("extract_bogoliubov_at: no such checkpoint");
    return extract_at_time(mode, m2, mode.tau[which], mode.chi_at[which], mode.dchi_at[which]);
}

TanhSpectrumPoint tanh_transition_spectrum(double k, double a_in, double a_out, double rho,
                                           double m2) {
    if (!(a_in > 0.0) || !(a_out > 0.0))
        throw std::domain_error("tanh_transition_spectrum: asymptotes must be positive");
    if (!(rho > 0.0))
        throw std::invalid_argument("tanh_transition_spectrum: rho must be positive");

    const double w2_in = k * k + m2 * a_in * a_in;
    const double w2_out = k * k + m2 * a_out * a_out;
    if (!(w2_in > 0.0) || !(w2_out > 0.0))
        throw std::domain_error(
            "tanh_transition_spectrum: mode is not oscillatory in an asymptotic region");

    TanhSpectrumPoint p;
    p.k = k;
    p.omega_in = std::sqrt(w2_in);
    p.omega_out = std::sqrt(w2_out);

    const double s = std::numbers::pi / rho;
    const double plus = s * (p.omega_out + p.omega_in) / 2.0;
    const double minus = s * std::abs(p.omega_out - p.omega_in) / 2.0;
    const double denom = log_sinh(s * p.omega_in) + log_sinh(s * p.omega_out);
    p.alpha2 = std::exp(2.0 * log_sinh(plus) - denom);
    p.beta2 = minus == 0.0 ? 0.0 : std::exp(2.0 * log_sinh(minus) - denom);
    return p;
}

namespace {

template <class Solve>
Spectrum run_spectrum(const MassProfile& out_mass, const SpectrumRequest& req, Solve solve) {
    const std::size_t n = req.k.size();
    if (n == 0) throw std::invalid_argument("compute_spectrum: empty wavenumber grid");
    for (double k : req.k)
        if (!std::isfinite(k) || k < 0.0)
            throw std::invalid_argument("compute_spectrum: wavenumbers must be finite and >= 0");
    if (!(req.tolerance > 0.0))
        throw std::invalid_argument("compute_spectrum: tolerance must be positive");

    IntegratorOptions opt;
    opt.rel_tol = std::max(req.tolerance * 1e-2, 2.5e-14);
    opt.abs_tol = opt.rel_tol * 1e-2;

    Spectrum out;
    out.k = req.k;
    out.coeff.resize(n);
    out.tolerance = req.tolerance;

    std::vector<double> wdef(n, 0.0);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n) return;
            try {
                auto sol = solve(out.k[i], opt);
                out.coeff[i] = extract_bogoliubov(sol, out_mass);
                wdef[i] = sol.wronskian_defect;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    unsigned want = req.threads ? req.threads : std::thread::hardware_concurrency();
    want = std::max(1u, std::min<unsigned>(want, static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    pool.reserve(want - 1);
    for (unsigned t = 0; t + 1 < want; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);

    for (std::size_t i = 0; i < n; ++i) {
        out.max_unitarity_defect = std::max(out.max_unitarity_defect,
                                            out.coeff[i].unitarity_defect());
        out.max_wronskian_defect = std::max(out.max_wronskian_defect, wdef[i]);
    }
    return out;
}

}  // namespace

Spectrum compute_spectrum(const MassProfile& m2, const SpectrumRequest& req) {
    return run_spectrum(m2, req, [&](double k, const IntegratorOptions& opt) {
        return integrate_mode(m2, k, req.tau0, req.tau1, opt);
    });
}

Spectrum compute_spectrum(const ScaleFactorProfile& scale, double m2,
                          const SpectrumRequest& req) {
    return run_spectrum(MassProfile::from_scale(scale, m2), req,
                        [&](double k, const IntegratorOptions& opt) {
                            return integrate_mode_curved(scale, m2, k, req.tau0, req.tau1, opt);
                        });
}

std::vector<double> log_spaced(double k_min, double k_max, std::size_t n) {
    if (!(k_min > 0.0) || !(k_max > k_min))
        throw std::invalid_argument("log_spaced: need 0 < k_min < k_max");
    if (n < 2) throw std::invalid_argument("log_spaced: need at least two points");
    std::vector<double> k(n);
    const double r = std::log(k_max / k_min);
    for (std::size_t i = 0; i < n; ++i)
        k[i] = k_min * std::exp(r * static_cast<double>(i) / static_cast<double>(n - 1));
    k.front() = k_min;
    k.back() = k_max;
    return k;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
    os << "k,re_alpha,im_alpha,re_beta,im_beta,n_k,unitarity_defect\n";
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << sep;
    };
    for (std::size_t i = 0; i < s.k.size(); ++i) {
        const auto& c = s.coeff[i];
        put(s.k[i], ',');
        put(c.alpha.real(), ',');
        put(c.alpha.imag(), ',');
        put(c.beta.real(), ',');
        put(c.beta.imag(), ',');
        put(c.n_k(), ',');
        put(c.unitarity_defect(), '\n');
    }
}

}  // namespace confkg
