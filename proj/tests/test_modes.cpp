#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "confkg/modes.hpp"

#include <cmath>
#include <complex>

using namespace confkg;
using cplx = std::complex<double>;

namespace {

cplx plane_wave(double omega, double tau) {
    return std::polar(1.0 / std::sqrt(2.0 * omega), -omega * tau);
}

}  // namespace

TEST_CASE("mass profiles evaluate their closed forms") {
    auto flat = MassProfile::constant(-0.75);
    CHECK(flat(0.0) == -0.75);
    CHECK(flat(123.0) == -0.75);

    auto step = MassProfile::tanh_transition(1.0, 2.0, 1.0, 1.0);
    CHECK(step(-40.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(step(40.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(step(0.0) == doctest::Approx(2.5).epsilon(1e-14));

    // a = 2, m^2 = 1/4: a^2 m^2 = 1 with no curvature correction
    auto curved = MassProfile::from_scale(ScaleFactorProfile::constant(2.0), 0.25);
    CHECK(curved(-3.0) == 1.0);
    CHECK(curved(17.5) == 1.0);

    CHECK_THROWS_AS(MassProfile::tanh_transition(-1.0, 2.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(MassProfile::tanh_transition(1.0, 2.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("constant mass reproduces the plane wave") {
    auto m2 = MassProfile::constant(3.0);
    const double k = 1.0;  // omega = 2
    IntegratorOptions opt;
    opt.rel_tol = 1e-12;
    opt.checkpoints = {-2.5, 0.0, 1.25, 6.0};
    auto sol = integrate_mode(m2, k, -5.0, 7.0, opt);

    CHECK(sol.omega_in == 2.0);
    CHECK(sol.steps > 10);
    REQUIRE(sol.tau.size() == 4);
    for (std::size_t i = 0; i < sol.tau.size(); ++i) {
        CHECK(std::abs(sol.chi_at[i] - plane_wave(2.0, sol.tau[i])) < 1e-10);
        CHECK(std::abs(sol.dchi_at[i] - cplx(0.0, -2.0) * plane_wave(2.0, sol.tau[i])) < 1e-10);
    }
    CHECK(std::abs(sol.chi - plane_wave(2.0, 7.0)) < 1e-10);
    CHECK(std::abs(sol.dchi - cplx(0.0, -2.0) * plane_wave(2.0, 7.0)) < 1e-10);
    CHECK(sol.wronskian_defect < 1e-10);
}

TEST_CASE("checkpoint state matches a run that ends there bitwise") {
    // steps are clamped to the next checkpoint only, never to later times, so
    // the trajectory up to an interior time cannot depend on what follows
    auto m2 = MassProfile::tanh_transition(1.0, 3.0, 0.5, 1.2);
    const double tc = 2.75;
    IntegratorOptions opt;
    opt.checkpoints = {tc};
    auto full = integrate_mode(m2, 0.8, -20.0, 20.0, opt);
    auto part = integrate_mode(m2, 0.8, -20.0, tc);

    REQUIRE(full.tau.size() == 1);
    CHECK(full.tau[0] == tc);
    CHECK(full.chi_at[0].real() == part.chi.real());
    CHECK(full.chi_at[0].imag() == part.chi.imag());
    CHECK(full.dchi_at[0].real() == part.dchi.real());
    CHECK(full.dchi_at[0].imag() == part.dchi.imag());
}

TEST_CASE("normalization is conserved through a smooth transition") {
    // the defect tracks the local tolerance times the accumulated phase
    auto m2 = MassProfile::tanh_transition(1.0, 2.0, 1.0, 1.0);
    for (double k : {0.1, 0.7, 3.0, 10.0}) {
        auto sol = integrate_mode(m2, k, -26.0, 26.0);
        CHECK(sol.wronskian_defect < 5e-8);

        IntegratorOptions tight;
        tight.rel_tol = 1e-12;
        auto fine = integrate_mode(m2, k, -26.0, 26.0, tight);
        CHECK(fine.wronskian_defect < 5e-10);
        CHECK(std::abs(mode_wronskian(fine.chi, fine.dchi) - 1.0) < 5e-10);
    }
}

TEST_CASE("rescaling mass, rate and wavenumber rescales the mode") {
    // M^2 -> s^2 M^2(s tau), k -> s k maps chi(tau) -> chi_s(tau) = chi(s tau)/sqrt(s)
    const double s = 1.7, k = 0.9, rho = 0.8, m2 = 1.1;
    const double tau1 = 25.0, tc = 10.0;

    IntegratorOptions opt;
    opt.rel_tol = 1e-12;
    opt.checkpoints = {tc};
    auto base =
        integrate_mode(MassProfile::tanh_transition(1.0, 2.0, rho, m2), k, -tau1, tau1, opt);

    IntegratorOptions sopt;
    sopt.rel_tol = 1e-12;
    sopt.checkpoints = {tc / s};
    auto scaled = integrate_mode(MassProfile::tanh_transition(1.0, 2.0, s * rho, s * s * m2),
                                 s * k, -tau1 / s, tau1 / s, sopt);

    const double rt = std::sqrt(s);
    CHECK(std::abs(scaled.omega_in - s * base.omega_in) < 1e-12);
    CHECK(std::abs(rt * scaled.chi_at[0] - base.chi_at[0]) < 2e-9);
    CHECK(std::abs(rt * scaled.dchi_at[0] / s - base.dchi_at[0]) < 2e-9);
    CHECK(std::abs(rt * scaled.chi - base.chi) < 2e-9);
    CHECK(std::abs(rt * scaled.dchi / s - base.dchi) < 2e-9);
}

TEST_CASE("friction form and flat oscillator form agree on the same mode") {
    auto scale = ScaleFactorProfile::tanh_step(1.0, 2.0, 1.0);
    const double m2 = 1.0, tau0 = -20.0, tau1 = 20.0;
    IntegratorOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-13;

    for (double k : {0.5, 1.0, 2.5}) {
        auto flat = integrate_mode(MassProfile::from_scale(scale, m2), k, tau0, tau1, opt);
        auto curved = integrate_mode_curved(scale, m2, k, tau0, tau1, opt);
        CHECK(flat.omega_in == curved.omega_in);
        CHECK(std::abs(flat.chi - curved.chi) < 1e-9);
        CHECK(std::abs(flat.dchi - curved.dchi) < 1e-9);
        CHECK(curved.wronskian_defect < 1e-9);
    }
}

TEST_CASE("non-oscillatory start is rejected") {
    CHECK_THROWS_AS(integrate_mode(MassProfile::constant(-4.0), 1.0, 0.0, 10.0),
                    std::domain_error);
    // k^2 + M^2 = 0 exactly is no good either
    CHECK_THROWS_AS(integrate_mode(MassProfile::constant(-0.25), 0.5, 0.0, 10.0),
                    std::domain_error);
}

TEST_CASE("starting inside the transition is rejected") {
    auto m2 = MassProfile::tanh_transition(1.0, 2.0, 1.0, 1.0);
    CHECK_THROWS_AS(integrate_mode(m2, 0.3, 0.0, 20.0), std::domain_error);
    CHECK_NOTHROW(integrate_mode(m2, 0.3, -25.0, 20.0));
}

TEST_CASE("bad options are rejected up front") {
    auto m2 = MassProfile::constant(1.0);
    CHECK_THROWS_AS(integrate_mode(m2, 1.0, 5.0, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate_mode(m2, 1.0, 5.0, 1.0), std::invalid_argument);

    IntegratorOptions opt;
    opt.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate_mode(m2, 1.0, 0.0, 1.0, opt), std::invalid_argument);

    IntegratorOptions cp;
    cp.checkpoints = {12.0};
    CHECK_THROWS_AS(integrate_mode(m2, 1.0, 0.0, 10.0, cp), std::invalid_argument);

    IntegratorOptions budget;
    budget.max_steps = 10;
    CHECK_THROWS_AS(integrate_mode(m2, 10.0, 0.0, 1000.0, budget), std::runtime_error);
}

TEST_CASE("max_step caps the step size") {
    auto m2 = MassProfile::constant(1.0);
    IntegratorOptions opt;
    opt.max_step = 0.01;
    auto sol = integrate_mode(m2, 1.0, 0.0, 10.0, opt);
    CHECK(sol.steps >= 1000);
    auto loose = integrate_mode(m2, 1.0, 0.0, 10.0);
    CHECK(loose.steps < sol.steps);
}
