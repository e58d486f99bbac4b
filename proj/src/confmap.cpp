#include "confkg/confmap.hpp"

#include <cmath>
#include <stdexcept>

namespace confkg {

std::pair<double, double> apply_conformal_flrw(double h, double H1, double m1_2, double t) {
    const double H2 = H1 + h;
    const double mass = std::exp(-2.0 * h * t) * (m1_2 - 2.0 * H1 * H1) + 2.0 * H2 * H2;
    return {H2, mass};
}

double exp_conformal_time(double hubble, double t) {
    if (hubble == 0.0) return t;
    return -std::expm1(-hubble * t) / hubble;
}

double exp_cosmic_time(double hubble, double tau) {
    if (hubble == 0.0) return tau;
    if (!(hubble * tau < 1.0))
        throw std::domain_error("exp_cosmic_time: conformal time beyond the horizon 1/H");
    return -std::log1p(-hubble * tau) / hubble;
}

ExpFamilyTriple::ExpFamilyTriple(double hubble, double mass_amplitude, double mass_rate,
                                 std::function<std::complex<double>(double, double)> base_field)
    : hubble_(hubble), amplitude_(mass_amplitude), rate_(mass_rate), shift_(0.0),
      base_(std::move(base_field)) {
    if (!std::isfinite(hubble_) || !std::isfinite(amplitude_) || !std::isfinite(rate_))
        throw std::invalid_argument("ExpFamilyTriple: parameters must be finite");
    if (!base_) throw std::invalid_argument("ExpFamilyTriple: a base field is required");
}

ExpFamilyTriple ExpFamilyTriple::shifted(double h) const {
    if (!std::isfinite(h)) throw std::invalid_argument("ExpFamilyTriple: shift must be finite");
    ExpFamilyTriple out = *this;
    out.hubble_ = hubble_ + h;
    out.rate_ = rate_ + h;
    out.shift_ = shift_ + h;
    return out;
}

double ExpFamilyTriple::mass2(double t) const {
    return amplitude_ * std::exp(-2.0 * rate_ * t) + 2.0 * hubble_ * hubble_;
}

std::complex<double> ExpFamilyTriple::field(double t, double x) const {
    if (shift_ == 0.0) return base_(t, x);
    return std::exp(-shift_ * t) * base_(t, x);
}

ScaleFactorProfile ExpFamilyTriple::scale() const {
    return hubble_ == 0.0 ? ScaleFactorProfile::constant(1.0)
                          : ScaleFactorProfile::exponential(hubble_);
}

GridField ExpFamilyTriple::sample_field(const GridSpec& g) const {
    return GridField::sample(g, Chart::cosmic_flrw,
                             [this](double t, double x) { return field(t, x); });
}

ConformalTriple ConformalTriple::make(ConformalFactor rep, GridField phi,
                                      std::vector<double> mass2) {
    if (phi.chart != Chart::conformal_flat)
        throw std::invalid_argument("ConformalTriple: the field must live on the conformal chart");
    if (mass2.size() != phi.grid.size())
        throw std::invalid_argument("ConformalTriple: mass grid does not match the field grid");
    for (double m : mass2)
        if (!std::isfinite(m))
            throw std::invalid_argument("ConformalTriple: mass values must be finite");
    if (rep.kind() == ConformalFactor::Kind::exponential)
        throw std::invalid_argument(
            "ConformalTriple: exponential factors describe cosmic time, not this chart");
    if (rep.kind() == ConformalFactor::Kind::sampled && !rep.grid().congruent(phi.grid))
        throw std::invalid_argument("ConformalTriple: factor and field grids are not congruent");
    return ConformalTriple{std::move(rep), std::move(phi), std::move(mass2)};
}

ConformalTriple apply_conformal(const ConformalTriple& triple, const ConformalFactor& omega) {
    if (omega.kind() == ConformalFactor::Kind::exponential)
        throw std::invalid_argument(
            "apply_conformal: exponential factors describe cosmic time, not this chart");
    if (omega.is_unit()) return triple;

    const GridSpec& g = triple.phi.grid;
    if (omega.kind() == ConformalFactor::Kind::sampled && !omega.grid().congruent(g))
        throw std::invalid_argument("apply_conformal: factor grid is not congruent with the field");

    const ConformalFactor& w = triple.rep;
    ConformalTriple out{compose(w.sample_to(g), omega.sample_to(g)),
                        GridField::zeros(g, Chart::conformal_flat),
                        std::vector<double>(g.size())};
    for (std::size_t i = 0; i < g.nt; ++i) {
        const double tau = g.time(i);
        for (std::size_t j = 0; j < g.nx; ++j) {
            const double x = g.x(j);
            const double om = omega.value(tau, x);
            const double box = -omega.dd_time(tau, x) + omega.dd_x(tau, x);
            const double wv = w.value(tau, x);
            // eta^{rs} d_s(ln w) d_r Omega with signature (-, +)
            const double grad = (-w.d_time(tau, x) * omega.d_time(tau, x) +
                                 w.d_x(tau, x) * omega.d_x(tau, x)) /
                                wv;
            const std::size_t n = g.index(i, j);
            out.mass2[n] =
                (triple.mass2[n] - (box + 2.0 * grad) / (wv * wv * om)) / (om * om);
            out.phi.v[n] = triple.phi.v[n] / om;
        }
    }
    return out;
}

}  // namespace confkg
