#include "confkg/geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace confkg {

namespace detail {

double TanhSquared::s(double tau) const { return A + B * std::tanh(rho * tau); }

double TanhSquared::ds(double tau) const {
    const double c = std::cosh(rho * tau);
    if (std::isinf(c)) return 0.0;
    return B * rho / (c * c);
}

double TanhSquared::dds(double tau) const {
    const double c = std::cosh(rho * tau);
    if (std::isinf(c)) return 0.0;
    return -2.0 * B * rho * rho * std::tanh(rho * tau) / (c * c);
}

namespace {

// one-dimensional second-order stencils along a line of samples
template <class Get>
double fd1(Get f, std::size_t i, std::size_t n, double h) {
    if (i == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
    if (i == n - 1) return (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h);
    return (f(i + 1) - f(i - 1)) / (2.0 * h);
}

template <class Get>
double fd2(Get f, std::size_t i, std::size_t n, double h) {
    if (i == 0) {
        if (n >= 4) return (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / (h * h);
        return (f(0) - 2.0 * f(1) + f(2)) / (h * h);
    }
    if (i == n - 1) {
        if (n >= 4) return (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) / (h * h);
        return (f(n - 1) - 2.0 * f(n - 2) + f(n - 3)) / (h * h);
    }
    return (f(i + 1) - 2.0 * f(i) + f(i - 1)) / (h * h);
}

} // namespace

double SampledSurface::d_time(std::size_t i, std::size_t j) const {
    return fd1([&](std::size_t k) { return at(k, j); }, i, grid.nt, grid.dt);
}

double SampledSurface::d_x(std::size_t i, std::size_t j) const {
    return fd1([&](std::size_t k) { return at(i, k); }, j, grid.nx, grid.dx);
}

double SampledSurface::dd_time(std::size_t i, std::size_t j) const {
    return fd2([&](std::size_t k) { return at(k, j); }, i, grid.nt, grid.dt);
}

double SampledSurface::dd_x(std::size_t i, std::size_t j) const {
    return fd2([&](std::size_t k) { return at(i, k); }, j, grid.nx, grid.dx);
}

} // namespace detail

// ---------------------------------------------------------------------------
// ScaleFactorProfile

ScaleFactorProfile ScaleFactorProfile::constant(double a0) {
    if (!(a0 > 0.0)) throw std::domain_error("ScaleFactorProfile: scale factor must be positive");
    ScaleFactorProfile p;
    p.kind_ = Kind::constant;
    p.a0_ = a0;
    p.a_in_ = p.a_out_ = a0;
    return p;
}

ScaleFactorProfile ScaleFactorProfile::exponential(double hubble) {
    ScaleFactorProfile p;
    p.kind_ = Kind::exponential;
    p.hubble_ = hubble;
    return p;
}

ScaleFactorProfile ScaleFactorProfile::tanh_step(double a_in, double a_out, double rho) {
    if (!(a_in > 0.0) || !(a_out > 0.0))
        throw std::domain_error("ScaleFactorProfile: asymptotic scale factors must be positive");
    if (!(rho > 0.0)) throw std::invalid_argument("ScaleFactorProfile: rho must be positive");
    ScaleFactorProfile p;
    p.kind_ = Kind::tanh;
    p.a_in_ = a_in;
    p.a_out_ = a_out;
    p.ts_ = {0.5 * (a_out * a_out + a_in * a_in), 0.5 * (a_out * a_out - a_in * a_in), rho};
    return p;
}

ScaleFactorProfile ScaleFactorProfile::sampled(std::vector<double> values, double tau0, double dtau) {
    if (values.size() < 3)
        throw std::invalid_argument("ScaleFactorProfile: sampled profile needs at least 3 points");
    if (!(dtau > 0.0)) throw std::invalid_argument("ScaleFactorProfile: dtau must be positive");
    for (double v : values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::domain_error("ScaleFactorProfile: sampled scale factor must be positive and finite");
    ScaleFactorProfile p;
    p.kind_ = Kind::sampled;
    p.a_in_ = values.front();
    p.a_out_ = values.back();
    p.samples_ = std::move(values);
    p.tau0_ = tau0;
    p.dtau_ = dtau;
    return p;
}

double ScaleFactorProfile::a_cosmic(double t) const {
    switch (kind_) {
        case Kind::constant: return a0_;
        case Kind::exponential: return std::exp(hubble_ * t);
        default:
            throw std::invalid_argument("ScaleFactorProfile: profile is not a function of cosmic time");
    }
}

double ScaleFactorProfile::adot_cosmic(double t) const {
    switch (kind_) {
        case Kind::constant: return 0.0;
        case Kind::exponential: return hubble_ * std::exp(hubble_ * t);
        default:
            throw std::invalid_argument("ScaleFactorProfile: profile is not a function of cosmic time");
    }
}

void ScaleFactorProfile::stencil(double tau, double& val, double& d1, double& d2) const {
    const std::size_t n = samples_.size();
    double u = (tau - tau0_) / dtau_;
    if (u < -0.5 || u > static_cast<double>(n - 1) + 0.5)
        throw std::domain_error("ScaleFactorProfile: tau outside the sampled range");
    std::size_t c = static_cast<std::size_t>(std::clamp(std::llround(u), 1ll, static_cast<long long>(n - 2)));
    // local quadratic through the three nodes around c
    const double fm = samples_[c - 1], f0 = samples_[c], fp = samples_[c + 1];
    d1 = (fp - fm) / (2.0 * dtau_);
    d2 = (fp - 2.0 * f0 + fm) / (dtau_ * dtau_);
    const double e = tau - (tau0_ + static_cast<double>(c) * dtau_);
    val = f0 + e * d1 + 0.5 * e * e * d2;
    d1 += e * d2;
}

double ScaleFactorProfile::a_conf(double tau) const {
    switch (kind_) {
        case Kind::constant: return a0_;
        case Kind::tanh: return std::sqrt(ts_.s(tau));
        case Kind::exponential: {
            const double q = 1.0 - hubble_ * tau;
            if (!(q > 0.0))
                throw std::domain_error("ScaleFactorProfile: conformal time beyond the horizon 1/H");
            return 1.0 / q;
        }
        case Kind::sampled: {
            double v, d1, d2;
            stencil(tau, v, d1, d2);
            return v;
        }
    }
    return a0_;
}

double ScaleFactorProfile::da_conf(double tau) const {
    switch (kind_) {
        case Kind::constant: return 0.0;
        case Kind::tanh: return ts_.ds(tau) / (2.0 * std::sqrt(ts_.s(tau)));
        case Kind::exponential: {
            const double a = a_conf(tau);
            return hubble_ * a * a;
        }
        case Kind::sampled: {
            double v, d1, d2;
            stencil(tau, v, d1, d2);
            return d1;
        }
    }
    return 0.0;
}

double ScaleFactorProfile::dda_conf(double tau) const {
    switch (kind_) {
        case Kind::constant: return 0.0;
        case Kind::tanh: {
            const double s = ts_.s(tau), ds = ts_.ds(tau), dds = ts_.dds(tau);
            const double r = std::sqrt(s);
            return dds / (2.0 * r) - ds * ds / (4.0 * s * r);
        }
        case Kind::exponential: {
            const double a = a_conf(tau);
            return 2.0 * hubble_ * hubble_ * a * a * a;
        }
        case Kind::sampled: {
            double v, d1, d2;
            stencil(tau, v, d1, d2);
            return d2;
        }
    }
    return 0.0;
}

double ScaleFactorProfile::a_in() const {
    if (kind_ == Kind::exponential)
        throw std::invalid_argument("ScaleFactorProfile: exponential expansion has no static asymptote");
    return a_in_;
}

double ScaleFactorProfile::a_out() const {
    if (kind_ == Kind::exponential)
        throw std::invalid_argument("ScaleFactorProfile: exponential expansion has no static asymptote");
    return a_out_;
}

double ScaleFactorProfile::hubble() const {
    switch (kind_) {
        case Kind::constant: return 0.0;
        case Kind::exponential: return hubble_;
        default:
            throw std::invalid_argument("ScaleFactorProfile: no constant expansion rate for this kind");
    }
}

double ScaleFactorProfile::rho() const {
    if (kind_ != Kind::tanh) throw std::invalid_argument("ScaleFactorProfile: rho is a tanh parameter");
    return ts_.rho;
}

// ---------------------------------------------------------------------------
// ConformalFactor

ConformalFactor ConformalFactor::unit() { return ConformalFactor(); }

ConformalFactor ConformalFactor::exponential(double h) {
    ConformalFactor f;
    f.kind_ = Kind::exponential;
    f.h_ = h;
    return f;
}

ConformalFactor ConformalFactor::tanh_step(double a_in, double a_out, double rho) {
    if (!(a_in > 0.0) || !(a_out > 0.0))
        throw std::domain_error("ConformalFactor: tanh asymptotes must be positive");
    if (!(rho > 0.0)) throw std::invalid_argument("ConformalFactor: rho must be positive");
    ConformalFactor f;
    f.kind_ = Kind::tanh;
    f.a_in_ = a_in;
    f.a_out_ = a_out;
    f.ts_ = {0.5 * (a_out * a_out + a_in * a_in), 0.5 * (a_out * a_out - a_in * a_in), rho};
    f.power_ = 1;
    return f;
}

ConformalFactor ConformalFactor::sampled(GridSpec grid, std::vector<double> values) {
    grid.validate(3, "ConformalFactor");
    if (values.size() != grid.size())
        throw std::invalid_argument("ConformalFactor: value count does not match the grid");
    for (double v : values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::domain_error("ConformalFactor: conformal factor must be positive and finite");
    ConformalFactor f;
    f.kind_ = Kind::sampled;
    f.surf_ = {grid, std::move(values)};
    return f;
}

double ConformalFactor::exponent() const {
    if (kind_ == Kind::unit) return 0.0;
    if (kind_ != Kind::exponential)
        throw std::invalid_argument("ConformalFactor: exponent is defined for the exponential kind");
    return h_;
}

void ConformalFactor::node_of(double time, double x, std::size_t& i, std::size_t& j) const {
    const GridSpec& g = surf_.grid;
    const double ui = (time - g.t0) / g.dt;
    const double uj = (x - g.x0) / g.dx;
    const long long ii = std::llround(ui), jj = std::llround(uj);
    if (ii < 0 || jj < 0 || ii >= static_cast<long long>(g.nt) || jj >= static_cast<long long>(g.nx) ||
        std::abs(ui - static_cast<double>(ii)) > 1e-6 || std::abs(uj - static_cast<double>(jj)) > 1e-6)
        throw std::invalid_argument("ConformalFactor: sampled factors are evaluated on grid nodes only");
    i = static_cast<std::size_t>(ii);
    j = static_cast<std::size_t>(jj);
}

double ConformalFactor::value(double time, double x) const {
    switch (kind_) {
        case Kind::unit: return 1.0;
        case Kind::exponential: return std::exp(h_ * time);
        case Kind::tanh: return power_ > 0 ? std::sqrt(ts_.s(time)) : 1.0 / std::sqrt(ts_.s(time));
        case Kind::sampled: {
            std::size_t i, j;
            node_of(time, x, i, j);
            return surf_.at(i, j);
        }
    }
    return 1.0;
}

double ConformalFactor::d_time(double time, double x) const {
    switch (kind_) {
        case Kind::unit: return 0.0;
        case Kind::exponential: return h_ * std::exp(h_ * time);
        case Kind::tanh: {
            const double q = 0.5 * power_;
            return q * std::pow(ts_.s(time), q - 1.0) * ts_.ds(time);
        }
        case Kind::sampled: {
            std::size_t i, j;
            node_of(time, x, i, j);
            return surf_.d_time(i, j);
        }
    }
    return 0.0;
}

double ConformalFactor::d_x(double time, double x) const {
    if (kind_ != Kind::sampled) return 0.0;
    std::size_t i, j;
    node_of(time, x, i, j);
    return surf_.d_x(i, j);
}

double ConformalFactor::dd_time(double time, double x) const {
    switch (kind_) {
        case Kind::unit: return 0.0;
        case Kind::exponential: return h_ * h_ * std::exp(h_ * time);
        case Kind::tanh: {
            const double q = 0.5 * power_;
            const double s = ts_.s(time), ds = ts_.ds(time);
            return q * (q - 1.0) * std::pow(s, q - 2.0) * ds * ds + q * std::pow(s, q - 1.0) * ts_.dds(time);
        }
        case Kind::sampled: {
            std::size_t i, j;
            node_of(time, x, i, j);
            return surf_.dd_time(i, j);
        }
    }
    return 0.0;
}

double ConformalFactor::dd_x(double time, double x) const {
    if (kind_ != Kind::sampled) return 0.0;
    std::size_t i, j;
    node_of(time, x, i, j);
    return surf_.dd_x(i, j);
}

const GridSpec& ConformalFactor::grid() const {
    if (kind_ != Kind::sampled) throw std::invalid_argument("ConformalFactor: no grid for closed-form kinds");
    return surf_.grid;
}

const std::vector<double>& ConformalFactor::values() const {
    if (kind_ != Kind::sampled) throw std::invalid_argument("ConformalFactor: no samples for closed-form kinds");
    return surf_.v;
}

ConformalFactor ConformalFactor::sample_to(const GridSpec& g) const {
    if (kind_ == Kind::sampled) {
        if (!surf_.grid.congruent(g))
            throw std::invalid_argument("ConformalFactor: sampled factor lives on an incongruent grid");
        return *this;
    }
    if (kind_ == Kind::exponential)
        throw std::invalid_argument("ConformalFactor: exponential factors live in cosmic time, not on conformal grids");
    std::vector<double> vals(g.size());
    for (std::size_t i = 0; i < g.nt; ++i)
        for (std::size_t j = 0; j < g.nx; ++j) {
            double v = kind_ == Kind::unit
                           ? 1.0
                           : (power_ > 0 ? std::sqrt(ts_.s(g.time(i))) : 1.0 / std::sqrt(ts_.s(g.time(i))));
            vals[g.index(i, j)] = v;
        }
    return ConformalFactor::sampled(g, std::move(vals));
}

double ConformalFactor::tanh_a_in() const {
    if (kind_ != Kind::tanh) throw std::invalid_argument("ConformalFactor: not a tanh factor");
    return a_in_;
}

double ConformalFactor::tanh_a_out() const {
    if (kind_ != Kind::tanh) throw std::invalid_argument("ConformalFactor: not a tanh factor");
    return a_out_;
}

double ConformalFactor::tanh_rho() const {
    if (kind_ != Kind::tanh) throw std::invalid_argument("ConformalFactor: not a tanh factor");
    return ts_.rho;
}

int ConformalFactor::tanh_power() const {
    if (kind_ != Kind::tanh) throw std::invalid_argument("ConformalFactor: not a tanh factor");
    return power_;
}

ConformalFactor compose(const ConformalFactor& first, const ConformalFactor& second) {
    using Kind = ConformalFactor::Kind;
    if (first.kind_ == Kind::unit) return second;
    if (second.kind_ == Kind::unit) return first;
    if (first.kind_ == Kind::exponential && second.kind_ == Kind::exponential)
        return ConformalFactor::exponential(first.h_ + second.h_);
    if (first.kind_ == Kind::sampled && second.kind_ == Kind::sampled) {
        if (!first.surf_.grid.congruent(second.surf_.grid))
            throw std::invalid_argument("compose: sampled conformal factors live on incongruent grids");
        std::vector<double> prod(first.surf_.v.size());
        for (std::size_t n = 0; n < prod.size(); ++n) prod[n] = first.surf_.v[n] * second.surf_.v[n];
        return ConformalFactor::sampled(first.surf_.grid, std::move(prod));
    }
    throw std::invalid_argument("compose: incompatible conformal factor representations");
}

ConformalFactor invert(const ConformalFactor& f) {
    using Kind = ConformalFactor::Kind;
    switch (f.kind_) {
        case Kind::unit: return f;
        case Kind::exponential: return ConformalFactor::exponential(-f.h_);
        case Kind::tanh: {
            ConformalFactor g = f;
            g.power_ = -f.power_;
            return g;
        }
        case Kind::sampled: {
            std::vector<double> rec(f.surf_.v.size());
            for (std::size_t n = 0; n < rec.size(); ++n) rec[n] = 1.0 / f.surf_.v[n];
            return ConformalFactor::sampled(f.surf_.grid, std::move(rec));
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// metric-level operations

FLRWMetric FLRWMetric::from_profile(const ScaleFactorProfile& s) {
    FLRWMetric m{s, 0.0};
    if (s.kind() == ScaleFactorProfile::Kind::exponential) m.hubble = s.hubble();
    return m;
}

double conformal_time(const ScaleFactorProfile& scale, double t, double t_ref) {
    if (t == t_ref) return 0.0;
    auto integrand = [&](double u) {
        const double a = scale.a_cosmic(u);
        if (!(a > 0.0)) throw std::domain_error("conformal_time: non-positive scale factor on the range");
        return 1.0 / a;
    };
    const double lo = std::min(t_ref, t), hi = std::max(t_ref, t);
    double err = 0.0;
    double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, lo, hi, 15, 1e-14, &err);
    if (err > 1e-12) {
        // the Kronrod estimate is very conservative on short smooth intervals;
        // accept only if an independent higher-order rule agrees to 1e-12
        double err2 = 0.0;
        const double val2 =
            boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 15, 1e-14, &err2);
        if (std::abs(val2 - val) > 1e-12 && err2 > 1e-12)
            throw std::runtime_error("conformal_time: quadrature did not reach the requested 1e-12 tolerance");
        val = val2;
    }
    return t >= t_ref ? val : -val;
}

Christoffel christoffel(const FLRWMetric& metric, const std::array<double, 4>& x) {
    const double t = x[0];
    const double a = metric.scale.a_cosmic(t);
    const double adot = metric.scale.adot_cosmic(t);
    Christoffel g{};
    for (auto& plane : g)
        for (auto& row : plane) row.fill(0.0);
    for (int i = 1; i < 4; ++i) {
        g[0][i][i] = a * adot;
        g[i][0][i] = g[i][i][0] = adot / a;
    }
    return g;
}

double effective_mass_flrw(double m2, double hubble, double t) {
    return std::exp(2.0 * hubble * t) * (m2 - 2.0 * hubble * hubble);
}

double effective_mass_conformal(const ScaleFactorProfile& scale, double m2, double tau) {
    const double a = scale.a_conf(tau);
    return a * a * m2 - scale.dda_conf(tau) / a;
}

} // namespace confkg
