#include "confkg/qrfstate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace confkg {

namespace {

using cplx = std::complex<double>;
using json = nlohmann::json;

bool same_factor(const ConformalFactor& a, const ConformalFactor& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case ConformalFactor::Kind::unit:
            return true;
        case ConformalFactor::Kind::exponential:
            return a.exponent() == b.exponent();
        case ConformalFactor::Kind::tanh:
            return a.tanh_a_in() == b.tanh_a_in() && a.tanh_a_out() == b.tanh_a_out() &&
                   a.tanh_rho() == b.tanh_rho() && a.tanh_power() == b.tanh_power();
        case ConformalFactor::Kind::sampled:
            return a.grid().nt == b.grid().nt && a.grid().nx == b.grid().nx &&
                   a.grid().t0 == b.grid().t0 && a.grid().dt == b.grid().dt &&
                   a.grid().x0 == b.grid().x0 && a.grid().dx == b.grid().dx &&
                   a.values() == b.values();
    }
    return false;
}

[[noreturn]] void fail_branch(const char* who, std::size_t i, const std::string& what) {
    std::ostringstream os;
    os << who << ": branch " << i << ": " << what;
    throw std::domain_error(os.str());
}

}  // namespace

MassLabel MassLabel::constant(double m2) {
    if (!std::isfinite(m2)) throw std::invalid_argument("MassLabel: mass must be finite");
    MassLabel l;
    l.m2_ = m2;
    return l;
}

MassLabel MassLabel::flrw_flat(double m2, double hubble) {
    if (!std::isfinite(m2) || !std::isfinite(hubble))
        throw std::invalid_argument("MassLabel: parameters must be finite");
    MassLabel l;
    l.kind_ = Kind::flrw_flat;
    l.m2_ = m2;
    l.hubble_ = hubble;
    return l;
}

MassLabel MassLabel::induced(double a_in, double a_out, double rho, double m2) {
    if (!std::isfinite(m2)) throw std::invalid_argument("MassLabel: mass must be finite");
    MassLabel l;
    l.kind_ = Kind::induced;
    l.m2_ = m2;
    l.a_in_ = a_in;
    l.a_out_ = a_out;
    l.rho_ = rho;
    l.scale_ = ScaleFactorProfile::tanh_step(a_in, a_out, rho);
    return l;
}

MassLabel MassLabel::dressed(double m2, ConformalFactor omega) {
    if (!std::isfinite(m2)) throw std::invalid_argument("MassLabel: mass must be finite");
    if (omega.kind() != ConformalFactor::Kind::sampled)
        throw std::invalid_argument("MassLabel: dressed labels record a sampled factor");
    MassLabel l;
    l.kind_ = Kind::dressed;
    l.m2_ = m2;
    l.omega_ = std::move(omega);
    return l;
}

double MassLabel::hubble() const {
    if (kind_ != Kind::flrw_flat)
        throw std::logic_error("MassLabel: only flrw_flat labels carry a rate");
    return hubble_;
}

ScaleFactorProfile MassLabel::profile() const {
    if (kind_ != Kind::induced)
        throw std::logic_error("MassLabel: only induced labels carry a scale profile");
    return scale_;
}

double MassLabel::a_in() const {
    if (kind_ != Kind::induced)
        throw std::logic_error("MassLabel: only induced labels carry asymptotes");
    return a_in_;
}

double MassLabel::a_out() const {
    if (kind_ != Kind::induced)
        throw std::logic_error("MassLabel: only induced labels carry asymptotes");
    return a_out_;
}

double MassLabel::rho() const {
    if (kind_ != Kind::induced)
        throw std::logic_error("MassLabel: only induced labels carry a transition rate");
    return rho_;
}

const ConformalFactor& MassLabel::factor() const {
    if (kind_ != Kind::dressed)
        throw std::logic_error("MassLabel: only dressed labels carry a factor");
    return *omega_;
}

double MassLabel::operator()(double t) const {
    switch (kind_) {
        case Kind::constant:
            return m2_;
        case Kind::flrw_flat:
            return effective_mass_flrw(m2_, hubble_, t);
        case Kind::induced:
            return effective_mass_conformal(scale_, m2_, t);
        case Kind::dressed:
            break;
    }
    throw std::domain_error(
        "MassLabel: a dressed mass term lives on a grid and has no pointwise form");
}

bool MassLabel::same_label(const MassLabel& o) const {
    if (kind_ != o.kind_ || m2_ != o.m2_) return false;
    switch (kind_) {
        case Kind::constant:
            return true;
        case Kind::flrw_flat:
            return hubble_ == o.hubble_;
        case Kind::induced:
            return a_in_ == o.a_in_ && a_out_ == o.a_out_ && rho_ == o.rho_;
        case Kind::dressed:
            return same_factor(*omega_, *o.omega_);
    }
    return false;
}

BranchState::BranchState(Frame f, std::vector<Branch> b)
    : frame_(f), branches_(std::move(b)) {}

BranchState BranchState::checked(Frame f, std::vector<Branch> b) {
    if (b.empty()) throw std::invalid_argument("BranchState: no branches");
    double norm = 0.0;
    for (const auto& br : b) {
        if (!std::isfinite(br.amplitude.real()) || !std::isfinite(br.amplitude.imag()))
            throw std::invalid_argument("BranchState: amplitudes must be finite");
        norm += std::norm(br.amplitude);
    }
    if (std::abs(norm - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "BranchState: amplitudes are not normalized (sum of squares " << norm << ")";
        throw std::invalid_argument(os.str());
    }
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = i + 1; j < b.size(); ++j) {
            if (f == Frame::mass_definite && same_factor(b[i].omega, b[j].omega))
                throw std::invalid_argument(
                    "BranchState: superposed metric labels must be distinct");
            if (f == Frame::metric_definite && b[i].mass.same_label(b[j].mass))
                throw std::invalid_argument(
                    "BranchState: superposed mass labels must be distinct");
        }
    return BranchState(f, std::move(b));
}

BranchState BranchState::mass_definite(
    std::vector<std::pair<cplx, ConformalFactor>> metric_branches, double m2) {
    std::vector<Branch> b;
    b.reserve(metric_branches.size());
    for (auto& [amp, omega] : metric_branches)
        b.push_back({amp, std::move(omega), MassLabel::constant(m2)});
    return checked(Frame::mass_definite, std::move(b));
}

BranchState BranchState::metric_definite(
    std::vector<std::pair<cplx, MassLabel>> mass_branches) {
    std::vector<Branch> b;
    b.reserve(mass_branches.size());
    for (auto& [amp, mass] : mass_branches)
        b.push_back({amp, ConformalFactor::unit(), std::move(mass)});
    return checked(Frame::metric_definite, std::move(b));
}

double BranchState::norm2() const {
    double s = 0.0;
    for (const auto& b : branches_) s += std::norm(b.amplitude);
    return s;
}

namespace {

json factor_to_json(const ConformalFactor& f) {
    switch (f.kind()) {
        case ConformalFactor::Kind::unit:
            return json{{"kind", "unit"}};
        case ConformalFactor::Kind::exponential:
            return json{{"kind", "exponential"}, {"rate", f.exponent()}};
        case ConformalFactor::Kind::tanh:
            return json{{"kind", "tanh"},
                        {"a_in", f.tanh_a_in()},
                        {"a_out", f.tanh_a_out()},
                        {"rho", f.tanh_rho()},
                        {"power", f.tanh_power()}};
        case ConformalFactor::Kind::sampled: {
            const GridSpec& g = f.grid();
            return json{{"kind", "sampled"},
                        {"grid",
                         {{"nt", g.nt},
                          {"nx", g.nx},
                          {"t0", g.t0},
                          {"dt", g.dt},
                          {"x0", g.x0},
                          {"dx", g.dx}}},
                        {"values", f.values()}};
        }
    }
    throw std::logic_error("factor_to_json: unreachable");
}

ConformalFactor factor_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "unit") return ConformalFactor::unit();
    if (kind == "exponential") return ConformalFactor::exponential(j.at("rate").get<double>());
    if (kind == "tanh") {
        auto f = ConformalFactor::tanh_step(j.at("a_in").get<double>(),
                                            j.at("a_out").get<double>(),
                                            j.at("rho").get<double>());
        const int p = j.at("power").get<int>();
        if (p == 1) return f;
        if (p == -1) return invert(f);
        throw std::invalid_argument("BranchState: stored tanh factors have power +-1");
    }
    if (kind == "sampled") {
        const json& gj = j.at("grid");
        GridSpec g;
        g.nt = gj.at("nt").get<std::size_t>();
        g.nx = gj.at("nx").get<std::size_t>();
        g.t0 = gj.at("t0").get<double>();
        g.dt = gj.at("dt").get<double>();
        g.x0 = gj.at("x0").get<double>();
        g.dx = gj.at("dx").get<double>();
        return ConformalFactor::sampled(g, j.at("values").get<std::vector<double>>());
    }
    throw std::invalid_argument("BranchState: unknown factor kind '" + kind + "'");
}

json mass_to_json(const MassLabel& m) {
    switch (m.kind()) {
        case MassLabel::Kind::constant:
            return json{{"kind", "constant"}, {"m2", m.base_mass2()}};
        case MassLabel::Kind::flrw_flat:
            return json{{"kind", "flrw_flat"}, {"m2", m.base_mass2()}, {"hubble", m.hubble()}};
        case MassLabel::Kind::induced:
            return json{{"kind", "induced"},
                        {"a_in", m.a_in()},
                        {"a_out", m.a_out()},
                        {"rho", m.rho()},
                        {"m2", m.base_mass2()}};
        case MassLabel::Kind::dressed:
            return json{{"kind", "dressed"},
                        {"m2", m.base_mass2()},
                        {"omega", factor_to_json(m.factor())}};
    }
    throw std::logic_error("mass_to_json: unreachable");
}

MassLabel mass_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return MassLabel::constant(j.at("m2").get<double>());
    if (kind == "flrw_flat")
        return MassLabel::flrw_flat(j.at("m2").get<double>(), j.at("hubble").get<double>());
    if (kind == "induced")
        return MassLabel::induced(j.at("a_in").get<double>(), j.at("a_out").get<double>(),
                                  j.at("rho").get<double>(), j.at("m2").get<double>());
    if (kind == "dressed")
        return MassLabel::dressed(j.at("m2").get<double>(), factor_from_json(j.at("omega")));
    throw std::invalid_argument("BranchState: unknown mass kind '" + kind + "'");
}

}  // namespace

std::string BranchState::to_json(int indent) const {
    json doc;
    doc["frame"] = frame_ == Frame::mass_definite ? "mass" : "metric";
    doc["branches"] = json::array();
    for (const auto& b : branches_) {
        json br;
        br["re_amp"] = b.amplitude.real();
        br["im_amp"] = b.amplitude.imag();
        br["omega"] = factor_to_json(b.omega);
        br["mass"] = mass_to_json(b.mass);
        doc["branches"].push_back(std::move(br));
    }
    return doc.dump(indent);
}

BranchState BranchState::from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        const std::string frame = doc.at("frame").get<std::string>();
        if (frame != "mass" && frame != "metric")
            throw std::invalid_argument("BranchState: frame must be \"mass\" or \"metric\"");
        const json& arr = doc.at("branches");
        if (!arr.is_array()) throw std::invalid_argument("BranchState: branches must be a list");

        if (frame == "mass") {
            std::vector<std::pair<cplx, ConformalFactor>> branches;
            double m2 = 0.0;
            for (const json& br : arr) {
                MassLabel mass = mass_from_json(br.at("mass"));
                if (mass.kind() != MassLabel::Kind::constant)
                    throw std::invalid_argument(
                        "BranchState: a mass-definite state carries one constant mass");
                if (branches.empty())
                    m2 = mass.base_mass2();
                else if (mass.base_mass2() != m2)
                    throw std::invalid_argument(
                        "BranchState: a mass-definite state carries one constant mass");
                branches.emplace_back(cplx{br.at("re_amp").get<double>(),
                                           br.at("im_amp").get<double>()},
                                      factor_from_json(br.at("omega")));
            }
            return mass_definite(std::move(branches), m2);
        }

        std::vector<std::pair<cplx, MassLabel>> branches;
        for (const json& br : arr) {
            if (!factor_from_json(br.at("omega")).is_unit())
                throw std::invalid_argument(
                    "BranchState: a metric-definite state lives on the representative metric");
            branches.emplace_back(cplx{br.at("re_amp").get<double>(),
                                       br.at("im_amp").get<double>()},
                                  mass_from_json(br.at("mass")));
        }
        return metric_definite(std::move(branches));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("BranchState: ") + e.what());
    }
}

BranchState frame_change_m_to_g(const BranchState& state, const ConformalFactor& target) {
    if (state.frame() != Frame::mass_definite)
        throw std::logic_error("frame_change_m_to_g: the metric is already definite");
    if (!target.is_unit())
        throw std::invalid_argument(
            "frame_change_m_to_g: only the flat class representative is supported");

    std::vector<std::pair<cplx, MassLabel>> out;
    out.reserve(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        const Branch& b = state.branch(i);
        const double m2 = b.mass.base_mass2();
        MassLabel mass = MassLabel::constant(m2);
        switch (b.omega.kind()) {
            case ConformalFactor::Kind::unit:
                break;
            case ConformalFactor::Kind::exponential:
                if (b.omega.exponent() != 0.0)
                    mass = MassLabel::flrw_flat(m2, -b.omega.exponent());
                break;
            case ConformalFactor::Kind::tanh:
                if (b.omega.tanh_power() != -1)
                    fail_branch("frame_change_m_to_g", i,
                                "a tanh metric label must be the inverse of a scale profile");
                mass = MassLabel::induced(b.omega.tanh_a_in(), b.omega.tanh_a_out(),
                                          b.omega.tanh_rho(), m2);
                break;
            case ConformalFactor::Kind::sampled:
                mass = MassLabel::dressed(m2, b.omega);
                break;
        }
        out.emplace_back(b.amplitude, std::move(mass));
    }
    return BranchState::metric_definite(std::move(out));
}

BranchState frame_change_g_to_m(const BranchState& state) {
    if (state.frame() != Frame::metric_definite)
        throw std::logic_error("frame_change_g_to_m: the mass is already definite");

    std::vector<std::pair<cplx, ConformalFactor>> out;
    out.reserve(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        const Branch& b = state.branch(i);
        if (b.mass.base_mass2() != state.branch(0).mass.base_mass2())
            fail_branch("frame_change_g_to_m", i, "branches do not descend from a common mass");
        ConformalFactor omega = ConformalFactor::unit();
        switch (b.mass.kind()) {
            case MassLabel::Kind::constant:
                break;
            case MassLabel::Kind::flrw_flat:
                omega = ConformalFactor::exponential(-b.mass.hubble());
                break;
            case MassLabel::Kind::induced:
                omega = invert(ConformalFactor::tanh_step(b.mass.a_in(), b.mass.a_out(),
                                                          b.mass.rho()));
                break;
            case MassLabel::Kind::dressed:
                omega = b.mass.factor();
                break;
        }
        out.emplace_back(b.amplitude, std::move(omega));
    }
    return BranchState::mass_definite(std::move(out), state.branch(0).mass.base_mass2());
}

std::vector<ExpectationPoint> branch_expectation_nk(const BranchState& state,
                                                    const std::vector<double>& k, double tau0,
                                                    double tau1, double tolerance,
                                                    unsigned threads) {
    SpectrumRequest req;
    req.k = k;
    req.tau0 = tau0;
    req.tau1 = tau1;
    req.tolerance = tolerance;
    req.threads = threads;

    std::vector<double> acc(k.size(), 0.0);
    for (std::size_t i = 0; i < state.size(); ++i) {
        const Branch& b = state.branch(i);
        const double weight = std::norm(b.amplitude);
        Spectrum s;
        try {
            if (state.frame() == Frame::mass_definite) {
                switch (b.omega.kind()) {
                    case ConformalFactor::Kind::exponential:
                        if (b.omega.exponent() != 0.0)
                            fail_branch("branch_expectation_nk", i,
                                        "the metric label has no static asymptotic regions");
                        [[fallthrough]];
                    case ConformalFactor::Kind::unit:
                        s = compute_spectrum(MassProfile::constant(b.mass.base_mass2()), req);
                        break;
                    case ConformalFactor::Kind::tanh:
                        if (b.omega.tanh_power() != -1)
                            fail_branch("branch_expectation_nk", i,
                                        "a tanh metric label must be the inverse of a scale"
                                        " profile");
                        s = compute_spectrum(
                            ScaleFactorProfile::tanh_step(b.omega.tanh_a_in(),
                                                          b.omega.tanh_a_out(),
                                                          b.omega.tanh_rho()),
                            b.mass.base_mass2(), req);
                        break;
                    default:
                        fail_branch("branch_expectation_nk", i,
                                    "the metric label has no static asymptotic regions");
                }
            } else {
                switch (b.mass.kind()) {
                    case MassLabel::Kind::constant:
                        s = compute_spectrum(MassProfile::constant(b.mass.base_mass2()), req);
                        break;
                    case MassLabel::Kind::induced:
                        s = compute_spectrum(
                            MassProfile::from_scale(b.mass.profile(), b.mass.base_mass2()), req);
                        break;
                    default:
                        fail_branch("branch_expectation_nk", i,
                                    "the mass label has no static asymptotic regions");
                }
            }
        } catch (const std::domain_error&) {
            throw;
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "branch_expectation_nk: branch " << i << ": " << e.what();
            throw std::runtime_error(os.str());
        }
        for (std::size_t j = 0; j < k.size(); ++j) acc[j] += weight * s.coeff[j].n_k();
    }

    std::vector<ExpectationPoint> out(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) out[j] = {k[j], acc[j]};
    return out;
}

}  // namespace confkg
