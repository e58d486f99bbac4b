#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "confkg/bogoliubov.hpp"
#include "confkg/geometry.hpp"

namespace confkg {

// Mass-term descriptor carried by a superposition branch. Every kind other
// than `constant` remembers the factor that produced it, so undoing a frame
// change restores the original labels without numerical work:
//
//   constant   m^2
//   flrw_flat  e^{2Ht}(m^2 - 2H^2), from flattening an exponential branch
//   induced    a^2 m^2 - a''/a, from flattening a tanh scale profile
//   dressed    a sampled factor applied to m^2, kept symbolic
class MassLabel {
public:
    enum class Kind { constant, flrw_flat, induced, dressed };

    static MassLabel constant(double m2);
    static MassLabel flrw_flat(double m2, double hubble);
    static MassLabel induced(double a_in, double a_out, double rho, double m2);
    static MassLabel dressed(double m2, ConformalFactor omega);

    Kind kind() const { return kind_; }

    // the constant mass the label descends from
    double base_mass2() const { return m2_; }

    double hubble() const;                // flrw_flat kind
    ScaleFactorProfile profile() const;   // induced kind: the tanh scale factor
    double a_in() const;                  // induced kind
    double a_out() const;
    double rho() const;
    const ConformalFactor& factor() const;  // dressed kind

    // time dependence of the mass term; the first argument is cosmic time
    // for flrw_flat and conformal time for induced. Dressed labels live on
    // a grid and refuse pointwise evaluation.
    double operator()(double t) const;

    // exact comparison of kind and parameters, the distinctness notion used
    // for superposition branches
    bool same_label(const MassLabel& other) const;

private:
    MassLabel() = default;

    Kind kind_ = Kind::constant;
    double m2_ = 0.0;
    double hubble_ = 0.0;
    double a_in_ = 1.0, a_out_ = 1.0, rho_ = 1.0;
    ScaleFactorProfile scale_ = ScaleFactorProfile::constant(1.0);
    std::optional<ConformalFactor> omega_;  // engaged only when dressed
};

// Which label the superposition is diagonal in.
enum class Frame { mass_definite, metric_definite };

// One branch of a superposition: an amplitude plus the labels identifying
// the branch. omega relates the branch metric to the flat class
// representative; the pair (omega, mass) is also the handle for the branch's
// field content, whose mode solutions are derived on demand.
struct Branch {
    std::complex<double> amplitude{0.0, 0.0};
    ConformalFactor omega = ConformalFactor::unit();
    MassLabel mass = MassLabel::constant(0.0);
};

// Normalized finite superposition of branches. Mass-definite states share
// one constant mass and superpose metrics; metric-definite states share the
// flat metric and superpose mass terms. Distinctness of the superposed
// labels stands in for orthogonality of the branch states.
class BranchState {
public:
    static BranchState
    mass_definite(std::vector<std::pair<std::complex<double>, ConformalFactor>> metric_branches,
                  double m2);
    static BranchState
    metric_definite(std::vector<std::pair<std::complex<double>, MassLabel>> mass_branches);

    Frame frame() const { return frame_; }
    std::size_t size() const { return branches_.size(); }
    const Branch& branch(std::size_t i) const { return branches_.at(i); }
    const std::vector<Branch>& branches() const { return branches_; }
    double norm2() const;

    // document shape: {"frame":"mass"|"metric","branches":[{"re_amp","im_amp",
    // "omega":{...},"mass":{...}}]}; numbers reparse bit for bit
    std::string to_json(int indent = -1) const;
    static BranchState from_json(const std::string& text);

private:
    BranchState(Frame f, std::vector<Branch> b);
    static BranchState checked(Frame f, std::vector<Branch> b);

    Frame frame_ = Frame::mass_definite;
    std::vector<Branch> branches_;
};

// Makes the metric definite: each branch's labels move through the conformal
// map attached to its omega, amplitudes are copied bitwise, and every
// resulting omega is the representative's (the unit factor). Only the flat
// representative is supported as a target.
BranchState frame_change_m_to_g(const BranchState& state,
                                const ConformalFactor& target = ConformalFactor::unit());

// Inverse map: reconstructs each branch's factor from its mass label and
// returns to the shared-mass picture. Requires all branches to descend from
// one common mass.
BranchState frame_change_g_to_m(const BranchState& state);

struct ExpectationPoint {
    double k = 0.0;
    double n = 0.0;
};

// Branch-averaged mean number of produced quanta per mode,
// sum_i |amplitude_i|^2 |beta_{k,i}|^2, each branch integrated through its
// own transition between tau0 and tau1. Branch labels without static
// asymptotic regions are refused by name.
std::vector<ExpectationPoint> branch_expectation_nk(const BranchState& state,
                                                    const std::vector<double>& k, double tau0,
                                                    double tau1, double tolerance = 1e-10,
                                                    unsigned threads = 0);

}  // namespace confkg
