#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace confkg {

// One superposition branch as named in a scenario file: `flat` is the
// representative metric itself, `tanh` a scale-profile transition, `flrw`
// an exponential cosmic-time branch.
struct BranchSpec {
    std::complex<double> amplitude{0.0, 0.0};
    enum class Kind { flat, tanh_profile, flrw } kind = Kind::flat;
    double a_in = 1.0, a_out = 1.0, rho = 1.0;
    double hubble = 0.0;
};

// A parsed and validated run request for the command-line front end. The
// grammar is INI-style: a top-level `job` key plus [profile], [grid],
// [transform], [tolerances], [output] and [branches] sections; see the
// README for the full key list and defaults.
struct Scenario {
    std::string job;

    double a_in = 1.0, a_out = 2.0, rho = 1.0, m2 = 1.0;
    double hubble = 0.0, shift = 0.0;

    double k_min = 0.1, k_max = 10.0;
    std::size_t k_count = 64;
    bool log_spacing = true;
    double tau0 = -32.0, tau1 = 32.0;

    double t0 = 0.0, t1 = 2.0;
    std::size_t t_count = 101;

    double integrator_tol = 1e-10;
    double matching_tol = 1e-10;

    std::string out_dir = ".";
    unsigned threads = 0;  // worker cap; 0 picks the hardware concurrency

    std::vector<BranchSpec> branches;

    // the wavenumber grid the scenario describes, endpoints exact
    std::vector<double> k_values() const;
};

// Parses scenario text; `name` prefixes diagnostics as "<name>:<line>: ...".
// Unknown keys, duplicates, malformed numbers and out-of-range values are
// all rejected with the offending line.
Scenario parse_scenario(const std::string& text, const std::string& name);
Scenario parse_scenario_file(const std::string& path);

// Runs one job, writing its artifacts under s.out_dir and a progress line
// per artifact to log. Returns the number of failed report entries; jobs
// without pass/fail entries return 0. Numerical failures propagate as
// exceptions naming the failing mode or branch. The CONFKG_THREADS
// environment variable, when set, replaces s.threads.
int run_scenario(const Scenario& s, std::ostream& log);

}  // namespace confkg
