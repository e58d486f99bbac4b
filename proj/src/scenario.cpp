#include "confkg/scenario.hpp"

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "json.hpp"

#include "confkg/bogoliubov.hpp"
#include "confkg/confmap.hpp"
#include "confkg/geometry.hpp"
#include "confkg/qrfstate.hpp"

namespace fs = std::filesystem;

namespace confkg {

namespace {

using json = nlohmann::json;
using cplx = std::complex<double>;

constexpr const char* kJobs[] = {"transform", "spectrum", "compare-pictures", "superposition",
                                 "verify-invariants"};

bool known_job(const std::string& j) {
    for (const char* name : kJobs)
        if (j == name) return true;
    return false;
}

std::string job_list() {
    std::string out;
    for (const char* name : kJobs) {
        if (!out.empty()) out += ", ";
        out += name;
    }
    return out;
}

struct LineCtx {
    const std::string& name;
    int line;
};

[[noreturn]] void bail(const LineCtx& c, const std::string& what) {
    std::ostringstream os;
    os << c.name << ":" << c.line << ": " << what;
    throw std::invalid_argument(os.str());
}

std::string trim(const std::string& v) {
    const char* ws = " \t\r";
    const auto b = v.find_first_not_of(ws);
    if (b == std::string::npos) return {};
    const auto e = v.find_last_not_of(ws);
    return v.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const LineCtx& c) {
    const char* b = v.data();
    const char* e = b + v.size();
    if (b != e && *b == '+') ++b;
    double out = 0.0;
    const auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc() || p != e) bail(c, "expected a number, got '" + v + "'");
    if (!std::isfinite(out)) bail(c, "expected a finite number, got '" + v + "'");
    return out;
}

double parse_positive(const std::string& v, const LineCtx& c) {
    const double out = parse_double(v, c);
    if (!(out > 0.0)) bail(c, "expected a positive number, got '" + v + "'");
    return out;
}

std::size_t parse_count(const std::string& v, const LineCtx& c, std::size_t lo, std::size_t hi) {
    const char* b = v.data();
    const char* e = b + v.size();
    unsigned long long out = 0;
    const auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc() || p != e) bail(c, "expected an unsigned integer, got '" + v + "'");
    if (out < lo || out > hi) {
        std::ostringstream os;
        os << "expected an integer in [" << lo << ", " << hi << "], got " << v;
        bail(c, os.str());
    }
    return static_cast<std::size_t>(out);
}

BranchSpec parse_branch(const std::string& value, const LineCtx& c) {
    std::istringstream in(value);
    std::vector<std::string> tok;
    std::string t;
    while (in >> t) tok.push_back(t);
    if (tok.size() < 3) bail(c, "branch needs '<re> <im> flat|tanh <a_in> <a_out> <rho>|flrw <H>'");

    BranchSpec b;
    b.amplitude = {parse_double(tok[0], c), parse_double(tok[1], c)};
    const std::string& kind = tok[2];
    auto want = [&](std::size_t n) {
        if (tok.size() != n) {
            std::ostringstream os;
            os << "branch kind '" << kind << "' takes " << n - 3 << " parameter(s), got "
               << tok.size() - 3;
            bail(c, os.str());
        }
    };
    if (kind == "flat") {
        want(3);
        b.kind = BranchSpec::Kind::flat;
    } else if (kind == "tanh") {
        want(6);
        b.kind = BranchSpec::Kind::tanh_profile;
        b.a_in = parse_positive(tok[3], c);
        b.a_out = parse_positive(tok[4], c);
        b.rho = parse_positive(tok[5], c);
    } else if (kind == "flrw") {
        want(4);
        b.kind = BranchSpec::Kind::flrw;
        b.hubble = parse_double(tok[3], c);
    } else {
        bail(c, "unknown branch kind '" + kind + "'; expected flat, tanh or flrw");
    }
    return b;
}

void validate_scenario(const Scenario& s) {
    auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    auto finite = [&](double v, const char* field) {
        if (!std::isfinite(v)) fail(std::string(field) + " must be finite");
    };
    auto positive = [&](double v, const char* field) {
        if (!std::isfinite(v) || !(v > 0.0)) fail(std::string(field) + " must be positive");
    };

    if (!s.job.empty() && !known_job(s.job))
        fail("unknown job '" + s.job + "'; expected one of " + job_list());

    positive(s.a_in, "profile.a_in");
    positive(s.a_out, "profile.a_out");
    positive(s.rho, "profile.rho");
    finite(s.m2, "profile.m2");
    finite(s.hubble, "profile.hubble");
    finite(s.shift, "profile.shift");

    positive(s.k_min, "grid.k_min");
    positive(s.k_max, "grid.k_max");
    if (s.k_count == 0) fail("grid.count must be at least 1");
    if (s.k_count > 1 && !(s.k_max > s.k_min)) fail("grid.k_max must exceed grid.k_min");
    finite(s.tau0, "grid.tau0");
    finite(s.tau1, "grid.tau1");
    if (!(s.tau1 > s.tau0)) fail("grid.tau1 must exceed grid.tau0");

    finite(s.t0, "transform.t0");
    finite(s.t1, "transform.t1");
    if (!(s.t1 > s.t0)) fail("transform.t1 must exceed transform.t0");
    if (s.t_count < 2) fail("transform.count must be at least 2");

    positive(s.integrator_tol, "tolerances.integrator");
    positive(s.matching_tol, "tolerances.matching");

    if (s.out_dir.empty()) fail("output.dir must not be empty");

    for (std::size_t i = 0; i < s.branches.size(); ++i) {
        const BranchSpec& b = s.branches[i];
        const std::string who = "branch " + std::to_string(i);
        if (!std::isfinite(b.amplitude.real()) || !std::isfinite(b.amplitude.imag()))
            fail(who + ": amplitude must be finite");
        if (b.kind == BranchSpec::Kind::tanh_profile &&
            (!(b.a_in > 0.0) || !(b.a_out > 0.0) || !(b.rho > 0.0)))
            fail(who + ": tanh parameters must be positive");
        if (b.kind == BranchSpec::Kind::flrw && !std::isfinite(b.hubble))
            fail(who + ": hubble must be finite");
    }
}

unsigned env_threads(unsigned fallback) {
    const char* e = std::getenv("CONFKG_THREADS");
    if (!e || !*e) return fallback;
    const char* end = e + std::strlen(e);
    unsigned out = 0;
    const auto [p, ec] = std::from_chars(e, end, out);
    if (ec != std::errc() || p != end || out > 1024)
        throw std::invalid_argument(std::string("CONFKG_THREADS must be an integer in [0, 1024], "
                                                "got '") +
                                    e + "'");
    return out;
}

fs::path prepare_out_dir(const Scenario& s) {
    fs::path dir(s.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

std::ofstream open_text(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
}

void write_json_file(const fs::path& p, const json& doc, std::ostream& log) {
    auto f = open_text(p);
    f << doc.dump(2) << '\n';
    f.flush();
    if (!f) throw std::runtime_error("short write to " + p.string());
    log << "wrote " << p.string() << "\n";
}

void write_csv_file(const fs::path& p, const Spectrum& s, std::ostream& log) {
    auto f = open_text(p);
    write_spectrum_csv(f, s);
    f.flush();
    if (!f) throw std::runtime_error("short write to " + p.string());
    log << "wrote " << p.string() << "\n";
}

json meta(const char* job) {
    json doc;
    doc["tool"] = "confkg";
    doc["format_version"] = 1;
    doc["job"] = job;
    return doc;
}

json grid_parameters(const Scenario& s) {
    json p;
    p["k_min"] = s.k_min;
    p["k_max"] = s.k_max;
    p["k_count"] = s.k_count;
    p["spacing"] = s.log_spacing ? "log" : "linear";
    p["tau0"] = s.tau0;
    p["tau1"] = s.tau1;
    p["integrator_tol"] = s.integrator_tol;
    return p;
}

json profile_parameters(const Scenario& s) {
    json p = grid_parameters(s);
    p["a_in"] = s.a_in;
    p["a_out"] = s.a_out;
    p["rho"] = s.rho;
    p["m2"] = s.m2;
    return p;
}

SpectrumRequest make_request(const Scenario& s) {
    SpectrumRequest req;
    req.k = s.k_values();
    req.tau0 = s.tau0;
    req.tau1 = s.tau1;
    req.tolerance = s.integrator_tol;
    req.threads = s.threads;
    return req;
}

double max_nk_gap(const Spectrum& a, const Spectrum& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.coeff.size(); ++i)
        worst = std::max(worst, std::abs(a.coeff[i].n_k() - b.coeff[i].n_k()));
    return worst;
}

BranchState scenario_state(const Scenario& s) {
    std::vector<std::pair<cplx, ConformalFactor>> branches;
    branches.reserve(s.branches.size());
    for (const BranchSpec& b : s.branches) {
        ConformalFactor w = ConformalFactor::unit();
        switch (b.kind) {
            case BranchSpec::Kind::flat:
                break;
            case BranchSpec::Kind::tanh_profile:
                w = invert(ConformalFactor::tanh_step(b.a_in, b.a_out, b.rho));
                break;
            case BranchSpec::Kind::flrw:
                w = ConformalFactor::exponential(-b.hubble);
                break;
        }
        branches.emplace_back(b.amplitude, std::move(w));
    }
    return BranchState::mass_definite(std::move(branches), s.m2);
}

int run_transform(const Scenario& s, std::ostream& log) {
    const fs::path dir = prepare_out_dir(s);

    const ExpFamilyTriple base(s.hubble, s.m2 - 2.0 * s.hubble * s.hubble, 0.0,
                               [](double, double) { return cplx{1.0, 0.0}; });
    const ExpFamilyTriple moved = base.shifted(s.shift);

    json doc = meta("transform");
    doc["input"] = {{"hubble", s.hubble}, {"m2", s.m2}};
    doc["shift"] = s.shift;
    doc["output"] = {{"hubble", moved.hubble()},
                     {"mass_amplitude", moved.mass_amplitude()},
                     {"mass_rate", moved.mass_rate()},
                     {"mass_offset", 2.0 * moved.hubble() * moved.hubble()}};
    write_json_file(dir / "transform.json", doc, log);

    const fs::path csv = dir / "effective_mass.csv";
    auto f = open_text(csv);
    f << "t,m2_before,m2_after\n";
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        f << buf << sep;
    };
    for (std::size_t i = 0; i < s.t_count; ++i) {
        const double t =
            s.t0 + (s.t1 - s.t0) * static_cast<double>(i) / static_cast<double>(s.t_count - 1);
        put(t, ',');
        put(base.mass2(t), ',');
        put(moved.mass2(t), '\n');
    }
    f.flush();
    if (!f) throw std::runtime_error("short write to " + csv.string());
    log << "wrote " << csv.string() << "\n";
    return 0;
}

int run_spectrum_job(const Scenario& s, std::ostream& log) {
    const fs::path dir = prepare_out_dir(s);
    const SpectrumRequest req = make_request(s);
    const Spectrum spec =
        compute_spectrum(MassProfile::tanh_transition(s.a_in, s.a_out, s.rho, s.m2), req);

    write_csv_file(dir / "spectrum.csv", spec, log);

    json doc = meta("spectrum");
    doc["parameters"] = profile_parameters(s);
    doc["max_unitarity_defect"] = spec.max_unitarity_defect;
    doc["max_wronskian_defect"] = spec.max_wronskian_defect;
    write_json_file(dir / "spectrum_meta.json", doc, log);
    return 0;
}

int run_compare(const Scenario& s, std::ostream& log) {
    const fs::path dir = prepare_out_dir(s);

    // the two routes are compared against matching_tol, so their own
    // integration error has to sit well below it regardless of the
    // configured spectrum tolerance
    SpectrumRequest req = make_request(s);
    req.tolerance = std::min(s.integrator_tol, 1e-12);

    const auto scale = ScaleFactorProfile::tanh_step(s.a_in, s.a_out, s.rho);
    const Spectrum curved = compute_spectrum(scale, s.m2, req);
    const Spectrum flat = compute_spectrum(MassProfile::from_scale(scale, s.m2), req);

    write_csv_file(dir / "spectrum_curved.csv", curved, log);
    write_csv_file(dir / "spectrum_flat.csv", flat, log);

    const double defect = max_nk_gap(curved, flat);
    const bool pass = defect <= s.matching_tol;

    json doc = meta("compare-pictures");
    doc["parameters"] = profile_parameters(s);
    doc["parameters"]["matching_tol"] = s.matching_tol;
    doc["defect"] = defect;
    doc["tolerance"] = s.matching_tol;
    doc["pass"] = pass;
    doc["integrator_tol_effective"] = req.tolerance;
    doc["max_unitarity_defect"] =
        std::max(curved.max_unitarity_defect, flat.max_unitarity_defect);
    write_json_file(dir / "compare_report.json", doc, log);

    log << (pass ? "[PASS]" : "[FAIL]") << " picture agreement: defect " << defect
        << " tolerance " << s.matching_tol << "\n";
    return pass ? 0 : 1;
}

int run_superposition(const Scenario& s, std::ostream& log) {
    const fs::path dir = prepare_out_dir(s);

    const BranchState state = scenario_state(s);
    const std::vector<double> k = s.k_values();
    const auto before =
        branch_expectation_nk(state, k, s.tau0, s.tau1, s.integrator_tol, s.threads);

    const BranchState rotated = frame_change_m_to_g(state);
    const auto after =
        branch_expectation_nk(rotated, k, s.tau0, s.tau1, s.integrator_tol, s.threads);
    const BranchState back = frame_change_g_to_m(rotated);

    const bool labels = back.to_json() == state.to_json();
    const double norm_defect = std::abs(back.norm2() - state.norm2());
    double observable = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j)
        observable = std::max(observable, std::abs(before[j].n - after[j].n));
    const bool pass =
        labels && norm_defect <= s.matching_tol && observable <= s.matching_tol;

    json doc = meta("superposition");
    doc["parameters"] = grid_parameters(s);
    doc["parameters"]["m2"] = s.m2;
    doc["parameters"]["matching_tol"] = s.matching_tol;
    doc["state"] = json::parse(state.to_json());
    doc["metric_frame_state"] = json::parse(rotated.to_json());
    json exp = json::array();
    for (std::size_t j = 0; j < k.size(); ++j)
        exp.push_back({{"k", before[j].k}, {"n", before[j].n}});
    doc["expectations"] = exp;
    doc["round_trip"] = {{"labels_restored", labels},
                         {"norm_defect", norm_defect},
                         {"observable_defect", observable},
                         {"tolerance", s.matching_tol},
                         {"pass", pass}};
    write_json_file(dir / "superposition.json", doc, log);

    log << (pass ? "[PASS]" : "[FAIL]") << " frame round trip: observable defect " << observable
        << " tolerance " << s.matching_tol << "\n";
    return pass ? 0 : 1;
}

int run_verify(const Scenario& s, std::ostream& log) {
    const fs::path dir = prepare_out_dir(s);

    struct CheckEntry {
        std::string name;
        double defect;
        double tolerance;
        bool pass;
    };
    std::vector<CheckEntry> entries;
    auto add = [&](std::string name, double defect, double tol) {
        entries.push_back({std::move(name), defect, tol, defect <= tol});
    };

    const SpectrumRequest req = make_request(s);

    const Spectrum bench =
        compute_spectrum(MassProfile::tanh_transition(s.a_in, s.a_out, s.rho, s.m2), req);
    add("wronskian_unitarity",
        std::max(bench.max_unitarity_defect, bench.max_wronskian_defect), 1e-8);

    double closed = 0.0;
    for (std::size_t i = 0; i < req.k.size(); ++i) {
        const auto exact = tanh_transition_spectrum(req.k[i], s.a_in, s.a_out, s.rho, s.m2);
        if (exact.beta2 > 1e-10)
            closed = std::max(closed, std::abs(bench.coeff[i].n_k() - exact.beta2) / exact.beta2);
    }
    add("closed_form_match", closed, 1e-6);

    SpectrumRequest tight = req;
    tight.tolerance = std::min(s.integrator_tol, 1e-12);
    const auto scale = ScaleFactorProfile::tanh_step(s.a_in, s.a_out, s.rho);
    const Spectrum curved = compute_spectrum(scale, s.m2, tight);
    const Spectrum flat = compute_spectrum(MassProfile::from_scale(scale, s.m2), tight);
    add("picture_agreement", max_nk_gap(curved, flat), 1e-10);

    const ExpFamilyTriple base(s.hubble, s.m2 - 2.0 * s.hubble * s.hubble, 0.0,
                               [](double, double) { return cplx{1.0, 0.0}; });
    const ExpFamilyTriple two = base.shifted(0.3).shifted(-0.7);
    const ExpFamilyTriple one = base.shifted(-0.4);
    double comp = std::max({std::abs(two.hubble() - one.hubble()),
                            std::abs(two.mass_amplitude() - one.mass_amplitude()),
                            std::abs(two.mass_rate() - one.mass_rate()),
                            std::abs(two.shift_from_base() - one.shift_from_base())});
    for (std::size_t i = 0; i < 11; ++i) {
        const double t = s.t0 + (s.t1 - s.t0) * static_cast<double>(i) / 10.0;
        comp = std::max(comp, std::abs(two.mass2(t) - one.mass2(t)));
    }
    add("exp_family_composition", comp, 1e-14);

    Scenario ens = s;
    if (ens.branches.empty()) {
        BranchSpec stepped;
        stepped.amplitude = {std::sqrt(0.5), 0.0};
        stepped.kind = BranchSpec::Kind::tanh_profile;
        stepped.a_in = s.a_in;
        stepped.a_out = s.a_out;
        stepped.rho = s.rho;
        BranchSpec still;
        still.amplitude = {0.0, std::sqrt(0.5)};
        still.kind = BranchSpec::Kind::flat;
        ens.branches = {stepped, still};
    }
    const BranchState state = scenario_state(ens);
    const auto before =
        branch_expectation_nk(state, req.k, s.tau0, s.tau1, s.integrator_tol, s.threads);
    const BranchState rotated = frame_change_m_to_g(state);
    const auto after =
        branch_expectation_nk(rotated, req.k, s.tau0, s.tau1, s.integrator_tol, s.threads);
    const BranchState back = frame_change_g_to_m(rotated);
    double frame = std::abs(back.norm2() - state.norm2());
    for (std::size_t j = 0; j < req.k.size(); ++j)
        frame = std::max(frame, std::abs(before[j].n - after[j].n));
    if (back.to_json() != state.to_json()) frame = std::max(frame, 1.0);
    add("frame_invariance", frame, s.matching_tol);

    const Spectrum unstepped =
        compute_spectrum(MassProfile::tanh_transition(s.a_in, s.a_in, s.rho, s.m2), req);
    const Spectrum massless =
        compute_spectrum(MassProfile::tanh_transition(s.a_in, s.a_out, s.rho, 0.0), req);
    double quiet = 0.0;
    for (std::size_t i = 0; i < req.k.size(); ++i)
        quiet = std::max({quiet, unstepped.coeff[i].n_k(), massless.coeff[i].n_k()});
    add("degenerate_limits", quiet, 1e-12);

    int fails = 0;
    json rep = json::array();
    for (const CheckEntry& e : entries) {
        rep.push_back({{"name", e.name},
                       {"defect", e.defect},
                       {"tolerance", e.tolerance},
                       {"pass", e.pass}});
        log << (e.pass ? "[PASS] " : "[FAIL] ") << e.name << ": defect " << e.defect
            << " tolerance " << e.tolerance << "\n";
        if (!e.pass) ++fails;
    }

    json doc = meta("verify-invariants");
    doc["parameters"] = profile_parameters(s);
    doc["parameters"]["matching_tol"] = s.matching_tol;
    doc["report"] = rep;
    doc["pass"] = (fails == 0);
    write_json_file(dir / "invariance_report.json", doc, log);
    return fails;
}

}  // namespace

std::vector<double> Scenario::k_values() const {
    if (k_count == 1) return {k_min};
    if (log_spacing) return log_spaced(k_min, k_max, k_count);
    std::vector<double> k(k_count);
    for (std::size_t i = 0; i < k_count; ++i)
        k[i] = k_min +
               (k_max - k_min) * static_cast<double>(i) / static_cast<double>(k_count - 1);
    k.front() = k_min;
    k.back() = k_max;
    return k;
}

Scenario parse_scenario(const std::string& text, const std::string& name) {
    Scenario sc;
    std::istringstream in(text);
    std::string raw, section;
    std::map<std::string, int> seen;
    int line = 0;

    while (std::getline(in, raw)) {
        ++line;
        const LineCtx c{name, line};
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;

        if (s.front() == '[') {
            if (s.back() != ']') bail(c, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "profile" && section != "grid" && section != "transform" &&
                section != "tolerances" && section != "output" && section != "branches")
                bail(c, "unknown section [" + section + "]");
            continue;
        }

        const auto eq = s.find('=');
        if (eq == std::string::npos) bail(c, "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty()) bail(c, "missing key before '='");
        if (value.empty()) bail(c, "missing value for '" + key + "'");

        if (!(section == "branches" && key == "branch")) {
            const auto [it, fresh] = seen.emplace(section + "." + key, line);
            if (!fresh) {
                std::ostringstream os;
                os << "duplicate key '" << key << "' (first set on line " << it->second << ")";
                bail(c, os.str());
            }
        }

        if (section.empty()) {
            if (key == "job") {
                if (!known_job(value))
                    bail(c, "unknown job '" + value + "'; expected one of " + job_list());
                sc.job = value;
            } else if (key == "threads") {
                sc.threads = static_cast<unsigned>(parse_count(value, c, 0, 1024));
            } else {
                bail(c, "unknown key '" + key + "' outside any section");
            }
        } else if (section == "profile") {
            if (key == "a_in") sc.a_in = parse_positive(value, c);
            else if (key == "a_out") sc.a_out = parse_positive(value, c);
            else if (key == "rho") sc.rho = parse_positive(value, c);
            else if (key == "m2") sc.m2 = parse_double(value, c);
            else if (key == "hubble") sc.hubble = parse_double(value, c);
            else if (key == "shift") sc.shift = parse_double(value, c);
            else bail(c, "unknown key '" + key + "' in [profile]");
        } else if (section == "grid") {
            if (key == "k_min") sc.k_min = parse_positive(value, c);
            else if (key == "k_max") sc.k_max = parse_positive(value, c);
            else if (key == "count") sc.k_count = parse_count(value, c, 1, 100000);
            else if (key == "spacing") {
                if (value == "log") sc.log_spacing = true;
                else if (value == "linear") sc.log_spacing = false;
                else bail(c, "spacing must be 'log' or 'linear', got '" + value + "'");
            } else if (key == "tau0") sc.tau0 = parse_double(value, c);
            else if (key == "tau1") sc.tau1 = parse_double(value, c);
            else bail(c, "unknown key '" + key + "' in [grid]");
        } else if (section == "transform") {
            if (key == "t0") sc.t0 = parse_double(value, c);
            else if (key == "t1") sc.t1 = parse_double(value, c);
            else if (key == "count") sc.t_count = parse_count(value, c, 2, 10000000);
            else bail(c, "unknown key '" + key + "' in [transform]");
        } else if (section == "tolerances") {
            if (key == "integrator") sc.integrator_tol = parse_positive(value, c);
            else if (key == "matching") sc.matching_tol = parse_positive(value, c);
            else bail(c, "unknown key '" + key + "' in [tolerances]");
        } else if (section == "output") {
            if (key == "dir") sc.out_dir = value;
            else bail(c, "unknown key '" + key + "' in [output]");
        } else {
            if (key != "branch") bail(c, "unknown key '" + key + "' in [branches]");
            sc.branches.push_back(parse_branch(value, c));
        }
    }

    try {
        validate_scenario(sc);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(name + ": " + std::string(e.what()));
    }
    return sc;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_scenario(buf.str(), fs::path(path).filename().string());
}

int run_scenario(const Scenario& s, std::ostream& log) {
    Scenario sc = s;
    sc.threads = env_threads(sc.threads);
    validate_scenario(sc);

    if (sc.job.empty())
        throw std::invalid_argument("no job selected; expected one of " + job_list());
    const bool takes_branches = sc.job == "superposition" || sc.job == "verify-invariants";
    if (!sc.branches.empty() && !takes_branches)
        throw std::invalid_argument("job '" + sc.job + "' does not take branches");
    if (sc.job == "superposition" && sc.branches.empty())
        throw std::invalid_argument("superposition needs at least one branch");

    if (sc.job == "transform") return run_transform(sc, log);
    if (sc.job == "spectrum") return run_spectrum_job(sc, log);
    if (sc.job == "compare-pictures") return run_compare(sc, log);
    if (sc.job == "superposition") return run_superposition(sc, log);
    return run_verify(sc, log);
}

}  // namespace confkg
