#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "CLI11.hpp"

#include "confkg/scenario.hpp"

namespace {

struct JobArgs {
    std::string config;
    std::string out;
    double tol = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conformal Klein-Gordon transformations and particle spectra"};
    app.require_subcommand(1);

    static constexpr std::pair<const char*, const char*> kVerbs[] = {
        {"transform", "mass sector of an exponential conformal shift between FLRW backgrounds"},
        {"spectrum", "Bogoliubov spectrum of a tanh mass transition"},
        {"compare-pictures", "one transition computed in the curved and the flat picture"},
        {"superposition", "branch expectations and the frame-change round trip"},
        {"verify-invariants", "machine-readable report over the library's invariants"},
    };

    JobArgs args;
    for (const auto& [name, help] : kVerbs) {
        CLI::App* cmd = app.add_subcommand(name, help);
        cmd->add_option("--config", args.config, "scenario file (INI)")->required();
        cmd->add_option("--out", args.out, "output directory, overrides [output] dir");
        cmd->add_option("--tol", args.tol,
                        "integrator tolerance, overrides [tolerances] integrator");
    }

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();

    try {
        confkg::Scenario sc = confkg::parse_scenario_file(args.config);
        const std::string verb = sub->get_name();
        if (!sc.job.empty() && sc.job != verb)
            throw std::invalid_argument(args.config + ": scenario selects job '" + sc.job +
                                        "' but the subcommand is '" + verb + "'");
        sc.job = verb;
        if (sub->count("--out") > 0) sc.out_dir = args.out;
        if (sub->count("--tol") > 0) {
            if (!(args.tol > 0.0))
                throw std::invalid_argument("--tol must be positive");
            sc.integrator_tol = args.tol;
        }
        return confkg::run_scenario(sc, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
