// twistrad: photon emission from twisted electrons in axisymmetric magnetic
// field profiles.  Subcommands: ermakov (envelope trajectories), rate
// (angular emission spectra), sweep (parameter scans), verify (self checks).
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 verification failure.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "twistrad/errors.hpp"

int main(int argc, char** argv) {
    using namespace twistrad;

    CLI::App app{"Photon emission from twisted electrons in axisymmetric "
                 "magnetic field profiles"};
    app.require_subcommand(1);

    std::string config_path;
    cli::CommandFlags flags;

    auto* ermakov = app.add_subcommand(
        "ermakov", "Integrate the beam envelope and write a trajectory CSV");
    ermakov->add_option("--config", config_path, "Configuration file")->required();
    ermakov->add_option("--out", flags.out_override, "Output CSV path");

    auto* rate = app.add_subcommand(
        "rate", "Compute the angular emission spectrum and write a rate CSV");
    rate->add_option("--config", config_path, "Configuration file")->required();
    rate->add_option("--out", flags.out_override, "Output CSV path");
    rate->add_flag("--fieldfree", flags.fieldfree,
                   "Use the closed-form field-free rate (profile must be zero)");
    rate->add_flag("--dipole", flags.dipole,
                   "Evaluate form factors in the dipole (zero-displacement) limit");

    auto* sweep = app.add_subcommand(
        "sweep", "Total emission rate versus one swept parameter");
    sweep->add_option("--config", config_path, "Configuration file")->required();
    sweep->add_option("--out", flags.out_override, "Output CSV path");
    sweep->add_flag("--fieldfree", flags.fieldfree,
                    "Use the closed-form field-free rate (profile must be zero)");
    sweep->add_flag("--dipole", flags.dipole,
                    "Evaluate form factors in the dipole (zero-displacement) limit");

    auto* verify = app.add_subcommand("verify", "Run the self-check suites");
    verify->add_flag("--quick", flags.quick, "Reduced grids (a few seconds)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the message
        return 1;    // command-line problems are configuration errors
    }

    try {
        if (verify->parsed()) return cli::cmd_verify(flags);
        const cli::RunConfig config = cli::load_config(config_path);
        if (ermakov->parsed()) return cli::cmd_ermakov(config, flags);
        if (rate->parsed()) return cli::cmd_rate(config, flags);
        return cli::cmd_sweep(config, flags);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const EnvelopeCollapseError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
