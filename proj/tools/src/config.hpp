#pragma once
// Run configuration: a flat key = value text format with bracketed section
// headers.  Lines starting with '#' (or inline '# ...' tails) are comments.
// Unknown sections or keys are hard errors so typos cannot silently fall back
// to defaults.  parse -> serialize -> parse is the identity on the parsed
// representation.

#include <optional>
#include <string>
#include <vector>

#include "twistrad/field.hpp"
#include "twistrad/quantum.hpp"
#include "twistrad/units.hpp"

namespace twistrad::cli {

struct ProfileConfig {
    std::string kind = "zero";
    // flat_top
    double ramp = 0.0;
    double plateau = 0.0;
    // two_solenoid
    double offset = 0.0;
    double coil_width = 0.0;
    double gap = 0.0;
    // gaussian
    double center = 0.0;
    double width = 0.0;
    // tabulated: CSV path, columns z (normalized longitudinal units) and B (tesla)
    std::string file;

    bool operator==(const ProfileConfig&) const = default;
};

struct RunConfig {
    // [setup]
    double energy_kev = 100.0;
    // Peak field in tesla; sets the transverse unit rho_H.  May be omitted
    // (left 0) only for tabulated profiles, where the file's peak |B| is used.
    double field_tesla = 0.0;
    double length = 30.0; // interaction window L, normalized units

    // [profile]
    ProfileConfig profile;

    // [beam]
    double b0 = 1.0;
    double b0_prime = 0.0;
    // Either the dipole-channel shorthand ell_i (channel (l,0) -> (l-1,0)) or
    // explicit initial/final labels; setting both is an error.
    std::optional<int> ell_i;
    std::optional<ModeLabel> initial;
    std::optional<ModeLabel> final;

    // [photon]
    int theta_points = 501;
    double theta_min = 0.0;
    double theta_max = 0.0; // 0 means "use pi"
    int phi_samples = 16;
    bool dipole = false;

    // [run]
    double rel_tol = 1e-10;
    std::optional<double> z_start; // ermakov command only; default -L/2
    std::optional<double> z_end;   // ermakov command only; default +L/2
    int samples = 1001;            // trajectory CSV rows

    // [output]
    std::string output_path;

    // [sweep]
    std::string sweep_variable;
    std::vector<double> sweep_values;

    bool operator==(const RunConfig&) const = default;
};

// Parses configuration text.  Throws ConfigError with the offending line/key.
RunConfig parse_config(const std::string& text);

// Loads and parses a configuration file.  Throws ConfigError if unreadable.
RunConfig load_config(const std::string& path);

// Canonical text form; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

// Cross-field validation shared by all commands (positivity, grid sanity,
// mode-shorthand exclusivity).  Throws ConfigError.
void validate(const RunConfig& config);

// The angular grid [theta_min, theta_max] with theta_points entries.
std::vector<double> theta_grid(const RunConfig& config);

// Effective initial/final mode labels (shorthand expanded).
std::pair<ModeLabel, ModeLabel> mode_labels(const RunConfig& config);

// Builds the field profile named by config.profile.  For tabulated profiles
// the file is read here; peak_tesla_out receives the effective peak field
// (config.field_tesla, or the file's peak when the config leaves it unset).
FieldProfile build_profile(const RunConfig& config, double& peak_tesla_out);

// derive_kinematics on the effective (energy, peak field) pair.
BeamKinematics kinematics_for(const RunConfig& config, double peak_tesla);

} // namespace twistrad::cli
